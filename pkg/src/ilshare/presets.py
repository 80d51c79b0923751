"""Class systems for the three preset alphabets.

The same data drives exact counting (:func:`ilshare.counting.count_system`)
and the closed-form shares (:func:`ilshare.analytic.run_pipeline`).

Notes on the less obvious encodings:

* ``M`` over the minimal alphabet is ``N`` minus ``⊥``: ``A▷N`` and ``A→N``
  have the same counts, so ``M_0 = 0`` and ``M_n = N_n`` afterwards.
* ``B`` is inclusion-exclusion over its patterns.  The only overlapping pairs
  are ``⊥▷F``/``F▷A`` (giving ``⊥▷A``) and ``⊥▷F``/``N▷X`` (giving ``⊥▷X``);
  the two box patterns are disjoint from everything else.
* With ``⊤``, ``L→L`` and ``F→⊤`` overlap in ``L→⊤``.  We count
  ``Y = L ∖ {⊤}`` instead: ``Y ::= ⊥ | B | F→⊤ | ⊤→Y | Y→Y`` is a disjoint
  cover in which ``⊤→Y`` plays the role of a unary wrapper, and ``L = Y | ⊤``.
* ``G ::= Q | □G | (G→⊥)▷⊥ | ⊤→G`` with ``Q`` the members of ``L ∪ N ∪ M``
  that are not of one of the three recursive forms.  ``Q`` is an
  inclusion-exclusion sum whose first two values are seeded from enumeration.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Union

from ilshare.counting import (ClassSystem, Composite, DisjointUnion, LinearCombo,
                              SelfRecursive, ShiftedSelf, Term, Total)
from ilshare.formula import Alphabet, Preset

LABEL_RULES = {
    Preset.MINIMAL: {
        "F": "⊥ | F→F | F▷F",
        "N": "⊥ | A→N",
        "A": "N→F | F→A | F▷F",
        "M": "A▷N",
        "X": "M→⊥",
        "B": "⊥▷F | F▷A | A▷⊥ | N▷X | X▷⊥",
        "L": "⊥ | B | L→L",
        "P": "both L and N",
        "G": "L | N | M | (G→⊥)▷⊥",
    },
    Preset.WITH_BOX: {
        "F": "⊥ | □F | F→F | F▷F",
        "N": "⊥ | A→N",
        "A": "□F | N→F | F→A | F▷F",
        "M": "□N | A▷N",
        "X": "M→⊥",
        "B": "□N | □M | ⊥▷F | F▷A | A▷⊥ | N▷X | X▷⊥",
        "L": "⊥ | B | L→L",
        "P": "both L and N",
        "G": "L | N | M | □G | (G→⊥)▷⊥",
    },
    Preset.WITH_BOX_TOP: {
        "F": "⊥ | ⊤ | □F | F→F | F▷F",
        "N": "⊥ | A→N",
        "A": "⊤ | □F | N→F | F→A | F▷F",
        "M": "□N | A▷N",
        "X": "M→⊥",
        "B": "□N | □M | ⊥▷F | F▷A | A▷⊥ | N▷X | X▷⊥",
        "L": "⊥ | ⊤ | B | F→⊤ | L→L",
        "P": "both L and N",
        "G": "L | N | M | □G | (G→⊥)▷⊥ | ⊤→G",
    },
}

LABELS = ("F", "N", "A", "M", "X", "B", "L", "P", "G")

# Q_0, Q_1 from a brute-force run (`ilshare verify --seed-tables` checks them).
Q_BASE = {
    Preset.MINIMAL: (1, 2),
    Preset.WITH_BOX: (1, 2),
    Preset.WITH_BOX_TOP: (2, 6),
}


def _lin(*terms: tuple[int, str, int], base=()) -> LinearCombo:
    return LinearCombo(tuple(Term(c, ref, shift) for c, ref, shift in terms), tuple(base))


def _tri(u: str, v: str) -> Composite:
    return Composite(q_prime=1, u=u, v=v)


def _build(preset: Preset) -> ClassSystem:
    alphabet = Alphabet.preset(preset)
    box = preset is not Preset.MINIMAL
    top = preset is Preset.WITH_BOX_TOP

    c: dict = {}
    rules = dict(LABEL_RULES[preset])
    c["F"] = Total()
    c["⊥"] = Composite(s_prime=1)
    if top:
        c["⊤"] = Composite(s_prime=1)
    c["N"] = SelfRecursive(u="⊥", q_dprime=1, v="F")
    c["A"] = _lin((1, "F", 0), (-1, "N", 0))
    if box:
        c["M"] = Composite(p_prime=1, t="N", q_prime=1, u="A", v="N")
    else:
        c["M"] = _lin((1, "N", 0), (-1, "⊥", 0))
    c["X"] = _tri("M", "⊥")

    patterns = []
    if box:
        c["□N"] = Composite(p_prime=1, t="N")
        c["□M"] = Composite(p_prime=1, t="M")
        patterns += ["□N", "□M"]
    c["⊥▷F"] = _tri("⊥", "F")
    c["F▷A"] = _tri("F", "A")
    c["A▷⊥"] = _tri("A", "⊥")
    c["N▷X"] = _tri("N", "X")
    c["X▷⊥"] = _tri("X", "⊥")
    c["⊥▷A"] = _tri("⊥", "A")
    c["⊥▷X"] = _tri("⊥", "X")
    patterns += ["⊥▷F", "F▷A", "A▷⊥", "N▷X", "X▷⊥"]
    c["B"] = _lin(*[(1, name, 0) for name in patterns], (-1, "⊥▷A", 0), (-1, "⊥▷X", 0))
    rules["⊥▷A"] = "⊥▷F and F▷A"
    rules["⊥▷X"] = "⊥▷F and N▷X"

    if top:
        c["F→⊤"] = Composite(q_prime=1, u="F", v="⊤")
        c["⊥|B|F→⊤"] = DisjointUnion(("⊥", "B", "F→⊤"))
        c["Y"] = SelfRecursive(u="⊥|B|F→⊤", p_prime=1, q_prime=1)
        c["L"] = DisjointUnion(("Y", "⊤"))
        rules["Y"] = "⊥ | B | F→⊤ | ⊤→Y | Y→Y  (L without ⊤)"
    else:
        c["⊥|B"] = DisjointUnion(("⊥", "B"))
        c["L"] = SelfRecursive(u="⊥|B", q_prime=1)
    c["P"] = SelfRecursive(u="⊥", q_dprime=1, v="L")

    if box:
        q_terms = [(1, "L", 0), (1, "N", 0), (1, "M", 0), (-1, "P", 0),
                   # L and M: □N | A▷⊥
                   (-1, "□N", 0), (-1, "A▷⊥", 0),
                   # □G forms: □N | □M
                   (-1, "□N", 0), (-1, "□M", 0),
                   # (G→⊥)▷⊥ forms: (N→⊥)▷⊥ | (M→⊥)▷⊥
                   (-1, "N", 2), (-1, "M", 2)]
        if top:
            # ⊤→G forms: ⊤→(L ∪ N)
            q_terms += [(-1, "L", 1), (-1, "N", 1), (1, "P", 1)]
    else:
        q_terms = [(1, "L", 0), (1, "N", 0), (1, "M", 0),
                   (-1, "N", 2), (-1, "M", 2),
                   (-1, "F", 1), (1, "N", 1),
                   (-1, "N", 2), (-1, "P", 0), (1, "N", 2)]
    c["Q"] = _lin(*q_terms, base=Q_BASE[preset])
    rules["Q"] = "G without its recursive forms"
    c["G"] = ShiftedSelf(u="Q", p_prime=int(box) + int(top), q_prime=1)
    return ClassSystem(alphabet, c, rules)


@lru_cache(maxsize=None)
def preset_system(preset: Union[Preset, str]) -> ClassSystem:
    return _build(Preset(preset))
