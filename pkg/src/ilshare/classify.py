"""Structural membership tests for the closed-IL formula classes.

Grammars per preset alphabet (``□`` rules only with a box, ``⊤`` rules only
with top)::

    N ::= ⊥ | A→N                      A = every non-negative formula
    M ::= □N | A▷N                     X ::= M→⊥
    B ::= □N | □M | ⊥▷F | F▷A | A▷⊥ | N▷X | X▷⊥
    L ::= ⊥ | ⊤ | B | F→⊤ | L→L        P = L and N
    G ::= L | N | M | □G | (G→⊥)▷⊥ | ⊤→G

Every formula gets a bitmask built from the bitmasks of its immediate
subformulas, so one pass over a subformula-closed family classifies it.
"""
from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Callable, Optional, Union

from ilshare.formula import (BOT, BOX, DEFAULT_GUARD, IMP, TOP, TRI, Alphabet, Binary,
                             Formula, Primitive, Unary, enumerate_levels)


class ClassLabel(enum.Enum):
    ALL = "F"
    NEGATIVE = "N"
    AFFIRMATIVE = "A"
    DIRECT = "M"
    CROSS = "X"
    BASIC_LOCAL = "B"
    LOCAL = "L"
    NEG_LOCAL = "P"
    GL_LIKE = "G"

    @property
    def letter(self) -> str:
        return self.value

    @classmethod
    def from_letter(cls, letter: str) -> "ClassLabel":
        return cls(letter)


class UnsupportedAlphabetError(ValueError):
    pass


# membership bits
F_ = 1 << 0
N_ = 1 << 1
A_ = 1 << 2
M_ = 1 << 3
X_ = 1 << 4
B_ = 1 << 5
L_ = 1 << 6
P_ = 1 << 7
G_ = 1 << 8
# B patterns
BOT_TRI_F = 1 << 9
F_TRI_A = 1 << 10
A_TRI_BOT = 1 << 11
N_TRI_X = 1 << 12
X_TRI_BOT = 1 << 13
BOX_N = 1 << 14
BOX_M = 1 << 15
# shape flags
IS_BOT = 1 << 16
IS_TOP = 1 << 17
IMP_TOP = 1 << 18       # H→⊤
NOT_G = 1 << 19         # H→⊥ with H in G
G_REC = 1 << 20         # □G, (G→⊥)▷⊥ or ⊤→G

LABEL_BITS = {
    ClassLabel.ALL: F_, ClassLabel.NEGATIVE: N_, ClassLabel.AFFIRMATIVE: A_,
    ClassLabel.DIRECT: M_, ClassLabel.CROSS: X_, ClassLabel.BASIC_LOCAL: B_,
    ClassLabel.LOCAL: L_, ClassLabel.NEG_LOCAL: P_, ClassLabel.GL_LIKE: G_,
}

PATTERN_BITS = {
    "⊥▷F": BOT_TRI_F, "F▷A": F_TRI_A, "A▷⊥": A_TRI_BOT, "N▷X": N_TRI_X,
    "X▷⊥": X_TRI_BOT, "□N": BOX_N, "□M": BOX_M,
}
_TRI_PATTERNS = BOT_TRI_F | F_TRI_A | A_TRI_BOT | N_TRI_X | X_TRI_BOT


def _all(mask: int) -> Callable[[int], bool]:
    return lambda bits: bits & mask == mask


def _any(mask: int) -> Callable[[int], bool]:
    return lambda bits: bool(bits & mask)


# Membership predicate for every class name used by the preset class systems.
CLASS_PREDICATES: dict[str, Callable[[int], bool]] = {
    **{label.letter: _all(bit) for label, bit in LABEL_BITS.items()},
    **{name: _all(bit) for name, bit in PATTERN_BITS.items()},
    "⊥": _all(IS_BOT),
    "⊤": _all(IS_TOP),
    "⊥▷A": _all(BOT_TRI_F | F_TRI_A),
    "⊥▷X": _all(BOT_TRI_F | N_TRI_X),
    "F→⊤": _all(IMP_TOP),
    "⊥|B": _any(IS_BOT | B_),
    "⊥|B|F→⊤": _any(IS_BOT | B_ | IMP_TOP),
    "Y": lambda bits: bits & (L_ | IS_TOP) == L_,
    "Q": lambda bits: bits & (G_ | G_REC) == G_,
}


@dataclass(frozen=True)
class ClassificationProfile:
    formula: Formula
    memberships: Mapping[ClassLabel, bool]
    patterns: frozenset[str]

    def __getitem__(self, label: Union[ClassLabel, str]) -> bool:
        if isinstance(label, str):
            label = ClassLabel(label)
        return self.memberships[label]

    def true_letters(self) -> list[str]:
        return [label.letter for label, v in self.memberships.items() if v]


class Classifier:
    """Memoizing classifier for one preset alphabet.

    The memo is per instance; do not share an instance between threads.
    """

    def __init__(self, alphabet: Alphabet):
        if alphabet.tag is None or Alphabet.preset(alphabet.tag) != alphabet:
            raise UnsupportedAlphabetError(
                "class grammars exist only for the minimal, box and box-top alphabets")
        self.alphabet = alphabet
        self.preset = alphabet.tag
        self._bot = alphabet.primitives.index(BOT)
        self._top = alphabet.primitives.index(TOP) if TOP in alphabet.primitives else None
        self._box = alphabet.unary.index(BOX) if BOX in alphabet.unary else None
        self._imp = alphabet.binary.index(IMP)
        self._tri = alphabet.binary.index(TRI)
        self._memo: dict[Formula, int] = {}

    def bits(self, f: Formula) -> int:
        memo = self._memo
        got = memo.get(f)
        if got is not None:
            return got
        # explicit post-order walk so deep formulas do not hit the recursion limit
        stack = [f]
        while stack:
            node = stack[-1]
            if node in memo:
                stack.pop()
                continue
            kind = type(node)
            pending = []
            if kind is Unary:
                pending = [node.child]
            elif kind is Binary:
                pending = [node.left, node.right]
            pending = [c for c in pending if c not in memo]
            if pending:
                stack.extend(pending)
            else:
                memo[node] = self._compute(node)
                stack.pop()
        return memo[f]

    def transient_bits(self, f: Formula) -> int:
        """Bitmask of ``f`` without storing ``f`` itself in the memo."""
        got = self._memo.get(f)
        if got is not None:
            return got
        if type(f) is Unary:
            self.bits(f.child)
        elif type(f) is Binary:
            self.bits(f.left)
            self.bits(f.right)
        return self._compute(f)

    def _compute(self, f: Formula) -> int:
        kind = type(f)
        if kind is Primitive:
            if f.index == self._bot:
                return F_ | N_ | L_ | P_ | G_ | IS_BOT
            if f.index == self._top:
                return F_ | A_ | L_ | G_ | IS_TOP
            raise ValueError(f"primitive index {f.index} not in {self.alphabet.primitives}")

        if kind is Unary:
            if f.op != self._box:
                raise ValueError(f"unary index {f.op} not in {self.alphabet.unary}")
            h = self.bits(f.child)
            out = F_ | A_
            if h & N_:
                out |= M_ | BOX_N
            if h & M_:
                out |= BOX_M
            if out & (BOX_N | BOX_M):
                out |= B_ | L_
            if h & G_:
                out |= G_REC
            if out & (L_ | M_ | G_REC):
                out |= G_
            return out

        if kind is not Binary:
            raise TypeError(f"not a formula node: {f!r}")
        hl = self.bits(f.left)
        hr = self.bits(f.right)
        out = F_
        if f.op == self._imp:
            if hl & A_ and hr & N_:
                out |= N_
            else:
                out |= A_
            if hr & IS_BOT:
                if hl & M_:
                    out |= X_
                if hl & G_:
                    out |= NOT_G
            if hl & L_ and hr & L_:
                out |= L_
            if hr & IS_TOP:
                out |= IMP_TOP | L_
            if hl & IS_TOP and hr & G_:
                out |= G_REC
            if out & L_ and out & N_:
                out |= P_
            if out & (L_ | N_ | G_REC):
                out |= G_
            return out

        if f.op != self._tri:
            raise ValueError(f"binary index {f.op} not in {self.alphabet.binary}")
        out |= A_
        if hl & A_ and hr & N_:
            out |= M_
        if hl & IS_BOT:
            out |= BOT_TRI_F
        if hr & A_:
            out |= F_TRI_A
        if hl & A_ and hr & IS_BOT:
            out |= A_TRI_BOT
        if hl & N_ and hr & X_:
            out |= N_TRI_X
        if hl & X_ and hr & IS_BOT:
            out |= X_TRI_BOT
        if out & _TRI_PATTERNS:
            out |= B_ | L_
        if hl & NOT_G and hr & IS_BOT:
            out |= G_REC
        if out & (L_ | M_ | G_REC):
            out |= G_
        return out

    def profile(self, f: Formula) -> ClassificationProfile:
        b = self.bits(f)
        return ClassificationProfile(
            formula=f,
            memberships={label: bool(b & bit) for label, bit in LABEL_BITS.items()},
            patterns=frozenset(name for name, bit in PATTERN_BITS.items() if b & bit),
        )


def classify(f: Formula, alphabet: Alphabet) -> ClassificationProfile:
    return Classifier(alphabet).profile(f)


def oracle_counts(alphabet: Alphabet, upto: int, classes: Optional[Iterable[str]] = None,
                  limit: Optional[int] = DEFAULT_GUARD) -> dict[str, list[int]]:
    """Brute-force counts ``w_0..w_upto`` for each named class.

    Enumerates every formula of complexity ``<= upto`` once and tests it
    against the predicates in :data:`CLASS_PREDICATES`.
    """
    names = list(CLASS_PREDICATES if classes is None else classes)
    unknown = [name for name in names if name not in CLASS_PREDICATES]
    if unknown:
        raise KeyError(f"no membership predicate for classes {unknown}")
    classifier = Classifier(alphabet)
    # histogram of bitmasks per level; predicates are evaluated per distinct mask
    histograms: list[dict[int, int]] = [dict() for _ in range(upto + 1)]
    for n, f in enumerate_levels(alphabet, upto, limit):
        b = classifier.bits(f) if n < upto else classifier.transient_bits(f)
        hist = histograms[n]
        hist[b] = hist.get(b, 0) + 1
    counts = {}
    for name in names:
        pred = CLASS_PREDICATES[name]
        counts[name] = [sum(c for b, c in hist.items() if pred(b)) for hist in histograms]
    return counts


def count_by_enumeration(alphabet: Alphabet, label: Union[ClassLabel, str], n: int,
                         limit: Optional[int] = DEFAULT_GUARD) -> int:
    """Number of complexity-``n`` formulas in class ``label``, by brute force."""
    name = label.letter if isinstance(label, ClassLabel) else label
    return oracle_counts(alphabet, n, [name], limit)[name][n]
