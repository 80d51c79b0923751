"""Exact big-integer counts for classes defined by production shapes.

A :class:`ClassSystem` maps class names to one of a handful of production
shapes.  :func:`count_system` evaluates the classes in dependency order and
returns the sequences ``w_0..w_N``:

``Total``
    every formula, ``f_0 = s``, ``f_n = p f_{n-1} + q sum f_k f_{n-1-k}``.
``DisjointUnion``
    disjoint union, ``w_n = sum of the parts``.
``SelfRecursive``
    ``W ::= U | ◇W (p') | W*W (q') | (V∖W)*W (q'')``, so
    ``w_n = u_n + p' w_{n-1} + q' sum w_k w_{n-1-k} + q'' sum (v_k - w_k) w_{n-1-k}``.
``Composite``
    ``W ::= s' primitives | ◇T (p') | U*V (q')``, so
    ``w_n = p' t_{n-1} + q' sum u_k v_{n-1-k}`` and ``w_0 = s'``.
``ShiftedSelf``
    ``W ::= U | ◇W (p') | ♣*(◇W) (q')``, so ``w_n = u_n + p' w_{n-1} + q' w_{n-2}``.
``LinearCombo``
    signed sum of index-shifted sequences (inclusion-exclusion bookkeeping).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping, Optional, Sequence, Union

import mpmath

from ilshare import kernels
from ilshare.formula import Alphabet, Preset


class CountingError(ValueError):
    pass


class NegativeCountError(CountingError):
    pass


class BoundViolationError(CountingError):
    pass


class BaseCaseMismatchError(CountingError):
    pass


class HorizonError(CountingError):
    pass


@dataclass(frozen=True)
class Total:
    kind = "total"

    def refs(self) -> tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class DisjointUnion:
    parts: tuple[str, ...]
    kind = "union"

    def refs(self):
        return tuple(self.parts)


@dataclass(frozen=True)
class SelfRecursive:
    u: str
    p_prime: int = 0
    q_prime: int = 0
    q_dprime: int = 0
    v: Optional[str] = None
    kind = "self_recursive"

    def refs(self):
        return (self.u,) if self.v is None else (self.u, self.v)


@dataclass(frozen=True)
class Composite:
    s_prime: int = 0
    p_prime: int = 0
    t: Optional[str] = None
    q_prime: int = 0
    u: Optional[str] = None
    v: Optional[str] = None
    kind = "composite"

    def refs(self):
        return tuple(x for x in (self.t, self.u, self.v) if x is not None)


@dataclass(frozen=True)
class ShiftedSelf:
    u: str
    p_prime: int = 0
    q_prime: int = 0
    kind = "shifted_self"

    def refs(self):
        return (self.u,)


@dataclass(frozen=True)
class Term:
    coef: int
    ref: str
    shift: int = 0


@dataclass(frozen=True)
class LinearCombo:
    terms: tuple[Term, ...]
    base: tuple[int, ...] = ()
    kind = "linear_combo"

    def refs(self):
        return tuple(dict.fromkeys(t.ref for t in self.terms))


Shape = Union[Total, DisjointUnion, SelfRecursive, Composite, ShiftedSelf, LinearCombo]


@dataclass(frozen=True)
class ClassSystem:
    """Named classes over one alphabet, each defined by a production shape.

    ``rules`` optionally carries a human-readable grammar line per class.
    """

    alphabet: Alphabet
    classes: Mapping[str, Shape]
    rules: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self._validate()

    @property
    def order(self) -> list[str]:
        graph = {name: [r for r in shape.refs() if r != name]
                 for name, shape in self.classes.items()}
        return list(TopologicalSorter(graph).static_order())

    def _validate(self):
        p, q, s = self.alphabet.signature
        for name, shape in self.classes.items():
            for ref in shape.refs():
                if ref not in self.classes:
                    raise CountingError(f"class {name!r} refers to unknown class {ref!r}")
            if isinstance(shape, SelfRecursive):
                if shape.u == name or shape.v == name:
                    raise CountingError(f"{name}: self-reference belongs in the shape, not in u/v")
                if not (0 <= shape.p_prime <= p and 0 <= shape.q_prime <= q
                        and 0 <= shape.q_dprime <= q):
                    raise CountingError(f"{name}: parameters out of range for {(p, q, s)}")
                if (shape.p_prime, shape.q_prime, shape.q_dprime) == (p, q, 0):
                    raise CountingError(f"{name}: (p', q', q'') = (p, q, 0) is excluded")
                if shape.q_dprime and shape.v is None:
                    raise CountingError(f"{name}: q'' > 0 needs a class v")
            elif isinstance(shape, Composite):
                if not (0 <= shape.p_prime <= p and 0 <= shape.q_prime <= q
                        and 0 <= shape.s_prime <= s):
                    raise CountingError(f"{name}: parameters out of range for {(p, q, s)}")
                if shape.p_prime and shape.t is None:
                    raise CountingError(f"{name}: p' > 0 needs a class t")
                if shape.q_prime and (shape.u is None or shape.v is None):
                    raise CountingError(f"{name}: q' > 0 needs classes u and v")
            elif isinstance(shape, ShiftedSelf):
                # p' may exceed p: any production with the cardinality of ◇W
                # (for instance ⊤→W) counts as one more unary-like wrapper.
                if shape.p_prime < 0 or shape.q_prime < 0 or shape.p_prime > p + 2 * q * s:
                    raise CountingError(f"{name}: parameters out of range")
            elif isinstance(shape, LinearCombo):
                if any(t.shift < 0 for t in shape.terms):
                    raise CountingError(f"{name}: index shifts must be nonnegative")
            if name in shape.refs() and not isinstance(shape, (SelfRecursive, ShiftedSelf)):
                raise CountingError(f"{name}: only recursive shapes may refer to themselves")
        try:
            self.order
        except CycleError as exc:
            raise CountingError(f"class dependencies are cyclic: {exc.args[1]}") from None


@dataclass(frozen=True)
class CountTable:
    system: ClassSystem
    horizon: int
    counts: Mapping[str, Sequence[int]]
    total: Sequence[int]

    def __getitem__(self, name: str) -> Sequence[int]:
        return self.counts[name]


def count_total(alphabet: Union[Alphabet, tuple[int, int, int]], horizon: int) -> list[int]:
    """``f_0..f_N`` for the alphabet (or a bare ``(p, q, s)`` signature)."""
    p, q, s = alphabet.signature if isinstance(alphabet, Alphabet) else alphabet
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    return kernels.self_recursive([s] + [0] * horizon, None, p, 0, q, horizon)


def _shifted(seq: Sequence[int], shift: int, n: int) -> int:
    return seq[n - shift] if n >= shift else 0


def count_system(system: ClassSystem, horizon: int) -> CountTable:
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    alphabet = system.alphabet
    N = horizon
    f = count_total(alphabet, N)
    zero = [0] * (N + 1)
    out: dict[str, list[int]] = {}

    for name in system.order:
        shape = system.classes[name]
        if isinstance(shape, Total):
            w = list(f)
        elif isinstance(shape, DisjointUnion):
            w = [sum(col) for col in zip(*(out[part] for part in shape.parts))]
        elif isinstance(shape, SelfRecursive):
            v = out[shape.v] if shape.v is not None else None
            w = kernels.self_recursive(out[shape.u], v, shape.p_prime, shape.q_dprime,
                                       shape.q_prime - shape.q_dprime, N)
        elif isinstance(shape, Composite):
            w = [0] * (N + 1)
            w[0] = shape.s_prime
            if shape.p_prime:
                t = out[shape.t]
                for n in range(1, N + 1):
                    w[n] += shape.p_prime * t[n - 1]
            if shape.q_prime:
                conv = kernels.convolve(out[shape.u], out[shape.v], N)
                for n in range(1, N + 1):
                    w[n] += shape.q_prime * conv[n]
        elif isinstance(shape, ShiftedSelf):
            u = out[shape.u]
            w = []
            for n in range(N + 1):
                w.append(u[n] + shape.p_prime * _shifted(w, 1, n)
                         + shape.q_prime * _shifted(w, 2, n))
        elif isinstance(shape, LinearCombo):
            w = list(zero)
            for term in shape.terms:
                seq = out[term.ref]
                for n in range(term.shift, N + 1):
                    w[n] += term.coef * seq[n - term.shift]
            for n, seeded in enumerate(shape.base[:N + 1]):
                if seeded != w[n]:
                    raise BaseCaseMismatchError(
                        f"{name}: seeded base value w_{n} = {seeded} but the combination gives {w[n]}")
        else:
            raise CountingError(f"unknown shape for {name}: {shape!r}")

        for n, value in enumerate(w):
            if value < 0:
                raise NegativeCountError(f"{name}: w_{n} = {value} < 0")
            if value > f[n]:
                raise BoundViolationError(f"{name}: w_{n} = {value} exceeds f_{n} = {f[n]}")
        out[name] = w

    return CountTable(system, N, {name: out[name] for name in system.classes}, f)


def empirical_share(table: CountTable, name: str, n: int) -> Fraction:
    """Exact ratio ``w_n / f_n``."""
    if not 0 <= n <= table.horizon:
        raise HorizonError(f"index {n} outside the table horizon {table.horizon}")
    return Fraction(table[name][n], table.total[n])


@dataclass(frozen=True)
class PartialLambda:
    value: mpmath.mpf
    tail_bound: mpmath.mpf


def partial_lambda(table: CountTable, name: str, r, prec: int = 256) -> PartialLambda:
    """Truncated series ``sum_{n<=N} w_n r^(n+1)`` and the universal tail bound.

    The tail bound is ``lambda_F - sum_{n<=N} f_n r^(n+1)``, which dominates the
    missing tail of every class.
    """
    if table.horizon < 1:
        raise HorizonError("partial_lambda needs a horizon of at least 1")
    ctx = mpmath.MPContext()
    ctx.prec = prec
    r = ctx.mpf(r)
    p, q, _ = table.system.alphabet.signature
    lam_f = (1 - p * r) / (2 * q)
    w, f = table[name], table.total
    value = ctx.zero
    total = ctx.zero
    power = r
    for n in range(table.horizon + 1):
        if w[n]:
            value += ctx.mpf(w[n]) * power
        total += ctx.mpf(f[n]) * power
        power *= r
    return PartialLambda(value, lam_f - total)


# --------------------------------------------------------------------------
# serialization

SYSTEM_SCHEMA_ID = "ilshare.class-system/1"


def _shape_to_dict(shape: Shape) -> dict:
    if isinstance(shape, Total):
        return {"shape": "total"}
    if isinstance(shape, DisjointUnion):
        return {"shape": "union", "parts": list(shape.parts)}
    if isinstance(shape, LinearCombo):
        doc = {"shape": "linear_combo",
               "terms": [{"coef": t.coef, "class": t.ref, "shift": t.shift} for t in shape.terms]}
        if shape.base:
            doc["base"] = list(shape.base)
        return doc
    doc = {"shape": shape.kind}
    doc.update({k: v for k, v in shape.__dict__.items() if v is not None})
    return doc


def _shape_from_dict(doc: Mapping) -> Shape:
    kind = doc["shape"]
    params = {k: v for k, v in doc.items() if k != "shape"}
    if kind == "total":
        return Total()
    if kind == "union":
        return DisjointUnion(tuple(params["parts"]))
    if kind == "linear_combo":
        terms = tuple(Term(int(t["coef"]), t["class"], int(t.get("shift", 0)))
                      for t in params["terms"])
        return LinearCombo(terms, tuple(params.get("base", ())))
    cls = {"self_recursive": SelfRecursive, "composite": Composite,
           "shifted_self": ShiftedSelf}.get(kind)
    if cls is None:
        raise CountingError(f"unknown shape {kind!r}")
    return cls(**params)


def system_to_dict(system: ClassSystem) -> dict:
    a = system.alphabet
    return {
        "schema": SYSTEM_SCHEMA_ID,
        "alphabet": {
            "unary": list(a.unary), "binary": list(a.binary), "primitives": list(a.primitives),
            "tag": a.tag.value if a.tag else None,
        },
        "classes": [
            {"name": name, **_shape_to_dict(shape),
             **({"rule": system.rules[name]} if name in system.rules else {})}
            for name, shape in system.classes.items()
        ],
    }


def system_from_dict(doc: Mapping) -> ClassSystem:
    if doc.get("schema") != SYSTEM_SCHEMA_ID:
        raise CountingError(f"expected schema {SYSTEM_SCHEMA_ID!r}, got {doc.get('schema')!r}")
    a = doc["alphabet"]
    tag = Preset(a["tag"]) if a.get("tag") else None
    alphabet = Alphabet(tuple(a["unary"]), tuple(a["binary"]), tuple(a["primitives"]), tag)
    classes, rules = {}, {}
    for entry in doc["classes"]:
        entry = dict(entry)
        name = entry.pop("name")
        if "rule" in entry:
            rules[name] = entry.pop("rule")
        classes[name] = _shape_from_dict(entry)
    return ClassSystem(alphabet, classes, rules)


def system_to_json(system: ClassSystem) -> str:
    return json.dumps(system_to_dict(system), ensure_ascii=False, indent=2)


def system_from_json(text: str) -> ClassSystem:
    return system_from_dict(json.loads(text))


def table_to_csv(table: CountTable, classes: Optional[Iterable[str]] = None) -> str:
    names = list(table.counts if classes is None else classes)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", *names])
    for n in range(table.horizon + 1):
        writer.writerow([n, *(table[name][n] for name in names)])
    return buf.getvalue()
