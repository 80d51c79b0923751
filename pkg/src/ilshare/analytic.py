"""Closed-form growth rate, lambda and share values in high precision.

For a class ``W`` with counts ``w_n``::

    lambda_W = sum_n w_n r^(n+1)        mu_W = lim w_n / f_n

where ``r`` is the reciprocal growth rate of the total counts ``f_n``.  Each
production shape of :mod:`ilshare.counting` has a combinator that computes
``(lambda_W, mu_W)`` from the values of the classes it refers to, so running a
:class:`~ilshare.counting.ClassSystem` through :func:`run_pipeline` gives the
shares of every class without touching the counts.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import mpmath

from ilshare.counting import (ClassSystem, Composite, CountTable, DisjointUnion, LinearCombo,
                              SelfRecursive, ShiftedSelf, Total, empirical_share,
                              partial_lambda)
from ilshare.formula import Preset

DEFAULT_PRECISION = int(os.environ.get("ILSHARE_PRECISION", "256"))


class CombinatorError(ArithmeticError):
    pass


class NegativeDiscriminantError(CombinatorError):
    pass


class NonPositiveDenominatorError(CombinatorError):
    pass


class OutOfRangeError(CombinatorError):
    pass


class DivergenceError(ArithmeticError):
    pass


def _context(prec: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def growth_rate(p: int, q: int, s: int, prec: int = DEFAULT_PRECISION):
    """``r = 1 / (p + 2qs + 2 sqrt((p + qs) qs))``, the smaller root of ``(1-pz)^2 = 4qsz``."""
    if p < 0 or q < 1 or s < 1:
        raise ValueError(f"need p >= 0, q >= 1, s >= 1; got {(p, q, s)}")
    ctx = _context(prec)
    qs = ctx.mpf(q * s)
    return 1 / (p + 2 * qs + 2 * ctx.sqrt((p + qs) * qs))


class AnalyticContext:
    """Alphabet signature with ``r`` and ``lambda_F`` at a fixed working precision."""

    def __init__(self, p: int, q: int, s: int, prec: int = DEFAULT_PRECISION):
        self.p, self.q, self.s = p, q, s
        self.prec = prec
        self.mp = _context(prec)
        self.r = growth_rate(p, q, s, prec)
        self.lambda_F = (1 - p * self.r) / (2 * q)

    @classmethod
    def for_alphabet(cls, alphabet, prec: int = DEFAULT_PRECISION) -> "AnalyticContext":
        return cls(*alphabet.signature, prec=prec)

    def mpf(self, x):
        return self.mp.mpf(x)

    def residual(self):
        """``(1 - pr)^2 - 4qsr``, zero up to rounding."""
        return (1 - self.p * self.r) ** 2 - 4 * self.q * self.s * self.r

    def __repr__(self):
        return (f"AnalyticContext(p={self.p}, q={self.q}, s={self.s}, prec={self.prec}, "
                f"r={self.mp.nstr(self.r, 12)})")


def _check_range(ctx: Optional[AnalyticContext], lam, mu, what: str):
    if ctx is None:
        return
    slack = ctx.mp.ldexp(1, -ctx.prec + 16)
    if lam < -slack or mu < -slack or mu > 1 + slack or lam > ctx.lambda_F + slack:
        raise OutOfRangeError(f"{what}: (lambda, mu) = ({ctx.mp.nstr(lam, 10)}, "
                              f"{ctx.mp.nstr(mu, 10)}) outside [0, lambda_F] x [0, 1]")


def combinator_union(lam_u, mu_u, lam_v, mu_v, ctx: Optional[AnalyticContext] = None,
                     sign: int = 1):
    """Disjoint union, or set difference ``W = U ∖ V`` with ``sign=-1``."""
    lam, mu = lam_u + sign * lam_v, mu_u + sign * mu_v
    _check_range(ctx, lam, mu, "union" if sign > 0 else "difference")
    return lam, mu


def combinator_self_recursive(ctx: AnalyticContext, lam_u, mu_u, lam_v, mu_v,
                              p_prime: int, q_prime: int, q_dprime: int):
    """``W ::= U | ◇W | W*W | (V∖W)*W`` with multiplicities ``p', q', q''``."""
    if (p_prime, q_prime, q_dprime) == (ctx.p, ctx.q, 0):
        raise CombinatorError("(p', q', q'') = (p, q, 0) is excluded")
    d = 1 - p_prime * ctx.r - q_dprime * lam_v
    if d <= 0:
        raise NonPositiveDenominatorError(f"1 - p'r - q''lambda_V = {ctx.mp.nstr(d, 10)}")
    disc = d * d - 4 * (q_prime - q_dprime) * lam_u
    if disc < 0:
        raise NegativeDiscriminantError(f"discriminant {ctx.mp.nstr(disc, 10)} < 0")
    lam = 2 * lam_u / (d + ctx.mp.sqrt(disc))
    denom = d - 2 * (q_prime - q_dprime) * lam
    if denom <= 0:
        raise NonPositiveDenominatorError(f"share denominator {ctx.mp.nstr(denom, 10)}")
    mu = (mu_u + q_dprime * lam * mu_v) / denom
    _check_range(ctx, lam, mu, "self-recursive")
    return lam, mu


def combinator_composite(ctx: AnalyticContext, s_prime: int, p_prime: int, lam_t, mu_t,
                         q_prime: int, lam_u, mu_u, lam_v, mu_v):
    """``W ::= ♣ (s' of them) | ◇T | U*V``."""
    r = ctx.r
    lam = r * s_prime + p_prime * r * lam_t + q_prime * lam_u * lam_v
    mu = p_prime * r * mu_t + q_prime * (lam_v * mu_u + lam_u * mu_v)
    _check_range(ctx, lam, mu, "composite")
    return lam, mu


def combinator_shifted_self(ctx: AnalyticContext, lam_u, mu_u, p_prime: int, q_prime: int):
    """``W ::= U | ◇W | ♣*(◇W)``: both values scale by ``1 / (1 - p'r - q'r^2)``."""
    d = 1 - p_prime * ctx.r - q_prime * ctx.r ** 2
    if d <= 0:
        raise NonPositiveDenominatorError(f"1 - p'r - q'r^2 = {ctx.mp.nstr(d, 10)}")
    lam, mu = lam_u / d, mu_u / d
    _check_range(ctx, lam, mu, "shifted-self")
    return lam, mu


def combinator_linear(ctx: AnalyticContext, terms):
    """Signed sum of shifted classes; ``terms`` holds ``(coef, lam, mu, shift)``.

    Shifting a sequence by ``d`` multiplies both ``lambda`` and ``mu`` by ``r^d``.
    """
    lam = ctx.mpf(0)
    mu = ctx.mpf(0)
    for coef, lam_t, mu_t, shift in terms:
        scale = coef * ctx.r ** shift
        lam += scale * lam_t
        mu += scale * mu_t
    _check_range(ctx, lam, mu, "linear combination")
    return lam, mu


@dataclass(frozen=True)
class ClassValue:
    lam: mpmath.mpf
    mu: mpmath.mpf
    provenance: str


@dataclass(frozen=True)
class ClassAnalytics:
    system: ClassSystem
    context: AnalyticContext
    values: Mapping[str, ClassValue]

    def __getitem__(self, name: str) -> ClassValue:
        return self.values[name]

    def lam(self, name: str):
        return self.values[name].lam

    def mu(self, name: str):
        return self.values[name].mu


def run_pipeline(system: Union[ClassSystem, Preset, str],
                 prec: int = DEFAULT_PRECISION) -> ClassAnalytics:
    """Evaluate ``(lambda, mu)`` for every class of ``system`` in dependency order."""
    if not isinstance(system, ClassSystem):
        from ilshare.presets import preset_system
        system = preset_system(system)
    ctx = AnalyticContext.for_alphabet(system.alphabet, prec)
    zero = ctx.mpf(0)
    vals: dict[str, ClassValue] = {}

    def get(name):
        if name is None:
            return zero, zero
        v = vals[name]
        return v.lam, v.mu

    for name in system.order:
        shape = system.classes[name]
        if isinstance(shape, Total):
            lam, mu = ctx.lambda_F, ctx.mpf(1)
        elif isinstance(shape, DisjointUnion):
            lam, mu = zero, zero
            for part in shape.parts:
                lam, mu = combinator_union(lam, mu, *get(part))
            _check_range(ctx, lam, mu, name)
        elif isinstance(shape, SelfRecursive):
            lam, mu = combinator_self_recursive(ctx, *get(shape.u), *get(shape.v),
                                                shape.p_prime, shape.q_prime, shape.q_dprime)
        elif isinstance(shape, Composite):
            lam, mu = combinator_composite(ctx, shape.s_prime, shape.p_prime, *get(shape.t),
                                           shape.q_prime, *get(shape.u), *get(shape.v))
        elif isinstance(shape, ShiftedSelf):
            lam, mu = combinator_shifted_self(ctx, *get(shape.u), shape.p_prime, shape.q_prime)
        elif isinstance(shape, LinearCombo):
            lam, mu = combinator_linear(
                ctx, [(t.coef, *get(t.ref), t.shift) for t in shape.terms])
        else:
            raise CombinatorError(f"unknown shape for {name}: {shape!r}")
        vals[name] = ClassValue(lam, mu, shape.kind)

    return ClassAnalytics(system, ctx, {name: vals[name] for name in system.classes})


def total_constant(ctx: AnalyticContext):
    """``c_F`` in ``f_n ~ c_F r^(-n) n^(-3/2)``."""
    pr = ctx.p * ctx.r
    return ctx.mp.sqrt(1 + pr) * ctx.s / ((1 - pr) ** ctx.mpf(1.5) * ctx.mp.sqrt(ctx.mp.pi))


@dataclass(frozen=True)
class AsymptoticProfile:
    """``w_n ~ constant * (1/r)^n / n^(3/2)``."""

    constant: mpmath.mpf
    r: mpmath.mpf

    def estimate(self, n: int):
        mp = self.constant.context
        return self.constant * self.r ** (-n) / mp.mpf(n) ** mp.mpf(1.5)


def asymptotic_constant(ctx: AnalyticContext, mu) -> AsymptoticProfile:
    return AsymptoticProfile(mu * total_constant(ctx), ctx.r)


@dataclass(frozen=True)
class ConvergenceDiagnostic:
    name: str
    horizon: int
    mu: mpmath.mpf
    deviations: Mapping[int, mpmath.mpf]   # |w_n/f_n - mu| at horizon/4, /2, horizon
    lambda_gap: mpmath.mpf                 # |partial sum - lambda|
    tail_bound: mpmath.mpf
    total_deviation: mpmath.mpf            # |f_N N^(3/2) r^N - c_F|

    @property
    def mu_deviation(self):
        return self.deviations[self.horizon]

    @property
    def lambda_ok(self) -> bool:
        return self.lambda_gap <= self.tail_bound

    @property
    def non_increasing(self) -> bool:
        seq = [self.deviations[n] for n in sorted(self.deviations)]
        tol = mpmath.mpf(2) ** -100
        return all(b <= a + tol for a, b in zip(seq, seq[1:]))


def diagnose_convergence(table: CountTable, analytics: ClassAnalytics, name: str,
                         strict: bool = True) -> ConvergenceDiagnostic:
    """Compare the exact counts with the closed forms for one class.

    Raises :class:`DivergenceError` (when ``strict``) if the share deviation at
    the horizon exceeds the deviation at a quarter of the horizon.
    """
    N = table.horizon
    if N < 50:
        raise ValueError("convergence diagnostics need a horizon of at least 50")
    ctx = analytics.context
    mp = ctx.mp
    value = analytics[name]
    deviations = {}
    for n in (N // 4, N // 2, N):
        share = empirical_share(table, name, n)
        deviations[n] = abs(mp.mpf(share.numerator) / share.denominator - value.mu)
    partial = partial_lambda(table, name, ctx.r, ctx.prec)
    scaled = mp.mpf(table.total[N]) * mp.mpf(N) ** mp.mpf(1.5) * ctx.r ** N
    diag = ConvergenceDiagnostic(
        name=name, horizon=N, mu=value.mu, deviations=deviations,
        lambda_gap=abs(partial.value - value.lam), tail_bound=partial.tail_bound,
        total_deviation=abs(scaled - total_constant(ctx)),
    )
    if strict and deviations[N] > deviations[N // 4] + mpmath.mpf(2) ** -100:
        raise DivergenceError(
            f"{name}: share deviation grew from {mp.nstr(deviations[N // 4], 5)} at n={N // 4} "
            f"to {mp.nstr(deviations[N], 5)} at n={N}")
    return diag
