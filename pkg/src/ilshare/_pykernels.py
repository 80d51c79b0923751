"""Pure-Python reference implementation of the convolution kernels."""
from __future__ import annotations

from operator import mul
from typing import Optional, Sequence


def convolve(u: Sequence[int], v: Sequence[int], horizon: int) -> list[int]:
    """Shifted Cauchy product: ``c[0] = 0`` and ``c[n] = sum_{k<n} u[k] v[n-1-k]``."""
    u, v = list(u[:horizon]), list(v[:horizon])
    su = [k for k, x in enumerate(u) if x]
    sv = [k for k, x in enumerate(v) if x]
    if len(sv) < len(su):
        u, v, su = v, u, sv
    out = [0]
    if len(su) * 4 < horizon:
        # sparse operand: only its nonzero entries contribute
        for n in range(1, horizon + 1):
            out.append(sum(u[k] * v[n - 1 - k] for k in su if k < n))
        return out
    for n in range(1, horizon + 1):
        out.append(sum(map(mul, u[:n], reversed(v[:n]))))
    return out


def self_recursive(
    u: Sequence[int],
    v: Optional[Sequence[int]],
    alpha: int,
    beta: int,
    gamma: int,
    horizon: int,
) -> list[int]:
    """Solve ``w[n] = u[n] + alpha w[n-1] + sum_{k<n} (beta v[k] + gamma w[k]) w[n-1-k]``.

    ``w[0] = u[0]``.  ``v`` may be ``None`` when ``beta == 0``.
    """
    w = [u[0]]
    # coef[k] = beta v[k] + gamma w[k], filled in as soon as w[k] is known
    coef = [(beta * v[0] if beta else 0) + gamma * w[0]]
    for n in range(1, horizon + 1):
        acc = u[n] + alpha * w[n - 1]
        acc += sum(map(mul, coef, reversed(w)))
        w.append(acc)
        coef.append((beta * v[n] if beta else 0) + gamma * acc)
    return w
