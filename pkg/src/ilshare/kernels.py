"""Convolution kernels behind the exact counting engine.

The compiled GMP extension is used when it was built; otherwise the pure-Python
reference is selected.  ``ILSHARE_KERNEL=python`` forces the fallback.
"""
from __future__ import annotations

import os

from ilshare import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from ilshare import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("ILSHARE_KERNEL", "").lower() == "python" or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

convolve = BACKENDS[BACKEND].convolve
self_recursive = BACKENDS[BACKEND].self_recursive


def use(name: str) -> None:
    """Switch the active backend for this process."""
    global BACKEND, convolve, self_recursive
    if name not in BACKENDS:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name
    convolve = BACKENDS[name].convolve
    self_recursive = BACKENDS[name].self_recursive


__all__ = ["BACKEND", "BACKENDS", "convolve", "self_recursive", "use"]
