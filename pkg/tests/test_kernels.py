import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ilshare import _pykernels, kernels

BACKENDS = sorted(kernels.BACKENDS)
big_ints = st.integers(-(10**40), 10**40)


def naive_convolve(u, v, horizon):
    return [0] + [sum(u[k] * v[n - 1 - k] for k in range(n)) for n in range(1, horizon + 1)]


def naive_self_recursive(u, v, alpha, beta, gamma, horizon):
    w = []
    for n in range(horizon + 1):
        val = u[n] + (alpha * w[n - 1] if n else 0)
        for k in range(n):
            val += ((beta * v[k] if beta else 0) + gamma * w[k]) * w[n - 1 - k]
        w.append(val)
    return w


def test_python_backend_always_present():
    assert "python" in kernels.BACKENDS
    assert kernels.BACKEND in kernels.BACKENDS


@pytest.mark.parametrize("name", BACKENDS)
@given(data=st.data())
@settings(max_examples=80, deadline=None)
def test_convolve_matches_naive(name, data):
    horizon = data.draw(st.integers(0, 40))
    u = data.draw(st.lists(big_ints, min_size=horizon, max_size=horizon + 3))
    v = data.draw(st.lists(big_ints, min_size=horizon, max_size=horizon + 3))
    assert kernels.BACKENDS[name].convolve(u, v, horizon) == naive_convolve(u, v, horizon)


@pytest.mark.parametrize("name", BACKENDS)
@given(data=st.data())
@settings(max_examples=80, deadline=None)
def test_convolve_sparse_operand(name, data):
    horizon = data.draw(st.integers(1, 60))
    u = [0] * horizon
    for k in data.draw(st.lists(st.integers(0, horizon - 1), max_size=3)):
        u[k] = data.draw(big_ints)
    v = data.draw(st.lists(big_ints, min_size=horizon, max_size=horizon))
    impl = kernels.BACKENDS[name]
    assert impl.convolve(u, v, horizon) == naive_convolve(u, v, horizon)
    assert impl.convolve(v, u, horizon) == naive_convolve(v, u, horizon)


@pytest.mark.parametrize("name", BACKENDS)
@given(data=st.data())
@settings(max_examples=80, deadline=None)
def test_self_recursive_matches_naive(name, data):
    horizon = data.draw(st.integers(0, 25))
    u = data.draw(st.lists(st.integers(-50, 50), min_size=horizon + 1, max_size=horizon + 1))
    alpha, beta, gamma = (data.draw(st.integers(-3, 3)) for _ in range(3))
    v = data.draw(st.lists(st.integers(-50, 50), min_size=horizon + 1, max_size=horizon + 1))
    want = naive_self_recursive(u, v, alpha, beta, gamma, horizon)
    impl = kernels.BACKENDS[name]
    assert impl.self_recursive(u, v, alpha, beta, gamma, horizon) == want
    if beta == 0:
        assert impl.self_recursive(u, None, alpha, 0, gamma, horizon) == want


@pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")
def test_backends_agree_on_large_counts():
    from ilshare import _ckernels
    n = 400
    f = _ckernels.self_recursive([1] + [0] * n, None, 0, 0, 2, n)
    assert f == _pykernels.self_recursive([1] + [0] * n, None, 0, 0, 2, n)
    args = ([1] + [0] * n, f, 0, 1, -1, n)
    assert _ckernels.self_recursive(*args) == _pykernels.self_recursive(*args)


def test_use_switches_backend():
    before = kernels.BACKEND
    try:
        kernels.use("python")
        assert kernels.convolve is _pykernels.convolve
        with pytest.raises(ValueError):
            kernels.use("fortran")
    finally:
        kernels.use(before)


def test_environment_forces_python_backend():
    env = dict(os.environ, ILSHARE_KERNEL="python")
    out = subprocess.run([sys.executable, "-c", "from ilshare import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_counts_identical_across_backends():
    from ilshare.counting import count_system
    from ilshare.presets import preset_system
    before = kernels.BACKEND
    tables = {}
    try:
        for name in BACKENDS:
            kernels.use(name)
            tables[name] = count_system(preset_system("box-top"), 120).counts
    finally:
        kernels.use(before)
    first = tables[BACKENDS[0]]
    assert all(t == first for t in tables.values())
