"""Time the pure-Python and GMP kernels on the workloads the counting engine runs.

    python3 benchmarks/bench_kernels.py --horizons 250 500 1000 2000
"""
import argparse
import time

from ilshare import kernels
from ilshare.counting import count_system, count_total
from ilshare.presets import preset_system


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def workloads(horizon):
    f = count_total((0, 2, 1), horizon)
    unit = [1] + [0] * horizon
    return {
        # N ::= ⊥ | A→N over the minimal alphabet
        "self_recursive": lambda: kernels.self_recursive(unit, f, 0, 1, -1, horizon),
        "convolve": lambda: kernels.convolve(f, f, horizon),
        "count_system(minimal)": lambda: count_system(preset_system("minimal"), horizon),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizons", type=int, nargs="+", default=[250, 500, 1000])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-system", action="store_true",
                        help="leave out the full count_system run")
    args = parser.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if len(backends) < 2:
        print("compiled kernels not built; only the python backend is available")
    print(f"{'workload':24} {'N':>5} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    original = kernels.BACKEND
    try:
        for horizon in args.horizons:
            for label in workloads(horizon):
                if args.skip_system and label.startswith("count_system"):
                    continue
                times = {}
                for b in backends:
                    kernels.use(b)
                    times[b] = best_of(args.repeat, workloads(horizon)[label])
                speed = times["python"] / times["cython"] if "cython" in times else 1.0
                cells = " ".join(f"{times[b]:>9.3f}s" for b in backends)
                print(f"{label:24} {horizon:>5} {cells}   {speed:6.1f}x")
    finally:
        kernels.use(original)


if __name__ == "__main__":
    main()
