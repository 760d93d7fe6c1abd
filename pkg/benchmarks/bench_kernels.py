"""Time the hot kernels on every available backend.

Usage::

    python3 benchmarks/bench_kernels.py [--trials 2000] [--repeats 5]

Each kernel runs ``repeats`` times per backend on identical inputs; the
table reports the median wall time and the speedup of the compiled
extension over the numpy reference.  Outputs are also cross-checked for
equality, so a run doubles as a coarse parity test.
"""

import argparse
import statistics
import time

import numpy as np

from toruscover._kernels import available_backends, get_backend


def _time(fn, repeats):
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def build_cases(trials):
    radii = (0.5 * np.arange(1, 2001, dtype=np.float64) ** -2.0) / 2.0
    prefix = np.zeros(1 << 14, dtype=np.int64)
    prefix[4000:9000] = 1
    prefix = np.concatenate(([0], np.cumsum(prefix)))
    rng_lo = np.arange(0, 4096, 8, dtype=np.int64)
    rng_hi = rng_lo + 37
    return [
        ("uniform_matrix",
         lambda k: k.uniform_matrix(42, 0, trials, 0, 512)),
        ("cover_miss_flags",
         lambda k: k.cover_miss_flags(42, 0, trials, 300, 0.01)),
        ("first_hit_point",
         lambda k: k.first_hit_point(42, 0, trials, 0, radii, 0.5)),
        ("first_hit_ranges",
         lambda k: k.first_hit_ranges(42, 0, trials, 0, radii, 14, prefix)),
        ("count_in_cube",
         lambda k: k.count_in_cube(42, 0, trials, 0, 1000, 6, 11)),
        ("raster_union",
         lambda k: k.raster_union(rng_lo, rng_hi, 4096)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if len(backends) == 1:
        print("compiled extension not built; timing the reference alone")

    header = f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for name, call in build_cases(args.trials):
        medians = {}
        outputs = {}
        for b in backends:
            kern = get_backend(b)
            medians[b], outputs[b] = _time(lambda: call(kern), args.repeats)
        row = f"{name:<18}" + "".join(
            f"{medians[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{medians['python'] / medians['compiled']:>9.1f}x"
            if not np.array_equal(outputs["python"], outputs["compiled"]):
                print(row)
                print(f"!! backend outputs differ on {name}")
                return 1
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
