"""Time the rotation-number kernels on both backends.

Usage::

    python3 benchmarks/bench_kernels.py [--iters 200000] [--batch 100] [--repeat 3]

Runs the batched Moebius lift accumulator and the piecewise-linear lift
accumulator under every available backend (numba when importable, always
the numpy fallback) and prints a small table.  The two backends must
agree numerically; the benchmark asserts that before reporting timings.
"""

import argparse
import math
import time

import numpy as np

from rotforce import _kernels
from rotforce.circledyn import PiecewiseLinear, denjoy_blowup
from rotforce.moebius import HPoint, rotation_about


def _sample_matrices(batch: int, seed: int) -> list[tuple[float, float, float, float]]:
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(batch):
        m = rotation_about(
            HPoint(float(rng.uniform(-2, 2)), float(math.exp(rng.uniform(-1, 1)))),
            float(rng.uniform(0.02, 0.98)),
        )
        mats.append(m.entries())
    return mats


def _sample_pl(depth: int) -> PiecewiseLinear:
    theta = (math.sqrt(5.0) - 1.0) / 2.0
    gen = rotation_about(HPoint(0.0, 1.0), theta)
    return denjoy_blowup([gen], 0.1, depth=depth)[0]


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=200_000)
    ap.add_argument("--batch", type=int, default=100)
    ap.add_argument("--pl-depth", type=int, default=120)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    mats = _sample_matrices(args.batch, args.seed)
    pl = _sample_pl(args.pl_depth)
    xs = np.asarray(pl.xs, dtype=np.float64)
    ys = np.asarray(pl.ys, dtype=np.float64)

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"moebius batch={args.batch} iters={args.iters}; pl breakpoints={len(xs)}")

    results: dict[str, dict[str, float]] = {}
    reference: dict[str, np.ndarray] = {}
    original = _kernels.backend()
    try:
        for name in backends:
            _kernels.set_backend(name)
            # warm up so numba's compile time is not billed to the timing
            _kernels.moebius_lift_totals(mats[:2], 10)
            _kernels.pl_lift_total(xs, ys, 10)
            moeb = _kernels.moebius_lift_totals(mats, args.iters)
            plv = _kernels.pl_lift_total(xs, ys, args.iters)
            if reference:
                assert np.allclose(moeb, reference["moebius"], atol=1e-6)
                assert abs(plv - reference["pl"]) < 1e-6
            else:
                reference = {"moebius": moeb, "pl": np.float64(plv)}
            results[name] = {
                "moebius": _time(
                    lambda: _kernels.moebius_lift_totals(mats, args.iters), args.repeat
                ),
                "pl": _time(lambda: _kernels.pl_lift_total(xs, ys, args.iters), args.repeat),
            }
    finally:
        _kernels.set_backend(original)

    header = f"{'backend':<10} {'moebius (s)':>12} {'pl (s)':>10}"
    print(header)
    print("-" * len(header))
    for name, row in results.items():
        print(f"{name:<10} {row['moebius']:>12.3f} {row['pl']:>10.3f}")
    if len(results) == 2:
        a, b = (results[n] for n in backends)
        print(
            f"speedup ({backends[0]} vs {backends[1]}): "
            f"moebius {b['moebius'] / a['moebius']:.1f}x, pl {b['pl'] / a['pl']:.1f}x"
        )


if __name__ == "__main__":
    main()
