"""Compare the numba and pure-numpy coordinate-descent kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times one full descent (up to 1000 sweeps, from a seeded random start) per
basis on the SQNR-optimal Gaussian input, checks that both paths return
bit-identical results, and reports the Monte Carlo error-power throughput for
reference (that step is a BLAS matrix product with a single implementation).
Both descent paths are called directly, so ``DACOPT_DISABLE_NUMBA`` does not
matter here. Numba compile time is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from dacopt import _kernels
from dacopt.metric import auto_gaussian_pmf
from dacopt.model import SegmentSpec, canonical_mapping, segmented_basis, thermometer_basis
from dacopt.montecarlo import _centered, mismatch_draws
from dacopt.optimize import _tolerance, random_choice
from dacopt.published import published_basis, reference_basis
from dacopt.repset import enumerate_all


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def descent_args(basis, pmf):
    index = enumerate_all(basis)
    choice = random_choice(index, np.random.default_rng(0))
    return (np.array(basis.weights, dtype=np.float64), pmf.probs, index.offsets, index.masks,
            choice, 1000, _tolerance(basis)), index.total


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--realizations", type=int, default=20_000)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable (or DACOPT_DISABLE_NUMBA is set at import); nothing to compare")

    pmf = auto_gaussian_pmf(8)
    cases = [(f"published L={L}", published_basis(L)) for L in (9, 11, 13)]
    cases.append(("reference L=13", reference_basis(13)))

    print(f"{'descent':<18}{'reps':>8}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}  agree")
    for name, basis in cases:
        dargs, total = descent_args(basis, pmf)
        _kernels.descend_numba(*dargs)  # compile
        t_np, out_np = best_of(lambda: _kernels.descend_numpy(*dargs), args.repeat)
        t_nb, out_nb = best_of(lambda: _kernels.descend_numba(*dargs), args.repeat)
        agree = all(np.array_equal(a, b) for a, b in zip(out_np, out_nb))
        print(f"{name:<18}{total:>8}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}  {'bitwise' if agree else 'NO'}")

    spec = SegmentSpec.for_bits(8, 4)
    print(f"\n{'error power':<18}{'switches':>8}{'time [s]':>12}{'per 1e5 [s]':>14}")
    for name, table in (("4T+4B", canonical_mapping(segmented_basis(spec, 8), "segmented", spec)),
                        ("thermometer", canonical_mapping(thermometer_basis(8), "thermometer"))):
        deltas = mismatch_draws(table, 0.05, 0, 0, args.realizations)
        centered = _centered(table, pmf)
        t, _ = best_of(lambda: _kernels.error_power(centered, pmf.probs, deltas), args.repeat)
        print(f"{name:<18}{table.basis.length:>8}{t:>12.4f}{t * 1e5 / args.realizations:>14.3f}")


if __name__ == "__main__":
    main()
