"""Assembly benchmark: numba kernels vs the numpy fallback.

Times the four hot kernels on the matrices the experiments actually build
(q_2 value and Laplacian matrices at N centers, N evaluation points) and
checks that both paths agree.  Run with

    python3 benchmarks/bench_assembly.py [--sizes 441 1331 2500] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from radpoly import _kernels
from radpoly.basis import degree_for_size, make_regularized_basis
from radpoly.geometry import Box, halton_points


def inputs(N: int):
    ps = halton_points(N, Box.unit(2))
    fam = make_regularized_basis(ps, degree_for_size(N, 2))
    roots, nroots = fam._factored
    coeffs, degrees = fam._packed
    pts = np.ascontiguousarray(ps.points)
    s = _kernels.sqdist_matrix_numpy(pts, fam.centers) / fam.radii[None, :] ** 2
    return {
        "sqdist": ((pts, np.ascontiguousarray(fam.centers)), {}),
        "horner": ((s, coeffs, degrees), {}),
        "product": ((s, roots, nroots), {}),
        "product_laplacian": ((s, roots, nroots, 2), {}),
    }


def best_of(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[441, 1331, 2500])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    if not _kernels._NUMBA_IMPORTED:
        print("numba is not importable; nothing to compare")
        return 1
    print(f"threading layer request: {_kernels.numba.config.THREADING_LAYER}")
    print(f"{'kernel':<18} {'N':>6} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max rel diff':>13}")
    for N in args.sizes:
        for name, (a, _) in inputs(N).items():
            f_np = getattr(_kernels, f"{name}_matrix_numpy")
            f_nb = getattr(_kernels, f"{name}_matrix_numba")
            ref, got = f_np(*a), f_nb(*a)  # first numba call compiles (or loads the cache)
            diff = float(np.abs(got - ref).max() / max(np.abs(ref).max(), 1e-300))
            t_np = best_of(f_np, a, args.repeat)
            t_nb = best_of(f_nb, a, args.repeat)
            print(f"{name:<18} {N:>6} {1e3 * t_np:>11.2f} {1e3 * t_nb:>11.2f} {t_np / t_nb:>7.1f}x {diff:>13.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
