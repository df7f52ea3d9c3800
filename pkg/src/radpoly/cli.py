"""Command line: ``radpoly {table2,interp,pde,cond,gram,points} [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance threshold violated under ``--check``.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .experiments import POINT_KINDS, POLY_FAMILIES, RUNNERS, ConfigError, ExperimentConfig, check_report
from .linalg import SingularMatrixError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4


def _families(text: str) -> tuple:
    return tuple(f.strip() for f in text.split(",") if f.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="spatial dimension (default: 2, or 3 for cube)")
    common.add_argument("--points", choices=POINT_KINDS, default="grid")
    common.add_argument("--N", type=int, default=441, help="number of centers")
    common.add_argument("--n", type=int, default=None, help="degree parameter (default: largest n with h(n) <= N)")
    common.add_argument("--family", type=_families, default=POLY_FAMILIES, help="comma-separated polynomial families")
    common.add_argument("--kernel", default="GA", help="kernel swept over eps (GA, MQ, IMQ, IQ)")
    common.add_argument("--eps-min", type=float, default=1e-2)
    common.add_argument("--eps-max", type=float, default=1e2)
    common.add_argument("--eps-count", type=int, default=30)
    common.add_argument("--quad-order", type=int, default=60, help="Gauss-Legendre points per axis (table2)")
    common.add_argument("--n-max", type=int, default=15, help="largest n for the cond sweep")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweep cells")
    common.add_argument("--harmonic", action="store_true", help="pde: use a linear harmonic solution instead of sin(x+y)")
    common.add_argument("--pde-points", action="store_true", help="points: emit the Halton-type PDE set with boundary ring")
    common.add_argument("--out", default=None, help="CSV output file (default: stdout)")
    common.add_argument("--check", action="store_true", help="exit 4 unless the acceptance thresholds hold")

    parser = argparse.ArgumentParser(prog="radpoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "table2": "distances from smooth kernels to H_n, P_2n-1 and P_2n",
        "interp": "interpolation RMSE per family and shape parameter",
        "pde": "Poisson collocation RMSE per family and shape parameter",
        "cond": "condition numbers of the 1-D collocation matrix versus n",
        "gram": "Gram matrices Phi^T Phi for p and p_2",
        "points": "export a center set",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig(
            experiment=args.command,
            points=args.points,
            N=args.N,
            n=args.n,
            dim=args.dim,
            families=args.family,
            kernel=args.kernel,
            eps_min=args.eps_min,
            eps_max=args.eps_max,
            eps_count=args.eps_count,
            seed=args.seed,
            quad_order=args.quad_order,
            n_max=args.n_max,
            jobs=args.jobs,
            harmonic=args.harmonic,
            out=args.out,
        )
        if args.command == "points":
            rep = RUNNERS["points"](cfg, for_pde=args.pde_points)
        else:
            rep = RUNNERS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"radpoly: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularMatrixError, np.linalg.LinAlgError) as exc:
        print(f"radpoly: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = rep.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "table2" and rep.provenance.get("rank_collapse"):
        print(f"radpoly: rank collapse in {rep.provenance['rank_collapse']}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.check:
        fails = check_report(cfg, rep)
        for f in fails:
            print(f"CHECK FAIL {f}", file=sys.stderr)
        if fails:
            return EXIT_CHECK
        print("CHECK OK", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
