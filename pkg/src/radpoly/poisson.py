"""Global collocation for the Dirichlet Poisson problem ``Laplacian u = f``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import BasisFamily
from .geometry import Domain, PointSet
from .interpolation import Interpolant, rmse, solve_system
from .linalg import LSTSQ_TOL, cond2, relative_residual

Field = Callable[[np.ndarray], np.ndarray]


class IllPosedProblemError(ValueError):
    pass


@dataclass(frozen=True)
class PoissonProblem:
    """``f`` and ``g`` map an ``(M, d)`` array of points to ``M`` values."""

    domain: Domain
    f: Field
    g: Field
    centers: PointSet
    exact: Optional[Field] = None

    def __post_init__(self):
        nb = self.centers.n_boundary
        if nb == 0:
            raise IllPosedProblemError("no boundary collocation points")
        if nb == len(self.centers):
            raise IllPosedProblemError("no interior collocation points")


def sine_problem(centers: PointSet) -> PoissonProblem:
    """Manufactured solution ``u = sin(x + y)`` with ``f = -2 sin(x + y)``."""
    u = lambda p: np.sin(p[:, 0] + p[:, 1])
    return PoissonProblem(centers.domain, lambda p: -2.0 * u(p), u, centers, exact=u)


def assemble_poisson(p: PoissonProblem, family: BasisFamily):
    """Return ``(C, b)``: Laplacian rows at interior centers, value rows on the boundary."""
    if len(family) != len(p.centers):
        raise ValueError("family size must equal the number of collocation points")
    pts = p.centers.points
    bnd = p.centers.boundary_mask
    C = np.empty((len(pts), len(family)))
    C[bnd] = family.matrix(pts[bnd])
    C[~bnd] = family.laplacian_matrix(pts[~bnd])
    b = np.empty(len(pts))
    b[bnd] = p.g(pts[bnd])
    b[~bnd] = p.f(pts[~bnd])
    return C, b


def solve_poisson(p: PoissonProblem, family: BasisFamily, *, compute_cond: bool = True, lstsq_tol: float = LSTSQ_TOL) -> Interpolant:
    """Collocation solve; with ``p.exact`` set, ``diagnostics['rmse']`` holds the RMSE at the centers."""
    C, b = assemble_poisson(p, family)
    x, method, rank = solve_system(C, b, lstsq_tol=lstsq_tol)
    u = Interpolant(
        family,
        x,
        cond=cond2(C) if compute_cond else float("nan"),
        residual=relative_residual(C, x, b),
        method=method,
        diagnostics={"rank": rank},
    )
    if p.exact is not None:
        pts = p.centers.points
        u.diagnostics["rmse"] = rmse(p.exact(pts), u(pts))
    return u
