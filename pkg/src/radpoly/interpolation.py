"""Scattered-data interpolation over any basis family."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisFamily
from .geometry import _as_points
from .linalg import LSTSQ_TOL, SingularMatrixError, cond2, lstsq_qr, relative_residual, solve_dense

# LU is trusted only while the reciprocal condition estimate stays above this
NEAR_SINGULAR_RCOND = np.finfo(np.float64).eps


@dataclass
class Interpolant:
    family: BasisFamily
    coeffs: np.ndarray
    cond: float = float("nan")
    residual: float = float("nan")
    method: str = "lu"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (len(self.family),):
            raise ValueError("one coefficient per basis function is required")

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)

    def __add__(self, other: "Interpolant") -> "Interpolant":
        if other.family is not self.family:
            raise ValueError("interpolants can only be added over the same family")
        return Interpolant(self.family, self.coeffs + other.coeffs, method="sum")


def assemble(family: BasisFamily, nodes) -> np.ndarray:
    """Collocation matrix, ``Phi[i, j]`` = function ``j`` at node ``i``."""
    pts = _as_points(nodes)
    if pts.shape[1] != family.d:
        raise ValueError(f"nodes of dimension {pts.shape[1]} for a family of dimension {family.d}")
    if len(pts) < len(family):
        raise ValueError("need at least as many nodes as basis functions")
    return family.matrix(pts)


def solve_system(A, b, rcond_min: float = NEAR_SINGULAR_RCOND, lstsq_tol: float = LSTSQ_TOL):
    """Square systems by LU, falling back to minimum-norm least squares when near singular.

    Returns ``(x, method, rank)``; rank is ``None`` for the LU path.
    """
    if A.shape[0] == A.shape[1]:
        try:
            x, _ = solve_dense(A, b, rcond_min=rcond_min)
            return x, "lu", None
        except SingularMatrixError:
            pass
    x, rank = lstsq_qr(A, b, rel_tol=lstsq_tol)
    return x, "lstsq", rank


def fit(family: BasisFamily, nodes, values, *, compute_cond: bool = True, lstsq_tol: float = LSTSQ_TOL) -> Interpolant:
    """Solve ``Phi lambda = values`` for the expansion coefficients."""
    Phi = assemble(family, nodes)
    b = np.asarray(values, dtype=np.float64)
    if b.shape != (Phi.shape[0],):
        raise ValueError("one value per node is required")
    x, method, rank = solve_system(Phi, b, lstsq_tol=lstsq_tol)
    return Interpolant(
        family,
        x,
        cond=cond2(Phi) if compute_cond else float("nan"),
        residual=relative_residual(Phi, x, b),
        method=method,
        diagnostics={"rank": rank},
    )


def evaluate(u: Interpolant, points) -> np.ndarray:
    pts = _as_points(points)
    if pts.shape[1] != u.family.d:
        raise ValueError("evaluation points do not match the interpolant dimension")
    return u.family.matrix(pts) @ u.coeffs


def rmse(exact, approx) -> float:
    exact = np.asarray(exact, dtype=np.float64).ravel()
    approx = np.asarray(approx, dtype=np.float64).ravel()
    if exact.shape != approx.shape:
        raise ValueError("rmse needs equal-length inputs")
    if exact.size == 0:
        raise ValueError("rmse of an empty sample")
    return float(np.sqrt(np.mean((exact - approx) ** 2)))


def gram(family: BasisFamily, nodes) -> np.ndarray:
    """``A = Phi^T Phi`` over the given nodes."""
    Phi = family.matrix(_as_points(nodes))
    return Phi.T @ Phi


def cosine_similarity(A) -> np.ndarray:
    """Normalize a Gram matrix to ``A[i, j] / sqrt(A[i, i] A[j, j])``."""
    dg = np.sqrt(np.diag(A))
    return A / np.outer(dg, dg)
