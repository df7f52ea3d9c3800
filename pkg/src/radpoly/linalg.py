"""Dense solvers, conditioning and Gauss-Legendre quadrature.

Matrices are plain float64 ``numpy`` arrays; factorizations go through
LAPACK via ``scipy.linalg``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

RANK_TOL = 1e-10
# truncation level for rank-deficient least squares, a few dozen ulps of sigma_max
LSTSQ_TOL = 1e-14
TINY_SIGMA = 1e-300


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when LU with partial pivoting meets a zero (or numerically zero) pivot."""


def _check_square(A, b):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ValueError("right-hand side length does not match the matrix")
    return A, b


def relative_residual(A, x, b) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(A @ x - b)
    return float(r / nb) if nb > 0 else float(r)


def solve_dense(A, b, rcond_min: float = 0.0):
    """Solve ``A x = b`` by LU with partial pivoting.

    Returns ``(x, relres)`` with ``relres = |Ax - b| / |b|``.  Raises
    :class:`SingularMatrixError` on a zero pivot, or when the LAPACK
    reciprocal condition estimate falls below ``rcond_min``.
    """
    A, b = _check_square(A, b)
    lu, piv, info = sla.lapack.dgetrf(A)
    if info > 0:
        raise SingularMatrixError(f"zero pivot at step {info - 1}")
    if rcond_min > 0:
        anorm = np.linalg.norm(A, 1)
        rcond, _ = sla.lapack.dgecon(lu, anorm, norm="1")
        if rcond < rcond_min:
            raise SingularMatrixError(f"reciprocal condition estimate {rcond:.3e} below {rcond_min:.3e}")
    x = sla.lu_solve((lu, piv), b, check_finite=False)
    return x, relative_residual(A, x, b)


def lstsq_qr(A, b, rel_tol: float = LSTSQ_TOL):
    """Least-squares minimizer of ``|Ax - b|`` via column-pivoted QR.

    Returns ``(x, rank)``.  When the pivoted R reveals rank below
    ``rel_tol * |R[0, 0]|`` the minimum-norm solution truncated at
    ``rel_tol * sigma_max`` is returned instead.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, k = A.shape
    if m < k:
        raise ValueError("lstsq_qr needs at least as many rows as columns")
    if b.shape[0] != m:
        raise ValueError("right-hand side length does not match the matrix")
    Q, R, perm = sla.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > rel_tol * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank == k:
        y = sla.solve_triangular(R, Q.T @ b)
        x = np.empty_like(y)
        x[perm] = y
        return x, rank
    x, _, svd_rank, _ = sla.lstsq(A, b, cond=rel_tol, lapack_driver="gelsd")
    return x, int(svd_rank)


def singular_values(A) -> np.ndarray:
    return sla.svdvals(np.asarray(A, dtype=np.float64))


def cond2(A) -> float:
    """Spectral condition number ``sigma_max / sigma_min`` (``inf`` when ``sigma_min < 1e-300``)."""
    s = singular_values(A)
    if s.size == 0:
        raise ValueError("cond2 of an empty matrix")
    if s[-1] < TINY_SIGMA:
        return float("inf")
    return float(s[0] / s[-1])


def numerical_rank(A, rel_tol: float = RANK_TOL) -> int:
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    s = singular_values(A)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s >= rel_tol * s[0]))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.nodes.size

    def scaled(self, lo: float, hi: float) -> "QuadratureRule":
        half = 0.5 * (hi - lo)
        return QuadratureRule(lo + half * (self.nodes + 1), half * self.weights)


def gauss_legendre(m: int) -> QuadratureRule:
    """``m``-point Gauss-Legendre rule on ``[-1, 1]``, exact through degree ``2m - 1``."""
    if not 1 <= m <= 200:
        raise ValueError("gauss_legendre supports 1 <= m <= 200")
    x, w = leggauss(m)
    return QuadratureRule(x, w)


def tensor_rule(lower, upper, m: int):
    """Tensor Gauss-Legendre nodes ``(m**d, d)`` and weights on the box ``[lower, upper]``."""
    base = gauss_legendre(m)
    rules = [base.scaled(lo, hi) for lo, hi in zip(lower, upper)]
    nodes = np.array(list(itertools.product(*[r.nodes for r in rules])))
    weights = np.array([np.prod(w) for w in itertools.product(*[r.weights for r in rules])])
    return nodes, weights
