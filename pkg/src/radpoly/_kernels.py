"""Hot assembly kernels.

Every collocation, interpolation and Gram matrix in the package is built from
the pairwise squared-distance matrix and a per-column evaluation of radial
profiles, either as a factored product ``prod_k (s - root_k)`` (all basis
families of the package factor this way) or by Horner's rule on expanded
coefficients.  Each kernel exists twice, as a row-parallel numba ``@njit``
loop and as a plain numpy broadcast.  The numba path
is used when numba imports cleanly and ``RADPOLY_DISABLE_NUMBA`` is unset or
``0``; otherwise everything runs through numpy.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import prange

    _NUMBA_IMPORTED = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # omp is thread-safe for sweeps run from a thread pool; workqueue is the fallback
        try:
            from numba.np.ufunc import omppool  # noqa: F401

            numba.config.THREADING_LAYER = "omp"
        except ImportError:
            numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    prange = range
    _NUMBA_IMPORTED = False


def _env_disabled() -> bool:
    return os.environ.get("RADPOLY_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = _NUMBA_IMPORTED and not _env_disabled()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference path
# ---------------------------------------------------------------------------


def sqdist_matrix_numpy(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def horner_matrix_numpy(s: np.ndarray, coeffs: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    # coeffs[j, m] is the s**m coefficient of column j; rows beyond degrees[j] are zero
    out = np.zeros_like(s)
    for m in range(coeffs.shape[1] - 1, -1, -1):
        out *= s
        out += coeffs[:, m][None, :]
    return out


def product_matrix_numpy(s: np.ndarray, roots: np.ndarray, nroots: np.ndarray) -> np.ndarray:
    # column j is prod_{k < nroots[j]} (s - roots[j, k])
    out = np.ones_like(s)
    for k in range(roots.shape[1]):
        active = k < nroots
        out[:, active] *= s[:, active] - roots[active, k][None, :]
    return out


def product_laplacian_matrix_numpy(s: np.ndarray, roots: np.ndarray, nroots: np.ndarray, d: int) -> np.ndarray:
    # returns 2d P'(s) + 4 s P''(s); first and second derivatives carried through the product
    p = np.ones_like(s)
    p1 = np.zeros_like(s)
    p2 = np.zeros_like(s)
    for k in range(roots.shape[1]):
        active = k < nroots
        f = s[:, active] - roots[active, k][None, :]
        pa, p1a, p2a = p[:, active], p1[:, active], p2[:, active]
        p2[:, active] = p2a * f + 2 * p1a
        p1[:, active] = p1a * f + pa
        p[:, active] = pa * f
    return 2 * d * p1 + 4 * s * p2


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if _NUMBA_IMPORTED:

    @numba.njit(parallel=True, cache=True)
    def sqdist_matrix_numba(points, centers):
        m, d = points.shape
        k = centers.shape[0]
        out = np.empty((m, k))
        for i in prange(m):
            for j in range(k):
                acc = 0.0
                for c in range(d):
                    t = points[i, c] - centers[j, c]
                    acc += t * t
                out[i, j] = acc
        return out

    @numba.njit(parallel=True, cache=True)
    def horner_matrix_numba(s, coeffs, degrees):
        m, k = s.shape
        out = np.empty((m, k))
        for i in prange(m):
            for j in range(k):
                x = s[i, j]
                acc = 0.0
                for p in range(degrees[j], -1, -1):
                    acc = acc * x + coeffs[j, p]
                out[i, j] = acc
        return out

    @numba.njit(parallel=True, cache=True)
    def product_matrix_numba(s, roots, nroots):
        m, k = s.shape
        out = np.empty((m, k))
        for i in prange(m):
            for j in range(k):
                x = s[i, j]
                acc = 1.0
                for p in range(nroots[j]):
                    acc *= x - roots[j, p]
                out[i, j] = acc
        return out

    @numba.njit(parallel=True, cache=True)
    def product_laplacian_matrix_numba(s, roots, nroots, d):
        m, k = s.shape
        out = np.empty((m, k))
        for i in prange(m):
            for j in range(k):
                x = s[i, j]
                p0 = 1.0
                p1 = 0.0
                p2 = 0.0
                for q in range(nroots[j]):
                    f = x - roots[j, q]
                    p2 = p2 * f + 2.0 * p1
                    p1 = p1 * f + p0
                    p0 = p0 * f
                out[i, j] = 2.0 * d * p1 + 4.0 * x * p2
        return out

else:  # pragma: no cover
    sqdist_matrix_numba = sqdist_matrix_numpy
    horner_matrix_numba = horner_matrix_numpy
    product_matrix_numba = product_matrix_numpy
    product_laplacian_matrix_numba = product_laplacian_matrix_numpy


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def sqdist_matrix(points, centers) -> np.ndarray:
    """Squared Euclidean distances, ``out[i, j] = |points[i] - centers[j]|**2``."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if points.ndim != 2 or centers.ndim != 2 or points.shape[1] != centers.shape[1]:
        raise ValueError(f"dimension mismatch: points {points.shape} vs centers {centers.shape}")
    if USE_NUMBA:
        return sqdist_matrix_numba(points, centers)
    return sqdist_matrix_numpy(points, centers)


def horner_matrix(s, coeffs, degrees) -> np.ndarray:
    """Evaluate column ``j``'s polynomial (ascending ``coeffs[j]``) at ``s[:, j]``."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    degrees = np.ascontiguousarray(degrees, dtype=np.int64)
    if s.shape[1] != coeffs.shape[0]:
        raise ValueError("one coefficient row per column of s is required")
    if USE_NUMBA:
        return horner_matrix_numba(s, coeffs, degrees)
    return horner_matrix_numpy(s, coeffs, degrees)


def product_matrix(s, roots, nroots) -> np.ndarray:
    """Evaluate column ``j``'s factored profile ``prod_k (s - roots[j, k])`` at ``s[:, j]``."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    roots = np.ascontiguousarray(roots, dtype=np.float64)
    nroots = np.ascontiguousarray(nroots, dtype=np.int64)
    if s.shape[1] != roots.shape[0]:
        raise ValueError("one root row per column of s is required")
    if USE_NUMBA:
        return product_matrix_numba(s, roots, nroots)
    return product_matrix_numpy(s, roots, nroots)


def product_laplacian_matrix(s, roots, nroots, d: int) -> np.ndarray:
    """``2d P'(s) + 4 s P''(s)`` for factored profiles; divide by ``R**2`` for the Laplacian."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    roots = np.ascontiguousarray(roots, dtype=np.float64)
    nroots = np.ascontiguousarray(nroots, dtype=np.int64)
    if s.shape[1] != roots.shape[0]:
        raise ValueError("one root row per column of s is required")
    if USE_NUMBA:
        return product_laplacian_matrix_numba(s, roots, nroots, int(d))
    return product_laplacian_matrix_numpy(s, roots, nroots, int(d))
