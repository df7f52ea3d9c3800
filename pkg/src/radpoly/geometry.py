"""Point sets, domains, distances and normalization radii.

Points are rows of a float64 array of shape ``(N, d)`` with ``d`` in 1..3.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from . import _kernels

BOUNDARY_TOL = 1e-12
STAR_BOUNDARY_SAMPLES = 8192
_HALTON_BASES = (2, 3, 5)


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not 1 <= len(lo) <= 3:
            raise ValueError("Box corners must share a dimension in 1..3")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("Box requires lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, d: int) -> "Box":
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*zip(self.lower, self.upper))), dtype=np.float64)

    def contains(self, pts, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.all((pts >= lo - tol) & (pts <= hi + tol), axis=1)

    def on_boundary(self, pts, tol: float = BOUNDARY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.any((np.abs(pts - lo) <= tol) | (np.abs(pts - hi) <= tol), axis=1)


@dataclass(frozen=True)
class Star:
    """Planar star domain with boundary ``rho(theta) = base + amplitude*cos(lobes*theta)``."""

    center: tuple = (0.0, 0.0)
    base: float = 0.8
    amplitude: float = 0.2
    lobes: int = 5

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if len(self.center) != 2:
            raise ValueError("Star domains are two-dimensional")
        if not (self.base > self.amplitude >= 0):
            raise ValueError("Star requires base > amplitude >= 0")

    @property
    def dim(self) -> int:
        return 2

    def radius(self, theta):
        return self.base + self.amplitude * np.cos(self.lobes * np.asarray(theta))

    def boundary(self, m: int, offset: float = 0.0) -> np.ndarray:
        theta = offset + 2 * np.pi * np.arange(m) / m
        rho = self.radius(theta)
        return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)]) + np.array(self.center)

    def _polar(self, pts):
        rel = np.atleast_2d(pts) - np.array(self.center)
        return np.hypot(rel[:, 0], rel[:, 1]), np.arctan2(rel[:, 1], rel[:, 0])

    def contains(self, pts, tol: float = BOUNDARY_TOL) -> np.ndarray:
        r, th = self._polar(pts)
        return r <= self.radius(th) + tol

    def on_boundary(self, pts, tol: float = BOUNDARY_TOL) -> np.ndarray:
        r, th = self._polar(pts)
        return np.abs(r - self.radius(th)) <= tol


Domain = Union[Box, Star]


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    boundary_mask: np.ndarray
    domain: Domain = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        mask = np.array(self.boundary_mask, dtype=bool).reshape(-1)
        if pts.shape[0] != mask.shape[0]:
            raise ValueError("boundary_mask length must match the number of points")
        if pts.shape[1] != self.domain.dim:
            raise ValueError("point dimension does not match the domain")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "boundary_mask", mask)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_boundary(self) -> int:
        return int(self.boundary_mask.sum())

    @property
    def interior(self) -> np.ndarray:
        return self.points[~self.boundary_mask]

    @property
    def boundary(self) -> np.ndarray:
        return self.points[self.boundary_mask]

    def to_csv(self, path) -> None:
        write_points_csv(self, path)


def _as_points(x) -> np.ndarray:
    if isinstance(x, PointSet):
        return x.points
    arr = np.asarray(x, dtype=np.float64)
    return arr[:, None] if arr.ndim == 1 else arr


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def regular_grid(m_per_side: int, domain: Box) -> PointSet:
    """Tensor grid of ``m_per_side**d`` equally spaced points including the faces.

    Points are ordered lexicographically with the first coordinate slowest.
    """
    if m_per_side < 2:
        raise ValueError("regular_grid needs at least 2 points per side")
    axes = [np.linspace(lo, hi, m_per_side) for lo, hi in zip(domain.lower, domain.upper)]
    pts = np.array(list(itertools.product(*axes)), dtype=np.float64)
    idx = np.array(list(itertools.product(range(m_per_side), repeat=domain.dim)))
    mask = np.any((idx == 0) | (idx == m_per_side - 1), axis=1)
    return PointSet(pts, mask, domain)


def radical_inverse(k: int, base: int) -> float:
    f, r = 1.0, 0.0
    while k > 0:
        f /= base
        k, digit = divmod(k, base)
        r += digit * f
    return r


def halton(N: int, d: int, skip: int = 0) -> np.ndarray:
    """First ``N`` Halton points in ``[0, 1]**d`` (bases 2, 3, 5), index starting at ``skip + 1``."""
    if not 1 <= d <= 3:
        raise ValueError("halton supports d in 1..3")
    if N < 0 or skip < 0:
        raise ValueError("N and skip must be nonnegative")
    out = np.empty((N, d))
    for j, base in enumerate(_HALTON_BASES[:d]):
        for i in range(N):
            out[i, j] = radical_inverse(i + 1 + skip, base)
    return out


def box_perimeter_points(n_b: int, box: Box) -> np.ndarray:
    """``n_b`` points equally spaced by arc length along a 2-D box perimeter, starting at the lower corner."""
    if box.dim != 2:
        raise ValueError("perimeter rings are defined for 2-D boxes")
    (x0, y0), (x1, y1) = box.lower, box.upper
    w, h = x1 - x0, y1 - y0
    per = 2 * (w + h)
    out = np.empty((n_b, 2))
    for i in range(n_b):
        t = per * i / n_b
        if t < w:
            out[i] = (x0 + t, y0)
        elif t < w + h:
            out[i] = (x1, y0 + (t - w))
        elif t < 2 * w + h:
            out[i] = (x1 - (t - w - h), y1)
        else:
            out[i] = (x0, y1 - (t - 2 * w - h))
    return out


def grid_boundary_count(N: int, d: int) -> int:
    m = round(N ** (1.0 / d))
    return m**d - max(m - 2, 0) ** d


def halton_points(N: int, domain: Box, skip: int = 0) -> PointSet:
    """Halton stream mapped onto a box. No point lands on the boundary."""
    lo, hi = np.array(domain.lower), np.array(domain.upper)
    pts = lo + (hi - lo) * halton(N, domain.dim, skip)
    return PointSet(pts, domain.on_boundary(pts), domain)


def halton_with_boundary(N: int, domain: Box, n_boundary: int | None = None, skip: int = 0) -> PointSet:
    """Interior Halton points followed by an equally spaced ring on the box boundary.

    ``n_boundary`` defaults to the boundary count of the regular grid with the
    same total ``N`` (80 for ``N = 441``).
    """
    if domain.dim != 2:
        raise ValueError("halton_with_boundary is defined for 2-D boxes")
    if n_boundary is None:
        n_boundary = grid_boundary_count(N, 2)
    if not 0 < n_boundary < N:
        raise ValueError("need at least one boundary and one interior point")
    lo, hi = np.array(domain.lower), np.array(domain.upper)
    inner = lo + (hi - lo) * halton(N - n_boundary, 2, skip)
    ring = box_perimeter_points(n_boundary, domain)
    pts = np.vstack([inner, ring])
    mask = np.r_[np.zeros(N - n_boundary, bool), np.ones(n_boundary, bool)]
    return PointSet(pts, mask, domain)


def star_points(N: int, star: Star | None = None, n_boundary: int | None = None, skip: int = 0) -> PointSet:
    """Scattered points in a star domain: rejection-sampled Halton interior plus a boundary ring.

    With ``n_boundary=None`` the ring has ``4*round(sqrt(N)) - 4`` points
    (none for ``N < 4``); the remaining points come from the Halton stream
    mapped to the bounding square and kept when strictly inside the curve.
    """
    star = Star() if star is None else star
    if N < 1:
        raise ValueError("star_points needs N >= 1")
    if n_boundary is None:
        n_boundary = 4 * round(math.sqrt(N)) - 4 if N >= 4 else 0
    n_inner = N - n_boundary
    if n_inner < 0:
        raise ValueError("n_boundary exceeds N")
    extent = star.base + star.amplitude
    c = np.array(star.center)
    inner = []
    k = skip
    batch = max(64, 2 * n_inner)
    while len(inner) < n_inner:
        cand = c + extent * (2 * halton(batch, 2, k) - 1)
        k += batch
        r, th = star._polar(cand)
        keep = cand[r < star.radius(th) - BOUNDARY_TOL]
        inner.extend(keep[: n_inner - len(inner)])
    inner = np.array(inner, dtype=np.float64).reshape(-1, 2)
    ring = star.boundary(n_boundary) if n_boundary else np.empty((0, 2))
    pts = np.vstack([inner, ring])
    mask = np.r_[np.zeros(n_inner, bool), np.ones(n_boundary, bool)]
    return PointSet(pts, mask, star)


def random_points(M: int, domain: Domain, rng: np.random.Generator) -> np.ndarray:
    """Uniform pseudo-random points inside ``domain`` (rejection sampling for stars)."""
    if isinstance(domain, Box):
        lo, hi = np.array(domain.lower), np.array(domain.upper)
        return lo + (hi - lo) * rng.random((M, domain.dim))
    extent = domain.base + domain.amplitude
    c = np.array(domain.center)
    out = np.empty((0, 2))
    while len(out) < M:
        cand = c + extent * (2 * rng.random((2 * M + 16, 2)) - 1)
        out = np.vstack([out, cand[domain.contains(cand, tol=0.0)]])
    return out[:M]


# ---------------------------------------------------------------------------
# metric helpers
# ---------------------------------------------------------------------------


def distances(centers, x) -> np.ndarray:
    """Euclidean distances from every center to the single point ``x``."""
    c = _as_points(centers)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (c.shape[1],):
        raise ValueError(f"point of dimension {x.size} does not match centers of dimension {c.shape[1]}")
    return np.sqrt(np.sum((c - x) ** 2, axis=1))


def distance_matrix(points, centers) -> np.ndarray:
    return np.sqrt(_kernels.sqdist_matrix(_as_points(points), _as_points(centers)))


def normalization_radii(centers, domain: Domain) -> np.ndarray:
    """``R_i = max over the domain of |x - x_i|``.

    Exact for boxes (farthest corner). For stars the maximum is taken over
    ``STAR_BOUNDARY_SAMPLES`` boundary points.
    """
    c = _as_points(centers)
    if len(c) == 0:
        raise ValueError("normalization_radii needs at least one center")
    far = domain.corners() if isinstance(domain, Box) else domain.boundary(STAR_BOUNDARY_SAMPLES)
    return np.sqrt(_kernels.sqdist_matrix(c, far).max(axis=1))


def write_points_csv(ps: PointSet, path) -> None:
    cols = ["x", "y", "z"][: ps.dim] + ["is_boundary"]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for p, b in zip(ps.points, ps.boundary_mask):
            w.writerow([f"{v:.17g}" for v in p] + [int(b)])
