"""Radial polynomial and smooth-kernel basis families.

Every polynomial basis function is stored as a profile ``P(s)`` in the
normalized squared distance ``s = (|x - c| / R)**2``: expanded coefficients
always, plus the factored form ``prod_k (s - root_k)`` when the profile was
built from roots.  Factored profiles are evaluated as products (the expanded
form of high-degree Chebyshev products loses several digits to cancellation),
the rest by Horner's rule.  Smooth kernels
(GA, MQ, IMQ, IQ) use the raw distance.

For any radial function ``psi(x) = g(|x - c|**2)`` the Laplacian in ``d``
dimensions is ``2*d*g'(t) + 4*t*g''(t)`` with ``t = |x - c|**2``, which has no
singularity at the center; both polynomial and kernel Laplacians use this.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels
from .geometry import PointSet, _as_points, normalization_radii

KERNELS = ("GA", "MQ", "IMQ", "IQ")


# ---------------------------------------------------------------------------
# dimension of H_n
# ---------------------------------------------------------------------------


def dim_p(m: int, d: int) -> int:
    """Dimension of the polynomials of total degree <= m in d variables."""
    return math.comb(m + d, d) if m >= 0 else 0


def dim_h(n: int, d: int) -> int:
    """Dimension of ``H_n``: ``2*sum_{i<n} C(i+d-1, i) + C(n+d-1, n)``."""
    if n < 0 or d < 1:
        raise ValueError("dim_h needs n >= 0 and d >= 1")
    return 2 * sum(math.comb(i + d - 1, i) for i in range(n)) + math.comb(n + d - 1, n)


def dim_h_closed(n: int, d: int) -> int:
    if d == 1:
        return 2 * n + 1
    if d == 2:
        return (n + 1) ** 2
    if d == 3:
        return (n + 1) * (n + 2) * (2 * n + 3) // 6
    raise ValueError("closed forms exist for d in 1..3")


def degree_for_size(N: int, d: int) -> int:
    """Largest ``n`` with ``dim_h(n, d) <= N``."""
    if N < 1:
        raise ValueError("N must be positive")
    n = 0
    while dim_h(n + 1, d) <= N:
        n += 1
    return n


def chebyshev_roots(n: int) -> np.ndarray:
    """Positive roots ``cos((2k-1)*pi/(4n+2))``, k = 1..n, of ``T_{2n+1}``; decreasing."""
    if n < 1:
        raise ValueError("chebyshev_roots needs n >= 1")
    k = np.arange(1, n + 1)
    return np.cos((2 * k - 1) * np.pi / (4 * n + 2))


# ---------------------------------------------------------------------------
# profiles and kernels
# ---------------------------------------------------------------------------


class RadialProfile:
    """Polynomial ``sum_m coeffs[m] * s**m`` in ``s = rho**2``.

    Profiles built by :meth:`from_roots` or :meth:`monomial` also keep their
    factored form ``prod_k (s - roots[k])``, which is what gets evaluated;
    the expanded coefficients remain the canonical representation for
    arithmetic and Laplacians.  Arithmetic results are unfactored.
    """

    __slots__ = ("coeffs", "roots")

    def __init__(self, coeffs: Sequence[float], roots=None):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.float64)).copy()
        if c.size == 0:
            c = np.zeros(1)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0.0
        c.flags.writeable = False
        self.coeffs = c
        if roots is not None:
            roots = np.atleast_1d(np.asarray(roots, dtype=np.float64)).copy()
            roots.flags.writeable = False
        self.roots = roots

    @classmethod
    def monomial(cls, n: int) -> "RadialProfile":
        c = np.zeros(n + 1)
        c[n] = 1.0
        return cls(c, roots=np.zeros(n))

    @classmethod
    def from_roots(cls, roots_in_s) -> "RadialProfile":
        """Monic ``prod_k (s - roots_in_s[k])``."""
        roots_in_s = np.atleast_1d(np.asarray(roots_in_s, dtype=np.float64))
        if roots_in_s.size == 0:
            return cls([1.0], roots=roots_in_s)
        return cls(npoly.polyfromroots(roots_in_s), roots=roots_in_s)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def factored(self) -> bool:
        return self.roots is not None

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.factored:
            return np.prod(s[..., None] - self.roots, axis=-1)
        return npoly.polyval(s, self.coeffs)

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        return RadialProfile(npoly.polyadd(self.coeffs, other.coeffs))

    def __mul__(self, scalar: float) -> "RadialProfile":
        return RadialProfile(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, RadialProfile) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"RadialProfile({self.coeffs.tolist()})"

    def laplacian(self, d: int, R: float = 1.0) -> "RadialProfile":
        """Profile ``L`` with ``Laplacian[P(|x|^2/R^2)] = L(|x|^2/R^2)`` in ``d`` dimensions."""
        m = np.arange(1, self.coeffs.size)
        if m.size == 0:
            return RadialProfile([0.0])
        return RadialProfile(self.coeffs[1:] * 2 * m * (2 * m + d - 2) / R**2)

    def laplacian_values(self, s, d: int, R: float = 1.0) -> np.ndarray:
        """Laplacian of ``P(|x|^2/R^2)`` at normalized squared distances ``s``."""
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        if not self.factored:
            return self.laplacian(d, R)(s)
        col = _kernels.product_laplacian_matrix_numpy(
            s.reshape(-1, 1), self.roots.reshape(1, -1), np.array([self.roots.size]), d
        )
        return col[:, 0] / R**2


@dataclass(frozen=True)
class Kernel:
    kind: str
    eps: float

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ValueError(f"unknown kernel {self.kind!r}; expected one of {KERNELS}")
        if not self.eps > 0:
            raise ValueError("shape parameter must be positive")

    def g(self, t):
        """Kernel as a function of the squared distance ``t``."""
        q = self.eps**2 * np.asarray(t, dtype=np.float64)
        if self.kind == "GA":
            return np.exp(-q)
        if self.kind == "MQ":
            return np.sqrt(1 + q)
        if self.kind == "IMQ":
            return 1 / np.sqrt(1 + q)
        return 1 / (1 + q)

    def laplacian_t(self, t, d: int):
        t = np.asarray(t, dtype=np.float64)
        e2 = self.eps**2
        u = 1 + e2 * t
        if self.kind == "GA":
            g = np.exp(-e2 * t)
            g1, g2 = -e2 * g, e2 * e2 * g
        elif self.kind == "MQ":
            g1 = 0.5 * e2 / np.sqrt(u)
            g2 = -0.25 * e2 * e2 * u**-1.5
        elif self.kind == "IMQ":
            g1 = -0.5 * e2 * u**-1.5
            g2 = 0.75 * e2 * e2 * u**-2.5
        else:
            g1 = -e2 / u**2
            g2 = 2 * e2 * e2 / u**3
        return 2 * d * g1 + 4 * t * g2


Shape = Union[RadialProfile, Kernel]


@dataclass(frozen=True)
class BasisFunction:
    center: np.ndarray
    R: float
    shape: Shape

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=np.float64)).copy()
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        if isinstance(self.shape, Kernel):
            object.__setattr__(self, "R", 1.0)
        if not self.R > 0:
            raise ValueError("normalization radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def _t(self, x) -> np.ndarray:
        # 1-D arrays are a list of scalars in d=1 and a single point otherwise
        pts = np.asarray(x, dtype=np.float64)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim == 1 else pts.reshape(1, -1)
        if pts.shape[1] != self.dim:
            raise ValueError(f"point dimension {pts.shape[1]} does not match basis dimension {self.dim}")
        return np.sum((pts - self.center) ** 2, axis=1)

    def __call__(self, x) -> np.ndarray:
        t = self._t(x)
        if isinstance(self.shape, Kernel):
            return self.shape.g(t)
        return self.shape(t / self.R**2)

    def laplacian(self, x) -> np.ndarray:
        t = self._t(x)
        if isinstance(self.shape, Kernel):
            return self.shape.laplacian_t(t, self.dim)
        return self.shape.laplacian_values(t / self.R**2, self.dim, self.R)


def evaluate_basis(b: BasisFunction, x) -> np.ndarray:
    """Values of one basis function at a point or an ``(M, d)`` array of points."""
    return b(x)


def laplacian(b: BasisFunction, x) -> np.ndarray:
    """Exact Laplacian of one basis function at a point or array of points."""
    return b.laplacian(x)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisFamily:
    functions: tuple
    tag: str
    n: int
    d: int
    tau: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.functions:
            raise ValueError("a basis family needs at least one function")
        if any(f.dim != self.d for f in self.functions):
            raise ValueError("all functions must share the family dimension")
        is_kernel = [isinstance(f.shape, Kernel) for f in self.functions]
        if self.tag == "rbf":
            if not all(is_kernel):
                raise ValueError("rbf families hold kernel functions only")
        elif any(is_kernel):
            raise ValueError(f"{self.tag} families hold polynomial profiles only")

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, i) -> BasisFunction:
        return self.functions[i]

    @property
    def is_kernel(self) -> bool:
        return self.tag == "rbf"

    @property
    def label(self) -> str:
        if self.tag == "p":
            return "p"
        if self.tag == "p_tau":
            return f"p_{self.tau:g}"
        if self.tag == "q_monomial":
            return "q"
        if self.tag == "q_chebyshev":
            return "q_2"
        k = self.functions[0].shape
        return k.kind

    @cached_property
    def centers(self) -> np.ndarray:
        return np.array([f.center for f in self.functions])

    @cached_property
    def radii(self) -> np.ndarray:
        return np.array([f.R for f in self.functions])

    @cached_property
    def _factored(self):
        profiles = [f.shape for f in self.functions]
        if not all(p.factored for p in profiles):
            return None
        width = max(1, max(p.roots.size for p in profiles))
        roots = np.zeros((len(profiles), width))
        for j, p in enumerate(profiles):
            roots[j, : p.roots.size] = p.roots
        return roots, np.array([p.roots.size for p in profiles], dtype=np.int64)

    @cached_property
    def _packed(self):
        profiles = [f.shape for f in self.functions]
        width = max(p.coeffs.size for p in profiles)
        coeffs = np.zeros((len(profiles), width))
        for j, p in enumerate(profiles):
            coeffs[j, : p.coeffs.size] = p.coeffs
        degrees = np.array([p.degree for p in profiles], dtype=np.int64)
        return coeffs, degrees

    @cached_property
    def _packed_laplacian(self):
        coeffs, degrees = self._packed
        m = np.arange(1, coeffs.shape[1])
        if m.size == 0:
            return np.zeros((coeffs.shape[0], 1)), np.zeros(coeffs.shape[0], dtype=np.int64)
        lap = coeffs[:, 1:] * (2 * m * (2 * m + self.d - 2))[None, :]
        return lap, np.maximum(degrees - 1, 0)

    def _kernel_groups(self):
        # kernels may in principle differ per function; group by (kind, eps)
        groups: dict = {}
        for j, f in enumerate(self.functions):
            groups.setdefault((f.shape.kind, f.shape.eps), []).append(j)
        return groups

    def matrix(self, points) -> np.ndarray:
        """``M[i, j]`` = function ``j`` evaluated at point ``i``."""
        pts = _as_points(points)
        t = _kernels.sqdist_matrix(pts, self.centers)
        if self.is_kernel:
            out = np.empty_like(t)
            for (kind, eps), cols in self._kernel_groups().items():
                out[:, cols] = Kernel(kind, eps).g(t[:, cols])
            return out
        s = t / self.radii[None, :] ** 2
        if self._factored is not None:
            return _kernels.product_matrix(s, *self._factored)
        return _kernels.horner_matrix(s, *self._packed)

    def laplacian_matrix(self, points) -> np.ndarray:
        """``L[i, j]`` = Laplacian of function ``j`` at point ``i``."""
        pts = _as_points(points)
        t = _kernels.sqdist_matrix(pts, self.centers)
        if self.is_kernel:
            out = np.empty_like(t)
            for (kind, eps), cols in self._kernel_groups().items():
                out[:, cols] = Kernel(kind, eps).laplacian_t(t[:, cols], self.d)
            return out
        r2 = self.radii[None, :] ** 2
        if self._factored is not None:
            return _kernels.product_laplacian_matrix(t / r2, *self._factored, self.d) / r2
        return _kernels.horner_matrix(t / r2, *self._packed_laplacian) / r2

    def to_csv(self, path) -> None:
        """Write one row per function: center coordinates, R, then profile coefficients."""
        write_profiles_csv(self, path)


def _center_array_and_radii(centers, radii):
    pts = _as_points(centers)
    if radii is None:
        if not isinstance(centers, PointSet):
            raise ValueError("pass a PointSet (with its domain) or explicit radii")
        R = normalization_radii(centers, centers.domain)
    else:
        R = np.broadcast_to(np.asarray(radii, dtype=np.float64), (len(pts),))
    return pts, R


def make_monomial_basis(centers, n: int, radii=None) -> BasisFamily:
    """Family ``p_i = rho_i**(2n)``. ``radii=1.0`` gives the unnormalized ``r_i**(2n)``."""
    pts, R = _center_array_and_radii(centers, radii)
    prof = RadialProfile.monomial(n)
    return BasisFamily([BasisFunction(c, r, prof) for c, r in zip(pts, R)], "p", n, pts.shape[1])


def semicardinal_profile(n: int, tau: float) -> RadialProfile:
    return RadialProfile.from_roots(chebyshev_roots(n) ** tau)


def make_semicardinal_basis(centers, n: int, tau: float = 2, radii=None) -> BasisFamily:
    """Family ``p_{i,tau} = prod_k (rho_i**2 - t_k**tau)`` with Chebyshev roots ``t_k``."""
    if n < 1:
        raise ValueError("semi-cardinal bases need n >= 1")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    pts, R = _center_array_and_radii(centers, radii)
    prof = semicardinal_profile(n, tau)
    return BasisFamily([BasisFunction(c, r, prof) for c, r in zip(pts, R)], "p_tau", n, pts.shape[1], tau=float(tau))


def regularized_degrees(N: int, n: int, d: int) -> np.ndarray:
    """Block index ``j`` of each of ``N`` functions: ``h(j-1) < i <= h(j)``, the rest repeat block ``n``."""
    if N < dim_h(n, d):
        raise ValueError(f"regularized basis needs N >= h({n}) = {dim_h(n, d)} centers in d={d}, got {N}")
    out = np.full(N, n, dtype=np.int64)
    lo = 0
    for j in range(n + 1):
        hi = dim_h(j, d)
        out[lo:hi] = j
        lo = hi
    return out


def make_regularized_basis(centers, n: int, kind: str = "chebyshev", radii=None) -> BasisFamily:
    """Block family with degrees 0, 2, ..., 2n in ``r``, blocks assigned in center order."""
    if kind not in ("chebyshev", "monomial"):
        raise ValueError("kind must be 'chebyshev' or 'monomial'")
    pts, R = _center_array_and_radii(centers, radii)
    d = pts.shape[1]
    blocks = regularized_degrees(len(pts), n, d)
    if kind == "chebyshev":
        profs = [RadialProfile.from_roots([])] + [semicardinal_profile(j, 2) for j in range(1, n + 1)]
    else:
        profs = [RadialProfile.monomial(j) for j in range(n + 1)]
    funcs = [BasisFunction(c, r, profs[j]) for c, r, j in zip(pts, R, blocks)]
    return BasisFamily(funcs, f"q_{kind}", n, d)


def make_rbf_family(centers, kind: str, eps: float) -> BasisFamily:
    pts = _as_points(centers)
    k = Kernel(kind, float(eps))
    return BasisFamily([BasisFunction(c, 1.0, k) for c in pts], "rbf", 0, pts.shape[1])


def make_family(label: str, centers, n: int, eps: float | None = None, radii=None) -> BasisFamily:
    """Build a family from its short label: ``p``, ``p_0``, ``p_1``, ``p_2``, ``q``, ``q_2`` or a kernel name."""
    if label == "p":
        return make_monomial_basis(centers, n, radii)
    if label.startswith("p_"):
        return make_semicardinal_basis(centers, n, float(label[2:]), radii)
    if label == "q":
        return make_regularized_basis(centers, n, "monomial", radii)
    if label == "q_2":
        return make_regularized_basis(centers, n, "chebyshev", radii)
    if label in KERNELS:
        if eps is None:
            raise ValueError(f"{label} needs a shape parameter")
        return make_rbf_family(centers, label, eps)
    raise ValueError(f"unknown family label {label!r}")


def gaussian_taylor_profile(n: int, eps: float, R: float = 1.0) -> RadialProfile:
    """Maclaurin truncation of ``exp(-eps**2 r**2)`` to degree ``2n``, written in ``s = (r/R)**2``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    k = np.arange(n + 1)
    fact = np.array([math.factorial(int(i)) for i in k], dtype=np.float64)
    return RadialProfile((-1.0) ** k * (eps * R) ** (2 * k) / fact)


def write_profiles_csv(family: BasisFamily, path) -> None:
    d = family.d
    width = max((f.shape.coeffs.size for f in family if isinstance(f.shape, RadialProfile)), default=0)
    header = ["x", "y", "z"][:d] + ["R"] + [f"a{m}" for m in range(width)]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for f in family:
            coeffs = list(f.shape.coeffs) if isinstance(f.shape, RadialProfile) else []
            coeffs += [0.0] * (width - len(coeffs))
            w.writerow([f"{v:.17g}" for v in [*f.center, f.R, *coeffs]])
