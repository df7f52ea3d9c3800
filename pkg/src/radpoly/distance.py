"""L2 distance from a translated smooth kernel to ``H_n`` or ``P_m``.

The best approximation is computed as a weighted discrete least-squares
problem on a tensor Gauss-Legendre grid, solved by orthogonal factorization;
this is equivalent to the continuous Gram system but does not square the
condition number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .basis import KERNELS, BasisFunction, Kernel, dim_h, dim_p, make_monomial_basis, make_semicardinal_basis
from .geometry import Box, PointSet, random_points
from .linalg import LSTSQ_TOL, cond2, lstsq_qr, numerical_rank, tensor_rule
from .report import ExperimentReport

DEFAULT_QUAD_ORDER = 60
TABLE_DOMAIN = Box((-1.0, -1.0), (1.0, 1.0))


@dataclass(frozen=True)
class HnSpace:
    """``H_n`` spanned by generators at a tensor Chebyshev layout plus ``extra`` random centers.

    ``generator`` is ``"semicardinal"`` (normalized ``p_{i,2}``) or
    ``"monomial"`` (raw ``r_i**(2n)``); both span the same space.
    """

    n: int
    generator: str = "semicardinal"
    extra: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("HnSpace needs n >= 1")
        if self.generator not in ("semicardinal", "monomial"):
            raise ValueError("generator must be 'semicardinal' or 'monomial'")

    def dim(self, d: int) -> int:
        return dim_h(self.n, d)

    def min_quad_order(self) -> int:
        return 2 * self.n + 2

    @property
    def label(self) -> str:
        return "H_n"


@dataclass(frozen=True)
class PmSpace:
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("PmSpace needs m >= 0")

    def dim(self, d: int) -> int:
        return dim_p(self.m, d)

    def min_quad_order(self) -> int:
        return self.m + 2


FunctionSpace = Union[HnSpace, PmSpace]


@dataclass
class DistanceResult:
    distance: float
    normalized_distance: float
    coefficients: np.ndarray
    quad_order: int
    cond: float
    rank: int
    expected_rank: int

    @property
    def rank_collapsed(self) -> bool:
        return self.rank < self.expected_rank


def chebyshev_layout(count_per_axis: int, domain: Box) -> np.ndarray:
    k = np.arange(1, count_per_axis + 1)
    t = np.cos((2 * k - 1) * np.pi / (2 * count_per_axis))
    axes = [0.5 * (lo + hi) + 0.5 * (hi - lo) * t for lo, hi in zip(domain.lower, domain.upper)]
    return np.array(list(itertools.product(*axes)))


def generator_centers(space: HnSpace, domain: Box) -> np.ndarray:
    h = space.dim(domain.dim)
    per_axis = math.ceil(h ** (1.0 / domain.dim) - 1e-9)
    base = chebyshev_layout(per_axis, domain)
    rng = np.random.default_rng(space.seed)
    extra = random_points(math.ceil(space.extra * h), domain, rng)
    return np.vstack([base, extra])


def space_matrix(space: FunctionSpace, domain: Box, nodes: np.ndarray) -> np.ndarray:
    """Columns spanning ``space`` evaluated at ``nodes``."""
    if isinstance(space, PmSpace):
        lo, hi = np.array(domain.lower), np.array(domain.upper)
        z = (2 * nodes - lo - hi) / (hi - lo)
        d = domain.dim
        exps = [a for a in itertools.product(range(space.m + 1), repeat=d) if sum(a) <= space.m]
        exps.sort(key=lambda a: (sum(a), a))
        return np.column_stack([np.prod(z ** np.array(a), axis=1) for a in exps])
    c = generator_centers(space, domain)
    ps = PointSet(c, np.zeros(len(c), bool), domain)
    if space.generator == "monomial":
        fam = make_monomial_basis(ps, space.n, radii=1.0)
    else:
        fam = make_semicardinal_basis(ps, space.n, 2)
    return fam.matrix(nodes)


def _target_values(phi0, nodes) -> np.ndarray:
    if isinstance(phi0, BasisFunction):
        return phi0(nodes)
    return np.asarray(phi0(nodes), dtype=np.float64)


def distance_to_space(
    phi0: Union[BasisFunction, Callable],
    space: FunctionSpace,
    domain: Box = TABLE_DOMAIN,
    quad_order: int = DEFAULT_QUAD_ORDER,
    lstsq_tol: float = LSTSQ_TOL,
) -> DistanceResult:
    """``min over p in space of ||phi0 - p||_{L2(domain)}``.

    ``normalized_distance`` divides by ``sqrt(|domain|)``.
    """
    if quad_order < space.min_quad_order():
        raise ValueError(
            f"quad_order={quad_order} is too small for {space}: need at least {space.min_quad_order()}"
        )
    nodes, w = tensor_rule(domain.lower, domain.upper, quad_order)
    sw = np.sqrt(w)
    A = space_matrix(space, domain, nodes) * sw[:, None]
    b = _target_values(phi0, nodes) * sw
    x, _ = lstsq_qr(A, b, rel_tol=lstsq_tol)
    dist = float(np.linalg.norm(A @ x - b))
    return DistanceResult(
        distance=dist,
        normalized_distance=dist / math.sqrt(domain.volume),
        coefficients=x,
        quad_order=quad_order,
        cond=cond2(A),
        rank=numerical_rank(A),
        expected_rank=space.dim(domain.dim),
    )


TABLE_HEADER = ["rbf", "space", "n", "distance", "cond", "quad_order"]


def table_cells(n: int):
    return [("H_n", HnSpace(n)), ("P_2n-1", PmSpace(2 * n - 1)), ("P_2n", PmSpace(2 * n))]


def table2(
    kinds=("GA", "IMQ", "MQ", "IQ"),
    ns=range(2, 8),
    eps: float = 0.5,
    domain: Box = TABLE_DOMAIN,
    quad_order: int = DEFAULT_QUAD_ORDER,
    center=(0.0, 0.0),
) -> ExperimentReport:
    """Distances of each kernel to ``H_n``, ``P_{2n-1}``, ``P_{2n}``; one CSV row per cell.

    ``provenance['rank_collapse']`` lists the cells whose design matrix lost rank.
    """
    for k in kinds:
        if k not in KERNELS:
            raise ValueError(f"unknown kernel {k!r}")
    ns = list(ns)
    need = max(2 * n + 2 for n in ns)
    if quad_order < need:
        raise ValueError(f"quad_order={quad_order} is too small for n={max(ns)}: need at least {need}")
    rep = ExperimentReport(list(TABLE_HEADER))
    collapsed = []
    for kind in kinds:
        phi0 = BasisFunction(center, 1.0, Kernel(kind, eps))
        for label, _ in table_cells(ns[0]):
            for n in ns:
                space = dict(table_cells(n))[label]
                res = distance_to_space(phi0, space, domain, quad_order)
                if res.rank_collapsed:
                    collapsed.append(f"{kind}/{label}/n={n}")
                rep.add(kind, label, n, res.distance, res.cond, quad_order)
    rep.provenance["rank_collapse"] = collapsed
    return rep
