"""Shape-parameter-free radial polynomial bases for interpolation and collocation."""

__version__ = "0.1.0"

from .basis import (  # noqa: E402
    BasisFamily,
    BasisFunction,
    Kernel,
    RadialProfile,
    chebyshev_roots,
    dim_h,
    gaussian_taylor_profile,
    make_family,
    make_monomial_basis,
    make_rbf_family,
    make_regularized_basis,
    make_semicardinal_basis,
)
from .geometry import Box, PointSet, Star, halton, regular_grid, star_points  # noqa: E402
from .interpolation import Interpolant, fit, rmse  # noqa: E402
from .poisson import PoissonProblem, solve_poisson  # noqa: E402

__all__ = [
    "BasisFamily",
    "BasisFunction",
    "Box",
    "Interpolant",
    "Kernel",
    "PointSet",
    "PoissonProblem",
    "RadialProfile",
    "Star",
    "chebyshev_roots",
    "dim_h",
    "fit",
    "gaussian_taylor_profile",
    "halton",
    "make_family",
    "make_monomial_basis",
    "make_rbf_family",
    "make_regularized_basis",
    "make_semicardinal_basis",
    "regular_grid",
    "rmse",
    "solve_poisson",
    "star_points",
]
