"""specmult: a desk-scale numerical laboratory for joint spectral multipliers."""

from .core import (
    GrowthProfile,
    OperatorRep,
    ProductGrid,
    SpectralDomainError,
    SpectralSystem,
    Symbol,
    WeightedGrid,
    apply_multiplier,
    imaginary_powers,
    lp_operator_norm,
    multiplier_operator,
    product_grid,
    semigroup,
    tensor_lift,
)
from .bases import (
    HermiteBasis,
    JacobiBasis,
    LaguerreBasis,
    build_system,
    mehler_derivative,
    mehler_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "GrowthProfile",
    "OperatorRep",
    "ProductGrid",
    "SpectralDomainError",
    "SpectralSystem",
    "Symbol",
    "WeightedGrid",
    "apply_multiplier",
    "imaginary_powers",
    "lp_operator_norm",
    "multiplier_operator",
    "product_grid",
    "semigroup",
    "tensor_lift",
    "HermiteBasis",
    "JacobiBasis",
    "LaguerreBasis",
    "build_system",
    "mehler_derivative",
    "mehler_kernel",
    "__version__",
]
