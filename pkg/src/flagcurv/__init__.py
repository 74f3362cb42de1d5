"""Numerical flag-curvature toolkit for invariant Finsler metrics on compact
homogeneous spaces G/H.

The package builds compact matrix Lie algebras with their root-space
decompositions, assembles reductive homogeneous spaces from subalgebra
specifications, constructs reversible invariant Minkowski norms on the
tangent model, and certifies flags of zero flag curvature through the
homogeneous curvature formula for commuting flag pairs.
"""

from .liealg import LieAlgebra, RootDatum, build_lie_algebra, bracket, root_decomposition
from .homspace import (
    HomogeneousSpace,
    SubalgebraSpec,
    InvariantDecomposition,
    build_space,
    centralizer_subalgebra,
    fixed_point_space,
    is_regular_subalgebra,
    isotropy_invariant_decomposition,
    ad_rotation_speeds,
    invariant_blocks,
)
from .minkowski import (
    MinkowskiNorm,
    FundamentalTensor,
    make_norm,
    fundamental_tensor,
    check_norm_properties,
)
from .curvature import (
    FlagCertificate,
    u_tensor,
    flag_curvature,
    zero_conditions_residual,
    alpha_beta_comparison,
)
from .flatfinder import (
    ExampleConstruction,
    construct_example_flat,
    verify_closure_claims,
    extremal_unit_vector,
    generic_flat_search,
)

__all__ = [
    "LieAlgebra",
    "RootDatum",
    "build_lie_algebra",
    "bracket",
    "root_decomposition",
    "HomogeneousSpace",
    "SubalgebraSpec",
    "InvariantDecomposition",
    "build_space",
    "centralizer_subalgebra",
    "fixed_point_space",
    "is_regular_subalgebra",
    "isotropy_invariant_decomposition",
    "ad_rotation_speeds",
    "invariant_blocks",
    "MinkowskiNorm",
    "FundamentalTensor",
    "make_norm",
    "fundamental_tensor",
    "check_norm_properties",
    "FlagCertificate",
    "u_tensor",
    "flag_curvature",
    "zero_conditions_residual",
    "alpha_beta_comparison",
    "ExampleConstruction",
    "construct_example_flat",
    "verify_closure_claims",
    "extremal_unit_vector",
    "generic_flat_search",
]

__version__ = "0.1.0"
