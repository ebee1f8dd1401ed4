"""Sharp Poincare/Wirtinger constants for the p-Laplacian on convex domains.

The package verifies, numerically and at desk scale, the chain of facts
behind the diameter bound mu_p >= (pi_p/d)^p for the first nontrivial Neumann
eigenvalue on convex sets (p >= 2):

* ``ptrig``       the constant pi_p and the generalized sine;
* ``pwl``         exact rearrangement calculus for piecewise-linear functions
                  and the drift-energy inequality it sharpens;
* ``wirtinger1d`` weighted 1D eigenvalue solvers for log-concave weights;
* ``geom``        convex slicing into thin zero-moment pieces;
* ``eig2d``       2D Rayleigh-quotient minimization and the bound checks;
* ``expr``        a small expression language for planar test fields;
* ``cli``         every verification as a subcommand.

Hot kernels run from a compiled extension when available; set
PPOINCARE_PURE=1 to force the pure-Python fallback.
"""

from ._backend import BACKEND
from .errors import (
    BracketError,
    DepthError,
    DomainError,
    MeshError,
    SplitError,
    ToleranceError,
)
from .ptrig import PExponent, pi_p, pi_p_quad, sharp_constant_1d, sin_p
from .pwl import (
    DistributionFunction,
    PiecewiseLinear,
    Prop21Report,
    Remark21Record,
    TwoSlopeGap,
    derivative_energy,
    distribution,
    drift_energy,
    general_drift_energy,
    lp_norm_p,
    rearrange,
    remark21_counterexample,
    remark21_function,
    two_slope_gap,
    verify_prop21,
)
from .wirtinger1d import (
    EigenResult1D,
    GapRecord,
    SampledFunction,
    Weight1D,
    dirichlet_first,
    dirichlet_quotient,
    exp_identity_check,
    fold_to_dirichlet,
    neumann_dirichlet_gap,
    neumann_first_nontrivial,
    rayleigh_min_1d,
)
from .geom import (
    ConvexPolygon,
    ScalarField,
    SlicePiece,
    SplitLine,
    area,
    balance_shift,
    chord_length,
    clip,
    decompose,
    diameter,
    min_width,
    p_moment,
    section_profile,
    split_once,
    support_extent,
)
from .eig2d import (
    BoundReport,
    EigenResult2D,
    TriMesh,
    check_bound,
    mesh,
    rayleigh_min_2d,
    thin_reduction_check,
    thin_slab_sharpness,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # errors
    "BracketError",
    "DepthError",
    "DomainError",
    "MeshError",
    "SplitError",
    "ToleranceError",
    # ptrig
    "PExponent",
    "pi_p",
    "pi_p_quad",
    "sin_p",
    "sharp_constant_1d",
    # pwl
    "PiecewiseLinear",
    "DistributionFunction",
    "Prop21Report",
    "Remark21Record",
    "TwoSlopeGap",
    "lp_norm_p",
    "derivative_energy",
    "distribution",
    "rearrange",
    "drift_energy",
    "general_drift_energy",
    "two_slope_gap",
    "verify_prop21",
    "remark21_function",
    "remark21_counterexample",
    # wirtinger1d
    "Weight1D",
    "SampledFunction",
    "EigenResult1D",
    "GapRecord",
    "neumann_first_nontrivial",
    "dirichlet_first",
    "rayleigh_min_1d",
    "neumann_dirichlet_gap",
    "fold_to_dirichlet",
    "dirichlet_quotient",
    "exp_identity_check",
    # geom
    "ConvexPolygon",
    "SplitLine",
    "SlicePiece",
    "ScalarField",
    "clip",
    "area",
    "diameter",
    "min_width",
    "support_extent",
    "chord_length",
    "p_moment",
    "balance_shift",
    "split_once",
    "decompose",
    "section_profile",
    # eig2d
    "TriMesh",
    "EigenResult2D",
    "BoundReport",
    "mesh",
    "rayleigh_min_2d",
    "check_bound",
    "thin_slab_sharpness",
    "thin_reduction_check",
]
