"""Discrete isothermic nets in R^4 (quaternions) and their transforms.

The package represents quaternions as float64 arrays of shape (..., 4)
in (w, x, y, z) order and nets as quaternion-valued maps over rectangular
lattice windows. Every transform verifies its defining identities
in-process and attaches the residuals to its output.
"""

from . import quat
from ._kernels import backend
from .errors import (
    CmcVerificationError,
    DegenerateNetError,
    DegenerateOrbitError,
    DegenerateQuadrupleError,
    EmptyInitialSphereError,
    GeometryError,
    LatticeConsistencyError,
    NetFormatError,
    NonRealizableDistancesError,
    NotConcircularError,
    NotDarbouxPairError,
    NotIntegrableError,
    NotPeriodicError,
    PoleError,
    SolveDegenerateError,
    SphereFitError,
    UndefinedCurvatureError,
    ZeroQuaternionError,
)
from .crossratio import (
    cr_equal,
    cross_ratio,
    cross_ratio_from_distances,
    identity_orbit,
    is_concircular,
    permutation_value,
    quad_ratio,
)
from .hexa import (
    Hexahedron,
    TrapezoidClass,
    TwoSphere,
    build_hexahedron,
    fit_two_sphere,
    solve_fourth_point,
    solve_vertex,
    supplement_check,
    trapezoid_class,
)
from .lattice import (
    LatticeWindow,
    Net,
    elementary_cross_ratios,
    gen_clifford_torus,
    gen_cylinder,
    gen_planar_grid,
    is_curvature_line_net,
    is_isothermic,
)
from .records import TransformRecord
from .christoffel import (
    ChristoffelParams,
    christoffel,
    closing_residual,
    dual_involution_check,
)
from .darboux import (
    DarbouxParams,
    RibaucourCongruence,
    bianchi_cube,
    bianchi_fourth,
    christoffel_darboux_check,
    darboux,
    darboux_residual,
    dual_difference_residual,
    ribaucour_congruence,
)
from .cmc import (
    CmcPair,
    cmc_bianchi,
    cmc_darboux,
    make_cmc_cylinder,
    verify_cmc,
    vertex_mean_curvature,
)
from .netio import NetDocument, export_obj, load_net, save_net

__version__ = "0.1.0"
