"""gspear: G-norms, G-numerical ranges and spear-operator diagnostics."""

from .errors import (
    DegenerateSeminormError,
    DimensionMismatchError,
    GspearError,
    NotNormalizedError,
    UnsupportedSpaceError,
    ValidationError,
)
from .spaces import (
    SpaceSpec,
    dual_norm_eval,
    dual_sphere_sample,
    euclidean,
    lp_space,
    norm_eval,
    norming_vector,
    polyhedral_space,
    polytope_facets,
    polytope_vertices,
    sphere_sample,
    support_functional_of,
    support_functionals,
)
from .operators import (
    AttainmentSet,
    NormResult,
    OperatorSpec,
    SolverBudget,
    SvdResult,
    WitnessPair,
    attainment_sample,
    attainment_set,
    compose,
    identity,
    is_partial_isometry,
    jacobi_svd,
    matrix_units,
    normalize,
    op_norm,
    random_operators,
    svd_decompose,
)
from .gnorm import DeltaProfile, delta_profile, g_norm, g_norm_chain_check, is_norm_probe
from .gridsearch import gnorm_grid, nu_grid
from .numrange import (
    RangeSample,
    classical_numerical_radius,
    nu_g,
    s_range_sample,
    v_range_sample,
)
from .spear import (
    Omega,
    SpearReport,
    is_surjective_isometry,
    relative_spear_check,
    spear_check,
    spear_lhs_gnorm,
    spear_lhs_opnorm,
    theorem_equiv_check,
    transport,
)
from .indices import IndexEstimate, estimate_index, index_chain_check, invariance_check
from .geometry import (
    ComparisonModulus,
    MaximizerSet,
    RankOneFunctional,
    dual_membership,
    gnorm_dominance_check,
    is_smooth,
    maximizing_functionals,
    sample_dual_atoms,
)
from .hilbert import HilbertAnalysis, hilbert_analyze, partial_isometry_verdict
from .problems import ProblemFile, load_problem, problem_from_dict

__version__ = "0.1.0"
