"""Transfer operators, weighted path measures, and inverse-branch sampling
on subshifts of finite type."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateH,
    DepthDowngrade,
    DepthTooShallow,
    FilterMismatch,
    InadmissibleWord,
    MassCollapse,
    MonotonicityViolation,
    NegativeWeight,
    NoConvergence,
    NonBinaryEntry,
    NotFixedPoint,
    NotSubNormalized,
    ShiftPathError,
    ZeroColumn,
    ZeroMassConditioning,
)
from .extremality import (
    Decomposition,
    ErgodicityReport,
    conditional_expectation,
    decompose,
    relative_ergodicity_dimension,
)
from .invariant import (
    MarkovMeasure,
    NonUniqueFixedVector,
    cylinder_mass,
    markov_measure_for_weight,
    strongly_invariant_measure,
    verify_strong_invariance,
)
from .measures import (
    AveragingResult,
    DensityMeasure,
    RawMeasure,
    averaging_fixed_point,
    check_fixed_point,
    fixed_density_measure,
    masses_along_orbit,
    transform_measure,
)
from .pathspace import (
    EmpiricalReport,
    MartingaleCoordinates,
    PathMeasure,
    PathSample,
    SampleBatch,
    build_path_measure,
    check_consistency,
    check_isometry,
    check_quasi_invariance,
    empirical_check,
    martingale_coordinates,
    project_once,
    sample_path,
    sample_paths,
)
from .subshift import (
    CylinderFunction,
    Subshift,
    admissible_words,
    build_subshift,
    compose_with_shift,
    preimage_symbols,
    promote_depth,
    weight_product,
    word_string,
)
from .transfer import (
    FixedFunctionResult,
    TransferMatrix,
    apply_transfer,
    check_weight_pushforward,
    iterate_fixed_function,
    left_fixed_functional,
    product_weight,
    transfer_matrix,
)

__all__ = [
    "AveragingResult",
    "ConfigError",
    "CylinderFunction",
    "Decomposition",
    "DegenerateH",
    "DensityMeasure",
    "DepthDowngrade",
    "DepthTooShallow",
    "EmpiricalReport",
    "ErgodicityReport",
    "FilterMismatch",
    "FixedFunctionResult",
    "InadmissibleWord",
    "MarkovMeasure",
    "MartingaleCoordinates",
    "MassCollapse",
    "MonotonicityViolation",
    "NegativeWeight",
    "NoConvergence",
    "NonBinaryEntry",
    "NonUniqueFixedVector",
    "NotFixedPoint",
    "NotSubNormalized",
    "PathMeasure",
    "PathSample",
    "RawMeasure",
    "SampleBatch",
    "ShiftPathError",
    "Subshift",
    "TransferMatrix",
    "ZeroColumn",
    "ZeroMassConditioning",
    "admissible_words",
    "apply_transfer",
    "averaging_fixed_point",
    "build_path_measure",
    "build_subshift",
    "check_consistency",
    "check_fixed_point",
    "check_isometry",
    "check_quasi_invariance",
    "check_weight_pushforward",
    "compose_with_shift",
    "conditional_expectation",
    "cylinder_mass",
    "decompose",
    "empirical_check",
    "fixed_density_measure",
    "iterate_fixed_function",
    "left_fixed_functional",
    "markov_measure_for_weight",
    "martingale_coordinates",
    "masses_along_orbit",
    "preimage_symbols",
    "product_weight",
    "project_once",
    "promote_depth",
    "relative_ergodicity_dimension",
    "sample_path",
    "sample_paths",
    "strongly_invariant_measure",
    "transfer_matrix",
    "transform_measure",
    "verify_strong_invariance",
    "weight_product",
    "word_string",
]
