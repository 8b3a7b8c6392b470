"""Exact-arithmetic laboratory for difference-quotient sets of piecewise
functions: interval sets with rational measure, rigorous enclosures,
recursive staircase constructions, and certificate-producing pipelines."""

from .enclosure import Enclosure, cos_pi, pi_enclosure, sin_pi, tan_of
from .errors import (
    AmbiguousDerivativeError,
    CannotSampleError,
    DensityTooLowError,
    DiagonalError,
    DomainError,
    DqlabError,
    MalformedIntervalError,
    PairDegenerateError,
    PreconditionError,
    SchemaError,
    SearchFailureError,
    SplitRequiredError,
    ThetaTooLargeError,
    UndefinedDensityError,
)
from .intervals import (
    DensityProfile,
    Interval,
    IntervalSet,
    complement_in,
    density,
    density_profile,
    difference,
    fat_cantor,
    intersect,
    minus_points,
    normalize,
    rat,
    rat_str,
    sample_points,
    union,
)
from .piecewise import (
    CurveShape,
    Piece,
    PiecewiseFn,
    PropertyFlags,
    affine_conjugate,
    classify_properties,
    deriv,
    dq,
    evaluate,
    image_measure_bounds,
    is_c1,
    preimage,
    slope_bounds,
    value_and_deriv,
)
from .staircase import (
    GapConvention,
    StaircaseLedger,
    build_ledger,
    build_template,
    choose_h,
    default_v,
    deriv_g_bound,
    eval_g,
    level_set_check,
    refine,
)
from .analysis import (
    DQCertificate,
    DQSample,
    Witness,
    dense_sequence,
    dq_cloud,
    dq_interior,
    find_admissible_pair,
    luzin_bound,
    no_interval_image,
    porcupine_check,
    rotation_scan,
    verify_positive_image,
    verify_witness,
)

__version__ = "0.1.0"
