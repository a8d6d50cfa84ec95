"""Discrete averaging Radon operators along polynomial orbits, their
oscillation/variation/jump seminorms, and the circle-method Fourier tools
used to study them numerically."""

from .arith import (
    DenominatorSet,
    IWFamily,
    PropertyViolation,
    RationalFraction,
    build_p_leq,
    build_sigma,
    gauss_decay_fit,
    gauss_sum,
)
from .averages import (
    PaddingError,
    RadonKernel,
    SampledFamily,
    TimeGrid,
    apply,
    apply_direct,
    apply_fast,
    average_family,
    build_kernel,
)
from .fourier import (
    Multiplier,
    QuadratureError,
    approximation_error,
    decay_check_phi,
    exponential_sum_m,
    multiplier_apply,
    oscillatory_integral_phi,
)
from .grid import GridFunction
from .harness import (
    ConstantEstimate,
    ExperimentConfig,
    bootstrap_interpolation_check,
    estimate_constant,
    minor_arc_decay,
    seminorm_inequality_suite,
    stabilization_report,
    uniformity_sweep,
)
from .lattice import (
    BALL,
    CUBE,
    CanonicalMapping,
    ConvexBody,
    PolynomialMap,
    canonical_gamma_set,
    canonical_lift,
    dilate,
    enumerate_lattice_points,
    evaluate_map,
)
from .projections import BumpProfile, ProjectionParams, Projections, bump_eta, projection_xi
from .seminorms import (
    ScalarSequence,
    SeminormFieldResult,
    SeminormKind,
    jump_bruteforce,
    jump_count,
    long_short_split,
    oscillation,
    rademacher_menshov_check,
    seminorm_field,
    sup_seminorm,
    variation,
    variation_bruteforce,
)

__version__ = "0.1.0"
