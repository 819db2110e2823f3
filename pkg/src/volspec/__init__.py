"""Linear Volterra difference systems of convolution type: simulation,
transform-side analysis, and spectral classification of solutions."""

from ._backend import BACKEND, HAVE_NUMBA
from .aap import (
    AAPDecomposition,
    C0Result,
    aap_decompose,
    bohr_coefficient,
    c0_test,
    detect_frequencies,
    kt_difference_test,
)
from .model import (
    ConstantForcing,
    DecayingForcing,
    FiniteKernel,
    GeometricKernel,
    HarmonicForcing,
    PoleError,
    TabulatedForcing,
    TabulatedKernel,
    VolterraSystem,
    ZeroForcing,
    contraction_check,
)
from .scenario import Scenario, ScenarioError, Tolerances
from .seqspec import (
    QuotientNormEstimate,
    RayLimitEstimate,
    ResolventTail,
    SpectrumEstimate,
    abel_test,
    check_inclusion,
    estimate_spectrum,
    estimate_z_spectrum,
    quotient_norm,
    resolvent_S,
)
from .solver import (
    OperatorTrajectory,
    SolverOverflow,
    Trajectory,
    apply_V,
    representation_check,
    resolvent,
    solve,
    solve_fast,
)
from .spectral import (
    ClassificationReport,
    SingularPoint,
    SingularSet,
    classify,
    delta,
    find_sigma,
    scan_circle,
)
from .ztransform import (
    CheckResult,
    ZValue,
    convolution_rule_check,
    initial_value_check,
    shift_rule_check,
    zt_kernel,
    zt_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "AAPDecomposition",
    "C0Result",
    "aap_decompose",
    "bohr_coefficient",
    "c0_test",
    "detect_frequencies",
    "kt_difference_test",
    "ConstantForcing",
    "DecayingForcing",
    "FiniteKernel",
    "GeometricKernel",
    "HarmonicForcing",
    "PoleError",
    "TabulatedForcing",
    "TabulatedKernel",
    "VolterraSystem",
    "ZeroForcing",
    "contraction_check",
    "Scenario",
    "ScenarioError",
    "Tolerances",
    "QuotientNormEstimate",
    "RayLimitEstimate",
    "ResolventTail",
    "SpectrumEstimate",
    "abel_test",
    "check_inclusion",
    "estimate_spectrum",
    "estimate_z_spectrum",
    "quotient_norm",
    "resolvent_S",
    "OperatorTrajectory",
    "SolverOverflow",
    "Trajectory",
    "apply_V",
    "representation_check",
    "resolvent",
    "solve",
    "solve_fast",
    "ClassificationReport",
    "SingularPoint",
    "SingularSet",
    "classify",
    "delta",
    "find_sigma",
    "scan_circle",
    "CheckResult",
    "ZValue",
    "convolution_rule_check",
    "initial_value_check",
    "shift_rule_check",
    "zt_kernel",
    "zt_sequence",
    "__version__",
]
