"""Numerics for the first-order Cayley quantum equation on geometric lattices.

The package builds exact product solutions and perturbed trajectories of

    D_q x(t) = w * (eta * x(qt) + (1 - eta) * x(t)),    t in {1, q, q^2, ...},

certifies how far a perturbed trajectory sits from its shadowing exact
solution against the constant 1/|w|, and demonstrates the two unstable
regimes (w = 0 and eta = 1/2, where the product solution ends in a
two-cycle while the forced sum diverges).
"""

from .cayley_core import (
    CayleyParams,
    Trajectory,
    Validity,
    ValidityStatus,
    cayley_average,
    constant_trajectory,
    jackson_derivative,
    residual,
    step_ratio,
    validate,
)
from .exceptions import (
    ConvergenceError,
    ForbiddenParameterError,
    NotApplicableError,
    ParameterError,
    TruncationError,
)
from .hus_analysis import (
    HusReport,
    ShadowResult,
    TruncationInfo,
    UniquenessProbe,
    Verdict,
    certify,
    deviation_profile,
    extract_shadow,
    psi_profile,
    tail_sum_psi,
    tail_sum_psi_info,
    term_ratio_profile,
    uniqueness_probe,
)
from .instability import (
    Crossing,
    DivergenceEvidence,
    TwoCycleResult,
    eta_half_S_divergence,
    step_ratio_burn_in,
    two_cycle,
    w_zero_divergence,
)
from .lattice import (
    DEFAULT_K_MAX,
    LatticePoint,
    LatticeWindow,
    default_k_max,
    iterate,
    point,
)
from .scaled_complex import ScaledComplex, decimal_str
from .solutions import (
    ConstantComplex,
    Custom,
    PerturbationSpec,
    RandomPhase,
    SolutionBundle,
    UnitPhaseOfP,
    product_solution,
    synthesize,
    variation_sum,
)

__version__ = "0.1.0"

__all__ = [
    "CayleyParams",
    "ConstantComplex",
    "ConvergenceError",
    "Crossing",
    "Custom",
    "DEFAULT_K_MAX",
    "DivergenceEvidence",
    "ForbiddenParameterError",
    "HusReport",
    "LatticePoint",
    "LatticeWindow",
    "NotApplicableError",
    "ParameterError",
    "PerturbationSpec",
    "RandomPhase",
    "ScaledComplex",
    "ShadowResult",
    "SolutionBundle",
    "Trajectory",
    "TruncationError",
    "TruncationInfo",
    "TwoCycleResult",
    "UnitPhaseOfP",
    "UniquenessProbe",
    "Validity",
    "ValidityStatus",
    "Verdict",
    "cayley_average",
    "certify",
    "constant_trajectory",
    "decimal_str",
    "default_k_max",
    "deviation_profile",
    "eta_half_S_divergence",
    "extract_shadow",
    "iterate",
    "jackson_derivative",
    "point",
    "product_solution",
    "psi_profile",
    "residual",
    "step_ratio",
    "step_ratio_burn_in",
    "synthesize",
    "tail_sum_psi",
    "tail_sum_psi_info",
    "term_ratio_profile",
    "two_cycle",
    "uniqueness_probe",
    "validate",
    "variation_sum",
    "w_zero_divergence",
]
