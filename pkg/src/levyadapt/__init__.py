"""Adaptive estimation of linear functionals of the jump measure of a pure-jump Levy process."""

from .adaptive import (
    PenaltyConfig,
    PenaltyTable,
    SelectionResult,
    correction,
    lambda_tilde,
    oracle_m_star,
    pen,
    penalty_table,
    select_m_hat,
    sigma_x_tilde,
)
from .ecf import (
    FrequencyGrid,
    Inverse,
    SplitSample,
    TruncationConfig,
    ecf,
    ecf_deriv,
    inverse_deviation_stat,
    log_truncated_cf,
    neumann_inverse,
    uniform_deviation_stat,
    weight,
)
from .estimator import (
    EstimateRecord,
    QuadratureError,
    QuadratureSpec,
    RateSpec,
    Regime,
    bias_bound,
    kernel_estimate,
    kernel_estimates,
    risk_bound,
    smoothed_target,
    theoretical_rate,
)
from .functionals import (
    CompactBump,
    DiracDerivative,
    DiracPoint,
    Gaussian,
    PolynomialTaper,
    Sinc,
    functional_fourier,
    kernel_diff,
    kernel_ft,
)
from .models import (
    BilateralGamma,
    CompoundPoisson,
    ExponentialJump,
    GammaJump,
    GammaSubordinator,
    UniformJump,
    ZeroMeasure,
    char_exponent,
    char_fn,
    mu_fourier,
    sample_increments,
    true_theta,
    variance_constants,
)

__version__ = "0.1.0"
