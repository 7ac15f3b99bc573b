"""Differentially private LASSO at desk scale.

Finite-size AMP and coordinate-descent solvers for the l1-penalized,
linearly tilted least-squares objective, the matching scalar state-evolution
and replica fixed points, and typical-case privacy metrics (component-wise
on-average KL divergence) for output and objective perturbation.
"""

__version__ = "0.1.0"

from .model import (
    Dataset,
    Mechanism,
    ModelParams,
    NoiseVector,
    ParameterError,
    generate_dataset,
    load_dataset,
    make_one_point_mutant,
    sample_privacy_noise,
    save_dataset,
)
from .scalar_kernel import (
    ScalarChannel,
    active_probability,
    active_probability_derivs,
    kl_divergence,
    local_variance,
    se_cross_entropy,
    se_density,
    soft_threshold,
)
from .amp import AmpFixedPoint, AmpOptions, apply_output_perturbation, pairwise_sensitivity, run_amp
from .cd import CdSolution, kkt_residual, solve_lasso_tilted
from .state_evolution import (
    ReplicaFixedPoint,
    SeFixedPoint,
    SeOptions,
    SeState,
    output_perturbation_asymptotics,
    replica_fixed_point,
    se_fixed_point,
    se_rho_hat,
    se_update,
)
from .privacy import (
    PrivacyReport,
    TradeoffPoint,
    cwonavekl_numeric,
    cwonavekl_objective,
    cwonavekl_output,
    delta_coupling,
    gaussian_reference_mu,
    optimal_noise,
    privacy_report,
    r_factor,
    tradeoff_curve,
)
from .harness import ConfigError, ExperimentConfig, load_config, run_experiment
