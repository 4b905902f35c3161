"""Bayesian reconstruction of ground-surface temperature histories
from borehole temperature-depth profiles.

The model couples a conductive heat-equation forward operator with a
two-level hierarchical prior: per-site ground-surface histories and
basal heat flows are shrunk toward regional means, which themselves
share a cross-region prior.  Every full conditional is conjugate, so
inference is exact Gibbs sampling.

Layout: :mod:`~borehole_gst.forward` (physics), :mod:`~borehole_gst.preprocess`
(deep-segment regressions and reduced temperatures), :mod:`~borehole_gst.priors`
(hyperparameters and elicitation), :mod:`~borehole_gst.gibbs` (the sampler),
:mod:`~borehole_gst.posterior` (summaries), and :mod:`~borehole_gst.harness`
(I/O, synthetic data, validation oracles, CLI).
"""

__version__ = "0.1.0"

from .forward import (
    DEFAULT_KAPPA,
    YEAR_SECONDS,
    BoreholeProfile,
    ForwardOperator,
    TimeGrid,
    build_forward_operator,
    erfc,
    forward_solve,
    thermal_resistance,
)
from .preprocess import (
    DeepRegressionResult,
    default_cutoff,
    estimate_intercept_and_flow,
    reduced_estimates,
)
from .priors import (
    BivariateNormalSpec,
    HyperParameters,
    SingleSitePrior,
    build_joint_mu_prior,
    build_joint_nu_prior,
    elicit_inverse_gamma,
    ig_sd_quantiles,
    inverse_gamma_moments,
    marginalize_single_site,
)
from .gibbs import (
    DEFAULT_BREAKPOINTS,
    Chain,
    ChainState,
    CorrelationSpec,
    GibbsConfig,
    NumericalError,
    ar1_correlation,
    run_chain,
    run_single_site,
    sample_block_Tr_Th,
    sample_error_variances,
    sample_flow_means,
    sample_flow_variances,
    sample_heat_flows,
    sample_history_variances,
    sample_region_history_means,
)
from .posterior import (
    SummaryRow,
    SummaryTable,
    ar1_fit,
    flow_report,
    format_flow_mw,
    kde_density,
    residuals,
    summarize,
    temperature_change,
)

__all__ = [
    "BivariateNormalSpec",
    "BoreholeProfile",
    "Chain",
    "ChainState",
    "CorrelationSpec",
    "DEFAULT_BREAKPOINTS",
    "DEFAULT_KAPPA",
    "DeepRegressionResult",
    "ForwardOperator",
    "GibbsConfig",
    "HyperParameters",
    "NumericalError",
    "SingleSitePrior",
    "SummaryRow",
    "SummaryTable",
    "TimeGrid",
    "YEAR_SECONDS",
    "ar1_correlation",
    "ar1_fit",
    "build_forward_operator",
    "build_joint_mu_prior",
    "build_joint_nu_prior",
    "default_cutoff",
    "elicit_inverse_gamma",
    "erfc",
    "estimate_intercept_and_flow",
    "flow_report",
    "format_flow_mw",
    "forward_solve",
    "ig_sd_quantiles",
    "inverse_gamma_moments",
    "kde_density",
    "marginalize_single_site",
    "reduced_estimates",
    "residuals",
    "run_chain",
    "run_single_site",
    "sample_block_Tr_Th",
    "sample_error_variances",
    "sample_flow_means",
    "sample_flow_variances",
    "sample_heat_flows",
    "sample_history_variances",
    "sample_region_history_means",
    "summarize",
    "temperature_change",
]
