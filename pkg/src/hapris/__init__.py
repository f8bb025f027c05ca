"""Coverage and capacity analysis of RIS-assisted high-altitude-platform networks.

The package pairs a closed-form route (Gamma moment matching of the
combined channel response) with a seeded Monte Carlo engine so that every
analytic quantity can be cross-checked against simulation.
"""

from .analytic import (
    GammaChannelApprox,
    LinkBudget,
    Mode,
    SystemModel,
    coverage_probability,
    ergodic_capacity,
    gamma_approx,
    mean_abs_a,
    var_abs_a,
)
from .config import PRESETS, RunConfig, default_config, parse_config
from .fading import FadingScenario, RayleighParams, RicianParams, ShadowedRicianParams
from .geometry import LinkKind, NetworkGeometry, distance_moment
from .montecarlo import (
    MetricEstimate,
    SamplingMode,
    estimate_capacity,
    estimate_coverage,
    estimate_gain_histogram,
    simulate_channel_gain,
)

__version__ = "0.1.0"

__all__ = [
    "FadingScenario",
    "GammaChannelApprox",
    "LinkBudget",
    "LinkKind",
    "MetricEstimate",
    "Mode",
    "NetworkGeometry",
    "PRESETS",
    "RayleighParams",
    "RicianParams",
    "RunConfig",
    "SamplingMode",
    "ShadowedRicianParams",
    "SystemModel",
    "coverage_probability",
    "default_config",
    "distance_moment",
    "ergodic_capacity",
    "estimate_capacity",
    "estimate_coverage",
    "estimate_gain_histogram",
    "gamma_approx",
    "mean_abs_a",
    "parse_config",
    "simulate_channel_gain",
    "var_abs_a",
]
