"""Water-filling rate/power adaptation under Bernoulli-gated impulsive interference.

Closed-form average spectral efficiencies for three adaptation policies on a
Rayleigh block-fading link, a deterministic symbol-level Monte Carlo engine
that measures them, and a CSV-emitting CLI for parameter sweeps.
"""

from .adaptation import (ErrorModel, NoCrossoverError, Policy, PolicyDomain,
                         Scheme, WaterfillConstants, crossover_pth,
                         impulse_ber_under_conventional, make_policy,
                         outage_prob_conventional, qam_ber, rate_aggressive,
                         rate_conservative, rate_conventional, rate_for,
                         solve_threshold, wf_power_fraction, wf_rate_bits)
from .channel import (ChannelParams, CoherenceBlock, DensityKind, SinrDensity,
                      db_to_linear, density_at, sample_block, sample_fading,
                      sinr_of)
from .numerics import (Bracket, ConvergenceError, NoSignChangeError,
                       exp_integral_e1, expand_bracket,
                       integrate_semi_infinite, solve_monotone_root)
from .simulate import (SimConfig, SimMode, SimResult, aggregate, chunk_configs,
                       chunk_seed, expected_outage, governing_sinr, simulate,
                       simulate_chunked)

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "ChannelParams",
    "CoherenceBlock",
    "ConvergenceError",
    "DensityKind",
    "ErrorModel",
    "NoCrossoverError",
    "NoSignChangeError",
    "Policy",
    "PolicyDomain",
    "Scheme",
    "SimConfig",
    "SimMode",
    "SimResult",
    "SinrDensity",
    "WaterfillConstants",
    "aggregate",
    "chunk_configs",
    "chunk_seed",
    "crossover_pth",
    "db_to_linear",
    "density_at",
    "exp_integral_e1",
    "expand_bracket",
    "expected_outage",
    "governing_sinr",
    "impulse_ber_under_conventional",
    "integrate_semi_infinite",
    "make_policy",
    "outage_prob_conventional",
    "qam_ber",
    "rate_aggressive",
    "rate_conservative",
    "rate_conventional",
    "rate_for",
    "sample_block",
    "sample_fading",
    "simulate",
    "simulate_chunked",
    "sinr_of",
    "solve_monotone_root",
    "solve_threshold",
    "wf_power_fraction",
    "wf_rate_bits",
]
