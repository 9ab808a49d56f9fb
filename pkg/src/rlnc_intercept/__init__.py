"""Intercept probability of random linear network coding over erasure links,
with feedback-aided (FT) and unaided (UT) transmission."""

from .analysis import (
    LinkParams,
    Scenario,
    delivery_cdf,
    delivery_pmf,
    full_rank_prob,
    intercept_curves,
    intercept_deterministic,
    intercept_ft,
    intercept_ft_alt,
    intercept_ut,
    secrecy_gain,
)
from .errors import (
    ConfigError,
    ElementOutOfRange,
    InvalidArgs,
    LengthMismatch,
    NotPrimePowerOfTwo,
    ReduciblePolynomial,
    TooLarge,
    ZeroInverse,
)
from .field import FieldSpec, gf_add, gf_create, gf_inv, gf_mul
from .ram import Infeasible, RamConstraints, RamSolution, solve_ram, sweep_ram
from .rlnc import CodeParams, DecoderState, decoder_absorb, decoder_complete, decoder_new, decoder_rank, draw_coefficient_vector
from .simulation import InterceptEstimate, Mode, SimConfig, TrialOutcome, estimate_intercept, run_trial

__version__ = "0.1.0"
