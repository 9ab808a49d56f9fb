"""
Closed-form decoding and intercept probabilities for RLNC broadcast over two
independent packet-erasure links (Alice->Bob, Alice->Eve).

Curves are numpy arrays indexed directly by the number of transmitted packets
``n_t``, with zeros below ``k``.  Binomial weights are evaluated in the log
domain, so N in the hundreds is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgs
from .rlnc import CodeParams

# Largest pre-clamp excursion outside [0, 1] attributable to rounding.
CLAMP_SLACK = 1e-12


def _clamp(p: float) -> float:
    assert -CLAMP_SLACK <= p <= 1.0 + CLAMP_SLACK, f"probability {p!r} out of range"
    return min(max(float(p), 0.0), 1.0)


def _check_prob(name: str, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidArgs(f"{name} must lie in [0, 1], got {p!r}")
    return float(p)


def _check_kq(k: int, q: int) -> None:
    if k < 1:
        raise InvalidArgs(f"k must be >= 1, got {k}")
    if q < 2:
        raise InvalidArgs(f"q must be >= 2, got {q}")


@dataclass(frozen=True)
class LinkParams:
    """Erasure probabilities of the Alice->Bob and Alice->Eve links."""

    eps_b: float
    eps_e: float

    def __post_init__(self):
        _check_prob("eps_b", self.eps_b)
        _check_prob("eps_e", self.eps_e)

    @property
    def bob_advantage(self) -> bool:
        """Whether Bob's link is strictly better than Eve's (advisory only)."""
        return self.eps_b < self.eps_e


@dataclass(frozen=True)
class Scenario:
    code: CodeParams
    links: LinkParams
    n: int

    def __post_init__(self):
        if self.n < self.code.k:
            raise InvalidArgs(f"n={self.n} must be >= k={self.code.k}")

    @classmethod
    def build(cls, k: int, n: int, eps_b: float, eps_e: float, q: int = 2) -> "Scenario":
        return cls(CodeParams.of(k, q), LinkParams(eps_b, eps_e), n)

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def q(self) -> int:
        return self.code.q

    @property
    def eps_b(self) -> float:
        return self.links.eps_b

    @property
    def eps_e(self) -> float:
        return self.links.eps_e

    @property
    def bob_advantage(self) -> bool:
        return self.links.bob_advantage


def full_rank_prob(n_r: int, k: int, q: int) -> float:
    """Probability that n_r uniform random vectors of GF(q)^k span the space."""
    _check_kq(k, q)
    if n_r < k:
        raise InvalidArgs(f"n_r={n_r} must be >= k={k}")
    s = math.fsum(math.log1p(-float(q) ** -(n_r - i)) for i in range(k))
    return _clamp(math.exp(s))


def _log_full_rank_curve(n_max: int, k: int, q: int) -> np.ndarray:
    """log P(n, k) for n = 0..n_max, -inf below k."""
    # prefix[j] = sum_{i=1}^{j} log(1 - q^-i); log P(n, k) = prefix[n] - prefix[n-k]
    terms = [0.0] + [math.log1p(-float(q) ** -j) for j in range(1, n_max + 1)]
    prefix = np.cumsum(terms)
    out = np.full(n_max + 1, -np.inf)
    n = np.arange(k, n_max + 1)
    out[k:] = prefix[n] - prefix[n - k]
    return out


def delivery_cdf_curve(n_max: int, k: int, q: int, eps: float) -> np.ndarray:
    """Decoding CDF F(n_t) for every n_t in 0..n_max (zeros below k)."""
    _check_kq(k, q)
    eps = _check_prob("eps", eps)
    if n_max < k:
        raise InvalidArgs(f"n_t={n_max} must be >= k={k}")
    cdf = np.zeros(n_max + 1)
    if eps == 1.0:
        return cdf
    log_p = _log_full_rank_curve(n_max, k, q)
    if eps == 0.0:
        cdf[k:] = np.exp(log_p[k:])
        return np.clip(cdf, 0.0, 1.0)

    log_fact = np.array([math.lgamma(i + 1) for i in range(n_max + 1)])
    log_keep, log_lose = math.log1p(-eps), math.log(eps)
    for n_t in range(k, n_max + 1):
        r = np.arange(k, n_t + 1)
        log_terms = (
            log_fact[n_t] - log_fact[r] - log_fact[n_t - r]
            + r * log_keep + (n_t - r) * log_lose + log_p[r]
        )
        cdf[n_t] = _clamp(np.exp(log_terms).sum())
    return cdf


def pmf_from_cdf(cdf: np.ndarray, k: int) -> np.ndarray:
    pmf = np.zeros_like(cdf)
    pmf[k] = cdf[k]
    diff = np.diff(cdf[k:])
    assert diff.min(initial=0.0) >= -CLAMP_SLACK
    pmf[k + 1:] = np.maximum(diff, 0.0)
    return pmf


def delivery_cdf(n_t: int, k: int, q: int, eps: float) -> float:
    return float(delivery_cdf_curve(n_t, k, q, eps)[n_t])


def delivery_pmf(n_t: int, k: int, q: int, eps: float) -> float:
    """Probability that decoding first becomes possible at transmission n_t."""
    cdf = delivery_cdf_curve(n_t, k, q, eps)
    return float(pmf_from_cdf(cdf, k)[n_t])


def _curves(k, q, eps_b, eps_e, n):
    cdf_b = delivery_cdf_curve(n, k, q, eps_b)
    cdf_e = delivery_cdf_curve(n, k, q, eps_e)
    return cdf_b, pmf_from_cdf(cdf_b, k), cdf_e, pmf_from_cdf(cdf_e, k)


def intercept_ut(scenario: Scenario) -> float:
    """Eve decodes after all N packets went out."""
    s = scenario
    return delivery_cdf(s.n, s.k, s.q, s.eps_e)


def _ft_from_curves(cdf_b, pmf_b, cdf_e, k, n) -> float:
    both = float(np.dot(pmf_b[k:n + 1], cdf_e[k:n + 1]))
    eve_only = cdf_e[n] * (1.0 - cdf_b[n])
    return _clamp(both + eve_only)


def intercept_ft(scenario: Scenario) -> float:
    """Feedback-aided transmission: Alice stops once Bob can decode.

    Sum of the probability that Eve decodes no later than Bob and the
    probability that Eve decodes while Bob still has not after N packets.
    """
    s = scenario
    cdf_b, pmf_b, cdf_e, _ = _curves(s.k, s.q, s.eps_b, s.eps_e, s.n)
    return _ft_from_curves(cdf_b, pmf_b, cdf_e, s.k, s.n)


def _gain_from_curves(cdf_b, pmf_e, k, n) -> float:
    return float(np.dot(pmf_e[k + 1:n + 1], cdf_b[k:n]))


def intercept_ft_alt(scenario: Scenario) -> float:
    """FT intercept written as Eve's CDF minus the feedback correction."""
    s = scenario
    cdf_b, _, cdf_e, pmf_e = _curves(s.k, s.q, s.eps_b, s.eps_e, s.n)
    return _clamp(cdf_e[s.n] - _gain_from_curves(cdf_b, pmf_e, s.k, s.n))


def secrecy_gain(scenario: Scenario) -> float:
    """Drop in intercept probability from switching UT to FT."""
    s = scenario
    cdf_b, _, _, pmf_e = _curves(s.k, s.q, s.eps_b, s.eps_e, s.n)
    return _clamp(_gain_from_curves(cdf_b, pmf_e, s.k, s.n))


def intercept_deterministic(k: int, eps_e: float) -> float:
    """Intercept probability when Alice sends exactly K innovative packets to a
    Bob whose link never erases: Eve must catch all K of them."""
    if k < 1:
        raise InvalidArgs(f"k must be >= 1, got {k}")
    eps_e = _check_prob("eps_e", eps_e)
    return (1.0 - eps_e) ** k


@dataclass(frozen=True)
class InterceptCurves:
    """Intercept probabilities for every N in [k, n_max] at once."""

    k: int
    n: np.ndarray
    ft: np.ndarray
    ut: np.ndarray
    gain: np.ndarray
    bob_cdf: np.ndarray


def intercept_curves(k: int, q: int, eps_b: float, eps_e: float, n_max: int) -> InterceptCurves:
    """FT/UT intercept and Bob's CDF for all N = k..n_max, in O(n_max^2)."""
    cdf_b, pmf_b, cdf_e, pmf_e = _curves(k, q, eps_b, eps_e, n_max)
    ns = np.arange(k, n_max + 1)
    ft = np.array([_ft_from_curves(cdf_b, pmf_b, cdf_e, k, n) for n in ns])
    # running sum of f_E(n) F_B(n-1) gives the gain for every N in one pass
    gain = np.concatenate([[0.0], np.cumsum(pmf_e[k + 1:n_max + 1] * cdf_b[k:n_max])])
    return InterceptCurves(k, ns, ft, cdf_e[k:].copy(), gain, cdf_b[k:].copy())
