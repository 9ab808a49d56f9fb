"""
Exact ground truth for small instances, in rational arithmetic only.

A received set of coefficient vectors is summarised by its span, stored as
the frozenset of every vector in it.  Enumerating all q^(n*k) coefficient
matrices then collapses to a walk over spans weighted by integer counts,
which is exact and independent of both the closed forms and the Gaussian
elimination used by the decoder.  The joint walk over (Bob's span, Eve's
span) keeps the fact that both receivers see the *same* packets, which the
closed-form intercept probabilities ignore.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import analysis
from .errors import InvalidArgs, TooLarge
from .field import gf_create

ExactProbability = Fraction

# q**k bounds the number of vectors per span; the number of subspaces of
# GF(q)^k stays in the low thousands below it.
MAX_SPACE = 256
MAX_TRANSMISSIONS = 64
MAX_BRUTE_MATRICES = 2**16


def _guard(k: int, q: int, n: int) -> None:
    if k < 1:
        raise InvalidArgs(f"k must be >= 1, got {k}")
    if q**k > MAX_SPACE:
        raise TooLarge(f"q^k = {q}^{k} exceeds the enumeration guard {MAX_SPACE}")
    if n > MAX_TRANSMISSIONS:
        raise TooLarge(f"n = {n} exceeds the enumeration guard {MAX_TRANSMISSIONS}")


def as_fraction(x) -> Fraction:
    """Exact rational for a probability given as Fraction, int, str or float.

    Floats go through their shortest repr, so 0.1 becomes 1/10.
    """
    if isinstance(x, float):
        x = Fraction(repr(x))
    p = Fraction(x)
    if not 0 <= p <= 1:
        raise InvalidArgs(f"probability {x!r} outside [0, 1]")
    return p


class _Space:
    """GF(q)^k with vectors as tuples and subspaces as frozensets."""

    def __init__(self, k: int, q: int):
        self.k, self.q = k, q
        self.field = gf_create(q)
        self.vectors = list(itertools.product(range(q), repeat=k))
        self.zero = frozenset([(0,) * k])
        self.full_size = q**k

    def add(self, span: frozenset, v: tuple) -> frozenset:
        return self._add(span, v)

    @lru_cache(maxsize=None)
    def _add(self, span, v):
        if v in span:
            return span
        f = self.field
        multiples = [tuple(f.mul(c, a) for a in v) for c in range(self.q)]
        return frozenset(
            tuple(a ^ b for a, b in zip(s, m)) for s in span for m in multiples
        )

    def rank(self, span: frozenset) -> int:
        r, size = 0, 1
        while size < len(span):
            size *= self.q
            r += 1
        return r

    def full(self, span: frozenset) -> bool:
        return len(span) == self.full_size

    @lru_cache(maxsize=None)
    def transitions(self, span):
        """Counter of next spans over all q^k equally likely vectors."""
        return Counter(self._add(span, v) for v in self.vectors)


@lru_cache(maxsize=None)
def _space(k: int, q: int) -> _Space:
    return _Space(k, q)


def exact_rank_counts(n_r: int, k: int, q: int) -> dict[int, int]:
    """Number of n_r x k matrices over GF(q) of each rank (all q^(n_r k) counted)."""
    _guard(k, q, n_r)
    sp = _space(k, q)
    counts = {sp.zero: 1}
    for _ in range(n_r):
        nxt = defaultdict(int)
        for span, c in counts.items():
            for span2, m in sp.transitions(span).items():
                nxt[span2] += c * m
        counts = nxt
    out = defaultdict(int)
    for span, c in counts.items():
        out[sp.rank(span)] += c
    return dict(out)


def exact_rank_distribution(n_r: int, k: int, q: int) -> dict[int, Fraction]:
    total = q ** (n_r * k)
    return {r: Fraction(c, total) for r, c in sorted(exact_rank_counts(n_r, k, q).items())}


def exact_full_rank_prob(n_r: int, k: int, q: int) -> Fraction:
    """Fraction of all n_r x k matrices over GF(q) that have rank k."""
    return Fraction(exact_rank_counts(n_r, k, q).get(k, 0), q ** (n_r * k))


def closed_form_full_rank(n_r: int, k: int, q: int) -> Fraction:
    """The product formula for the full-rank probability, as a rational."""
    if n_r < k:
        return Fraction(0)
    p = Fraction(1)
    for i in range(k):
        p *= 1 - Fraction(1, q ** (n_r - i))
    return p


def brute_force_full_rank_count(n_r: int, k: int, q: int) -> int:
    """Literal enumeration of every matrix; only for the tiniest sizes."""
    if q ** (n_r * k) > MAX_BRUTE_MATRICES:
        raise TooLarge(f"{q}^({n_r}*{k}) matrices exceed {MAX_BRUTE_MATRICES}")
    sp = _space(k, q)
    hits = 0
    for rows in itertools.product(sp.vectors, repeat=n_r):
        span = sp.zero
        for v in rows:
            span = sp.add(span, v)
        hits += sp.full(span)
    return hits


def exact_delivery_cdf(n_t: int, k: int, q: int, eps) -> Fraction:
    """P(a receiver can decode after n_t transmissions) with exact weights."""
    _guard(k, q, n_t)
    eps = as_fraction(eps)
    total = Fraction(0)
    keep = 1 - eps
    for r in range(k, n_t + 1):
        weight = comb(n_t, r) * keep**r * eps ** (n_t - r)
        if weight:
            total += weight * exact_full_rank_prob(r, k, q)
    return total


def exact_joint_intercept(mode, scenario) -> Fraction:
    """Exact intercept probability with shared packets, for mode 'ft' or 'ut'.

    Every transmission draws one vector uniformly from GF(q)^k; Bob and Eve
    each receive it independently with probability 1 - eps.  Under 'ft' the
    transmitter falls silent once Bob's span is the whole space.  Eve counts
    as intercepting if her span is full when transmission ends, which includes
    completing on the same packet as Bob.
    """
    mode = str(getattr(mode, "value", mode)).lower()
    if mode not in ("ft", "ut"):
        raise InvalidArgs(f"mode must be 'ft' or 'ut', got {mode!r}")
    k, q, n = scenario.k, scenario.q, scenario.n
    _guard(k, q, n)
    eps_b, eps_e = as_fraction(scenario.eps_b), as_fraction(scenario.eps_e)
    sp = _space(k, q)
    per_vector = Fraction(1, sp.full_size)
    links = [
        (bob_gets, eve_gets, (1 - eps_b if bob_gets else eps_b) * (1 - eps_e if eve_gets else eps_e))
        for bob_gets in (True, False)
        for eve_gets in (True, False)
    ]
    links = [x for x in links if x[2]]

    states = {(sp.zero, sp.zero): Fraction(1)}
    for _ in range(n):
        nxt = defaultdict(Fraction)
        for (bob, eve), p in states.items():
            if mode == "ft" and sp.full(bob):
                nxt[(bob, eve)] += p
                continue
            pairs = Counter((sp.add(bob, v), sp.add(eve, v)) for v in sp.vectors)
            for (bob_new, eve_new), m in pairs.items():
                w = p * m * per_vector
                for bob_gets, eve_gets, lw in links:
                    nxt[(bob_new if bob_gets else bob, eve_new if eve_gets else eve)] += w * lw
        states = nxt
    return sum((p for (_, eve), p in states.items() if sp.full(eve)), Fraction(0))


def independence_gap(mode, scenario) -> tuple[Fraction, float, float]:
    """(exact value, closed-form value, closed form minus exact)."""
    exact = exact_joint_intercept(mode, scenario)
    mode = str(getattr(mode, "value", mode)).lower()
    approx = analysis.intercept_ft(scenario) if mode == "ft" else analysis.intercept_ut(scenario)
    return exact, approx, approx - float(exact)
