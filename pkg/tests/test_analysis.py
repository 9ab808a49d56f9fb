import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rlnc_intercept.analysis import (
    LinkParams,
    Scenario,
    delivery_cdf,
    delivery_cdf_curve,
    delivery_pmf,
    full_rank_prob,
    intercept_curves,
    intercept_deterministic,
    intercept_ft,
    intercept_ft_alt,
    intercept_ut,
    secrecy_gain,
)
from rlnc_intercept.errors import InvalidArgs


def gf2_full_rank_count(n_r, k):
    """Count n_r x k binary matrices whose rows span GF(2)^k."""
    hits = 0
    for rows in itertools.product(range(1 << k), repeat=n_r):
        span = {0}
        for r in rows:
            span |= {s ^ r for s in span}
        hits += len(span) == 1 << k
    return hits


def rational_cdf(n_t, k, q, eps):
    """The binomial-weighted full-rank sum, evaluated in exact rationals."""
    total = Fraction(0)
    for r in range(k, n_t + 1):
        p = Fraction(1)
        for i in range(k):
            p *= 1 - Fraction(1, q ** (r - i))
        total += math.comb(n_t, r) * (1 - eps) ** r * eps ** (n_t - r) * p
    return total


def test_full_rank_examples():
    assert full_rank_prob(1, 1, 2) == 0.5
    assert gf2_full_rank_count(2, 2) == 6
    assert full_rank_prob(2, 2, 2) == pytest.approx(6 / 16, abs=1e-15)
    assert gf2_full_rank_count(3, 2) == 42
    assert full_rank_prob(3, 2, 2) == pytest.approx(42 / 64, abs=1e-15)


@pytest.mark.parametrize("args", [(1, 2, 2), (3, 0, 2), (3, 2, 1)])
def test_full_rank_invalid(args):
    with pytest.raises(InvalidArgs):
        full_rank_prob(*args)


def test_cdf_examples():
    assert delivery_cdf(2, 2, 2, 0.0) == pytest.approx(0.375, abs=1e-15)
    assert delivery_cdf(2, 1, 2, 0.5) == pytest.approx(2 * 0.25 * 0.5 + 0.25 * 0.75, abs=1e-15)
    assert delivery_cdf(2, 1, 2, 0.5) == pytest.approx(0.4375, abs=1e-15)
    for n_t, k in [(1, 1), (10, 3), (150, 50)]:
        assert delivery_cdf(n_t, k, 2, 1.0) == 0.0


def test_pmf_examples():
    assert delivery_pmf(1, 1, 2, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert delivery_pmf(2, 1, 2, 0.5) == pytest.approx(0.1875, abs=1e-15)
    assert delivery_pmf(4, 4, 2, 1.0) == 0.0


@pytest.mark.parametrize("bad", [(1, 2, 2, 0.5), (2, 1, 2, -0.1), (2, 1, 2, 1.5), (2, 1, 1, 0.5)])
def test_cdf_invalid(bad):
    with pytest.raises(InvalidArgs):
        delivery_cdf(*bad)
    with pytest.raises(InvalidArgs):
        delivery_pmf(*bad)


@pytest.mark.parametrize("n_t,k,q,eps", [
    (150, 50, 2, Fraction(1, 10)), (150, 50, 2, Fraction(1, 2)), (60, 20, 16, Fraction(3, 10)),
    (120, 7, 3, Fraction(9, 10)), (75, 75, 2, Fraction(1, 100)),
])
def test_log_domain_cdf_against_rationals(n_t, k, q, eps):
    assert delivery_cdf(n_t, k, q, float(eps)) == pytest.approx(float(rational_cdf(n_t, k, q, eps)), abs=1e-13)


def test_curve_zero_below_k_and_consistent():
    curve = delivery_cdf_curve(20, 5, 2, 0.2)
    assert np.all(curve[:5] == 0)
    for n in range(5, 21):
        assert curve[n] == delivery_cdf(n, 5, 2, 0.2)


def test_scenario_validation_and_advisory():
    with pytest.raises(InvalidArgs):
        Scenario.build(k=5, n=4, eps_b=0.1, eps_e=0.2)
    with pytest.raises(InvalidArgs):
        LinkParams(1.2, 0.1)
    assert Scenario.build(5, 6, 0.1, 0.2).bob_advantage
    assert not Scenario.build(5, 6, 0.3, 0.2).bob_advantage  # advisory only, no error


def test_ut_examples():
    assert intercept_ut(Scenario.build(5, 20, 0.1, 1.0)) == 0.0
    assert intercept_ut(Scenario.build(2, 2, 0.3, 0.0)) == pytest.approx(0.375, abs=1e-15)


def test_ft_examples():
    s = Scenario.build(6, 14, 1.0, 0.3)
    assert intercept_ft(s) == pytest.approx(intercept_ut(s), abs=1e-15)
    assert intercept_ft(Scenario.build(6, 14, 0.2, 1.0)) == 0.0


def test_ft_alt_and_gain_examples():
    s = Scenario.build(7, 7, 0.2, 0.3)
    f_e = delivery_cdf(7, 7, 2, 0.3)
    assert intercept_ft_alt(s) == pytest.approx(f_e, abs=1e-15)
    assert intercept_ft(s) == pytest.approx(f_e, abs=1e-15)
    assert secrecy_gain(s) == 0.0
    s = Scenario.build(7, 20, 1.0, 0.3)
    assert intercept_ft_alt(s) == pytest.approx(delivery_cdf(20, 7, 2, 0.3), abs=1e-15)
    assert secrecy_gain(s) == 0.0


def test_deterministic_examples():
    assert intercept_deterministic(17, 0.0) == 1.0
    assert intercept_deterministic(1, 0.5) == 0.5
    assert intercept_deterministic(50, 0.1) == pytest.approx(5.1538e-3, rel=1e-4)
    with pytest.raises(InvalidArgs):
        intercept_deterministic(0, 0.1)


probs = st.floats(0.0, 1.0)
scenarios = st.builds(
    lambda k, extra, q, eb, ee: Scenario.build(k, k + extra, eb, ee, q),
    st.integers(1, 20), st.integers(0, 40), st.sampled_from([2, 4, 16]), probs, probs,
)


@settings(max_examples=100, deadline=None)
@given(scenarios)
def test_ft_identities(s):
    ft, ut, alt, gain = intercept_ft(s), intercept_ut(s), intercept_ft_alt(s), secrecy_gain(s)
    assert abs(ft - alt) <= 1e-10
    assert abs((ut - ft) - gain) <= 1e-10
    assert gain >= 0
    assert ft <= ut + 1e-12
    for p in (ft, ut, alt, gain):
        assert 0.0 <= p <= 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 15), st.integers(0, 40), st.sampled_from([2, 4, 16]), probs, probs)
def test_intercept_non_decreasing_in_n(k, extra, q, eb, ee):
    c = intercept_curves(k, q, eb, ee, k + extra)
    assert np.all(np.diff(c.ft) >= -1e-12)
    assert np.all(np.diff(c.ut) >= -1e-12)
    for n in range(k, k + extra + 1, 7):
        s = Scenario.build(k, n, eb, ee, q)
        assert c.ft[n - k] == pytest.approx(intercept_ft(s), abs=1e-12)
        assert c.gain[n - k] == pytest.approx(secrecy_gain(s), abs=1e-12)


def test_curves_accept_any_field_size():
    c = intercept_curves(4, 3, 0.2, 0.3, 30)
    assert np.all(np.diff(c.ft) >= -1e-12) and np.all(c.ft <= c.ut + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 30), st.integers(0, 30), probs, probs)
def test_ft_increment_is_sum_of_nonnegative_terms(k, a, b, eb, ee):
    n1, n2 = k + min(a, b), k + max(a, b)
    f_b = delivery_cdf_curve(n2, k, 2, eb)
    f_e = delivery_cdf_curve(n2, k, 2, ee)
    pmf_e = np.diff(f_e)  # pmf_e[n-1] = f_E(n) for n > k
    delta = sum(pmf_e[n - 1] * (1 - f_b[n - 1]) for n in range(n1 + 1, n2 + 1))
    lhs = intercept_ft(Scenario.build(k, n2, eb, ee)) - intercept_ft(Scenario.build(k, n1, eb, ee))
    assert abs(lhs - delta) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 15), st.integers(0, 40), st.sampled_from([2, 5, 256]), probs)
def test_pmf_sums_to_cdf(k, extra, q, eps):
    n = k + extra
    total = math.fsum(delivery_pmf(m, k, q, eps) for m in range(k, n + 1))
    assert abs(total - delivery_cdf(n, k, q, eps)) <= 1e-12


@given(st.integers(1, 10), st.integers(0, 10))
def test_full_rank_increasing(k, extra):
    n = k + extra
    values = [full_rank_prob(n, k, q) for q in (2, 3, 4, 16, 256)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert full_rank_prob(n, k, 2) < full_rank_prob(n + 1, k, 2)


@settings(max_examples=40)
@given(st.integers(1, 60), st.floats(0.001, 0.999))
def test_deterministic_decreases_with_k(k, eps):
    assert intercept_deterministic(k + 1, eps) < intercept_deterministic(k, eps)
