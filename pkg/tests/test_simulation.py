import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rlnc_intercept.analysis import Scenario, delivery_cdf, intercept_ft, intercept_ut
from rlnc_intercept.errors import InvalidArgs
from rlnc_intercept.oracle import exact_joint_intercept
from rlnc_intercept.ram import RamConstraints, solve_ram
from rlnc_intercept.rlnc import CodeParams, matrix_rank
from rlnc_intercept.simulation import (
    Mode,
    SimConfig,
    draw_trial,
    estimate_intercept,
    pack_bits,
    run_trial,
    simulate_block,
    trial_rng,
)


def test_sim_config_validation():
    s = Scenario.build(2, 3, 0.1, 0.1)
    with pytest.raises(InvalidArgs):
        SimConfig(s, "ft", 0, 1)
    with pytest.raises(ValueError):
        SimConfig(s, "both", 10, 1)
    assert SimConfig(s, "ut", 1, 1).mode is Mode.UT


def test_perfect_bob_blind_eve():
    s = Scenario.build(4, 9, 0.0, 1.0)
    for i in range(50):
        coeffs, _ = draw_trial(trial_rng(5, i), s)
        o = run_trial(s, "ut", trial_rng(5, i))
        assert not o.eve_intercepted and o.eve_completion_index is None
        assert o.bob_decoded == (matrix_rank(coeffs.tolist(), s.code) == 4)


def test_no_feedback_when_bob_hears_nothing():
    s = Scenario.build(3, 8, 1.0, 0.2)
    for i in range(30):
        o = run_trial(s, "ft", trial_rng(9, i))
        assert o.packets_sent == 8 and not o.bob_decoded


def test_single_packet_decodes_half_the_time():
    s = Scenario.build(1, 1, 0.0, 1.0)
    outcomes = [run_trial(s, "ft", trial_rng(3, i)) for i in range(4000)]
    for i, o in enumerate(outcomes[:100]):
        coeffs, _ = draw_trial(trial_rng(3, i), s)
        assert o.bob_decoded == (coeffs[0, 0] != 0)
    rate = np.mean([o.bob_decoded for o in outcomes])
    assert delivery_cdf(1, 1, 2, 0.0) == 0.5
    assert abs(rate - 0.5) <= 4 * math.sqrt(0.25 / 4000)


small_scenarios = st.builds(
    lambda k, extra, q, eb, ee: Scenario.build(k, k + extra, eb, ee, q),
    st.integers(1, 4), st.integers(0, 5), st.sampled_from([2, 4]),
    st.sampled_from([0.0, 0.2, 0.5, 1.0]), st.sampled_from([0.0, 0.3, 0.6, 1.0]),
)


@settings(max_examples=50, deadline=None)
@given(small_scenarios, st.sampled_from(["ft", "ut"]), st.integers(0, 2**63))
def test_trial_outcome_invariants(s, mode, seed):
    o = run_trial(s, mode, trial_rng(seed, 0))
    if mode == "ut":
        assert o.packets_sent == s.n
    else:
        expected = o.bob_completion_index if o.bob_decoded else s.n
        assert o.packets_sent == expected
    assert o.bob_decoded == (o.bob_completion_index is not None)
    assert o.eve_intercepted == (o.eve_completion_index is not None
                                 and o.eve_completion_index <= o.packets_sent)
    for idx in (o.bob_completion_index, o.eve_completion_index):
        assert idx is None or s.k <= idx <= s.n


@pytest.mark.parametrize("k,n,q,mode", [
    (3, 8, 2, "ft"), (3, 8, 2, "ut"), (5, 12, 4, "ft"), (4, 9, 256, "ut"), (70, 85, 2, "ft"),
])
def test_block_engine_reproduces_reference_trials(k, n, q, mode):
    s = Scenario.build(k, n, 0.15, 0.25, q)
    stop = 30 if k > 64 else 90
    bob, eve = simulate_block(s, mode, 2024, 10, stop)
    for j, i in enumerate(range(10, stop)):
        o = run_trial(s, mode, trial_rng(2024, i))
        assert (o.bob_completion_index or 0) == bob[j]
        assert (o.eve_completion_index or 0) == eve[j]


def test_pack_bits_layout():
    bits = np.zeros((2, 70), dtype=np.uint8)
    bits[0, 0] = bits[0, 63] = bits[1, 64] = bits[1, 69] = 1
    packed = pack_bits(bits)
    assert packed.shape == (2, 2)
    assert packed[0].tolist() == [1 | (1 << 63), 0]
    assert packed[1].tolist() == [0, 1 | (1 << 5)]


def test_eve_never_hears_means_zero():
    est = estimate_intercept(SimConfig(Scenario.build(5, 10, 0.1, 1.0), "ut", 500, 1))
    assert est.p_hat == 0.0 and est.std_err == 0.0


def test_single_trial_is_well_formed():
    est = estimate_intercept(SimConfig(Scenario.build(3, 6, 0.2, 0.2), "ft", 1, 8))
    assert est.trials == 1 and est.p_hat in (0.0, 1.0) and est.std_err == 0.0


def test_reproducible_and_independent_of_workers():
    cfg = SimConfig(Scenario.build(6, 14, 0.2, 0.3), "ft", 2500, 123456789)
    a = estimate_intercept(cfg)
    assert estimate_intercept(cfg) == a
    assert estimate_intercept(cfg, workers=2) == a
    assert estimate_intercept(SimConfig(cfg.scenario, "ft", 2500, 987)) != a


def test_ft_intercepts_subset_of_ut_with_matched_seeds():
    s = Scenario.build(4, 10, 0.2, 0.25)
    _, eve_ft = simulate_block(s, "ft", 77, 0, 3000)
    _, eve_ut = simulate_block(s, "ut", 77, 0, 3000)
    assert np.all((eve_ft > 0) <= (eve_ut > 0))
    assert np.count_nonzero(eve_ft) <= np.count_nonzero(eve_ut)


TINY = [(k, n, eb, ee) for k, n in [(1, 3), (2, 4), (3, 6)]
        for eb, ee in [("1/10", "1/5"), ("1/2", "1/2"), ("1/5", "1/10")]]


@pytest.mark.parametrize("k,n,eb,ee", TINY)
def test_agrees_with_exact_joint_probability(k, n, eb, ee):
    s = Scenario.build(k, n, Fraction(eb), Fraction(ee))
    trials = 20_000
    for mode in ("ft", "ut"):
        exact = float(exact_joint_intercept(mode, s))
        est = estimate_intercept(SimConfig(s, mode, trials, 31 * k + n))
        se = math.sqrt(exact * (1 - exact) / trials)
        assert abs(est.p_hat - exact) <= 4 * se + 1e-12
        if mode == "ut":
            assert abs(est.p_hat - intercept_ut(s)) <= 4 * se + 1e-12


def test_ft_closed_form_agrees_when_gap_is_unresolvable():
    s = Scenario.build(3, 6, Fraction(1, 2), Fraction(1, 2))
    trials = 20_000
    exact = float(exact_joint_intercept("ft", s))
    se = math.sqrt(exact * (1 - exact) / trials)
    assert abs(intercept_ft(s) - exact) < se
    est = estimate_intercept(SimConfig(s, "ft", trials, 5))
    assert abs(est.p_hat - intercept_ft(s)) <= 4 * se


def test_bob_success_at_optimum_meets_target():
    code = CodeParams.of(20, 2)
    sol = solve_ram(code, 0.1, RamConstraints(60, 0.9))
    s = Scenario(code, Scenario.build(20, sol.n_star, 0.1, 0.3).links, sol.n_star)
    est = estimate_intercept(SimConfig(s, "ut", 5000, 4))
    se = math.sqrt(0.9 * 0.1 / 5000)
    assert est.bob_success_rate >= 0.9 - 4 * se
