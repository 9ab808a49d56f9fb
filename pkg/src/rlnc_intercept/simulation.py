"""
Monte Carlo simulation of the broadcast: every transmission carries one
random coefficient vector, erased independently on Bob's and Eve's links.

Each trial draws all of its randomness up front from a generator keyed by
``(master_seed, trial_index)``.  Because of that the per-trial reference path
(:func:`run_trial`) and the vectorised block engine see identical draws, and
estimates do not depend on how trials are split across workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import Scenario
from .errors import InvalidArgs
from .rlnc import decoder_new

BLOCK_TRIALS = 1024


class Mode(str, enum.Enum):
    FT = "ft"
    UT = "ut"


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    mode: Mode
    trials: int
    master_seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgs(f"trials must be >= 1, got {self.trials}")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True)
class TrialOutcome:
    bob_decoded: bool
    eve_intercepted: bool
    packets_sent: int
    bob_completion_index: Optional[int]
    eve_completion_index: Optional[int]


@dataclass(frozen=True)
class InterceptEstimate:
    p_hat: float
    std_err: float
    trials: int
    master_seed: int
    bob_success_rate: float
    intercepts: int = 0
    bob_successes: int = 0


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed % 2**64, trial_index])


def draw_trial(rng: np.random.Generator, scenario: Scenario):
    """All randomness of one trial: coefficient rows and erasure uniforms.

    Returns ``(coeffs, uniforms)`` with shapes (N, K) and (N, 2); column 0 of
    ``uniforms`` decides Bob's erasures, column 1 Eve's.
    """
    s = scenario
    coeffs = rng.integers(0, s.q, size=(s.n, s.k), dtype=np.int64).astype(np.uint8)
    uniforms = rng.random((s.n, 2))
    return coeffs, uniforms


def run_trial(scenario: Scenario, mode, rng: np.random.Generator) -> TrialOutcome:
    """One broadcast, decoded row by row with :class:`DecoderState`."""
    mode = Mode(mode)
    s = scenario
    coeffs, uniforms = draw_trial(rng, s)
    bob, eve = decoder_new(s.code), decoder_new(s.code)
    bob_at = eve_at = None
    sent = 0
    for t in range(s.n):
        if mode is Mode.FT and bob_at is not None:
            break
        if mode is Mode.UT and bob_at is not None and eve_at is not None:
            sent = s.n
            break
        sent = t + 1
        v = coeffs[t]
        if uniforms[t, 0] >= s.eps_b and bob_at is None:
            bob.absorb(v)
            if bob.complete():
                bob_at = t + 1
        if uniforms[t, 1] >= s.eps_e and eve_at is None:
            eve.absorb(v)
            if eve.complete():
                eve_at = t + 1
    return TrialOutcome(
        bob_decoded=bob_at is not None,
        eve_intercepted=eve_at is not None,
        packets_sent=sent,
        bob_completion_index=bob_at,
        eve_completion_index=eve_at,
    )


class _BatchReceiver:
    """Echelon bases for a batch of receivers; slot c holds the row whose
    leading 1 sits in column c."""

    def __init__(self, trials: int, k: int):
        self.basis = np.zeros((trials, k, k), dtype=np.uint8)
        self.has = np.zeros((trials, k), dtype=bool)
        self.rank = np.zeros(trials, dtype=np.int64)
        self.done_at = np.zeros(trials, dtype=np.int64)

    def absorb(self, rows, vecs, mul, inv):
        live = np.ones(len(rows), dtype=bool)
        for c in range(vecs.shape[1]):
            i = np.nonzero(live & (vecs[:, c] != 0))[0]
            if i.size == 0:
                if not live.any():
                    break
                continue
            pivot_known = self.has[rows[i], c]
            red = i[pivot_known]
            if red.size:
                vecs[red] ^= mul[vecs[red, c][:, None], self.basis[rows[red], c]]
            new = i[~pivot_known]
            if new.size:
                tr = rows[new]
                self.basis[tr, c] = mul[inv[vecs[new, c]][:, None], vecs[new]]
                self.has[tr, c] = True
                self.rank[tr] += 1
                live[new] = False


class _BatchReceiverGF2(_BatchReceiver):
    """GF(2) variant storing each row as ceil(K/64) packed uint64 words."""

    def __init__(self, trials: int, k: int):
        words = (k + 63) // 64
        self.basis = np.zeros((trials, k, words), dtype=np.uint64)
        self.has = np.zeros((trials, k), dtype=bool)
        self.rank = np.zeros(trials, dtype=np.int64)
        self.done_at = np.zeros(trials, dtype=np.int64)

    def absorb(self, rows, vecs, mul=None, inv=None):
        live = np.ones(len(rows), dtype=bool)
        for c in range(self.has.shape[1]):
            w, bit = divmod(c, 64)
            i = np.nonzero(live & ((vecs[:, w] >> np.uint64(bit)) & np.uint64(1)).astype(bool))[0]
            if i.size == 0:
                if not live.any():
                    break
                continue
            pivot_known = self.has[rows[i], c]
            red = i[pivot_known]
            if red.size:
                vecs[red] ^= self.basis[rows[red], c]
            new = i[~pivot_known]
            if new.size:
                tr = rows[new]
                self.basis[tr, c] = vecs[new]
                self.has[tr, c] = True
                self.rank[tr] += 1
                live[new] = False


def pack_bits(coeffs: np.ndarray) -> np.ndarray:
    """Pack a trailing axis of 0/1 entries into uint64 words, column c at
    word c // 64, bit c % 64."""
    k = coeffs.shape[-1]
    words = []
    for lo in range(0, k, 64):
        chunk = coeffs[..., lo:lo + 64].astype(np.uint64)
        shifts = np.arange(chunk.shape[-1], dtype=np.uint64)
        words.append(np.bitwise_or.reduce(chunk << shifts, axis=-1))
    return np.stack(words, axis=-1)


def simulate_block(scenario: Scenario, mode, master_seed: int, start: int, stop: int):
    """Completion indices (0 = never) of Bob and Eve for trials [start, stop)."""
    mode = Mode(mode)
    s = scenario
    mul, inv = s.code.field.mul_table, s.code.field.inv_table
    draws = [draw_trial(trial_rng(master_seed, i), s) for i in range(start, stop)]
    coeffs = np.stack([d[0] for d in draws])
    uniforms = np.stack([d[1] for d in draws])
    delivered = (uniforms[:, :, 0] >= s.eps_b, uniforms[:, :, 1] >= s.eps_e)

    count = stop - start
    if s.q == 2:
        coeffs = pack_bits(coeffs)
        bob, eve = _BatchReceiverGF2(count, s.k), _BatchReceiverGF2(count, s.k)
    else:
        bob, eve = _BatchReceiver(count, s.k), _BatchReceiver(count, s.k)
    for t in range(s.n):
        if mode is Mode.FT:
            on_air = bob.done_at == 0
        else:
            on_air = (bob.done_at == 0) | (eve.done_at == 0)
        if not on_air.any():
            break
        for rx, got in zip((bob, eve), delivered):
            rows = np.nonzero(on_air & got[:, t] & (rx.done_at == 0))[0]
            if rows.size == 0:
                continue
            rx.absorb(rows, coeffs[rows, t].copy(), mul, inv)
            finished = rows[rx.rank[rows] == s.k]
            rx.done_at[finished] = t + 1
    return bob.done_at, eve.done_at


def _count_block(args):
    scenario, mode, seed, start, stop = args
    bob_at, eve_at = simulate_block(scenario, mode, seed, start, stop)
    return int(np.count_nonzero(eve_at)), int(np.count_nonzero(bob_at))


def estimate_intercept(config: SimConfig, workers: int = 1) -> InterceptEstimate:
    """Fraction of trials in which Eve gathers K independent packets.

    Trials are cut into fixed blocks; ``workers > 1`` farms blocks out to
    processes.  Counts are summed, so the result is identical either way.
    """
    c = config
    blocks = [
        (c.scenario, c.mode, c.master_seed, lo, min(lo + BLOCK_TRIALS, c.trials))
        for lo in range(0, c.trials, BLOCK_TRIALS)
    ]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_count_block, blocks))
    else:
        counts = [_count_block(b) for b in blocks]
    intercepts = sum(e for e, _ in counts)
    bob_ok = sum(b for _, b in counts)
    p = intercepts / c.trials
    return InterceptEstimate(
        p_hat=p,
        std_err=math.sqrt(p * (1.0 - p) / c.trials),
        trials=c.trials,
        master_seed=c.master_seed,
        bob_success_rate=bob_ok / c.trials,
        intercepts=intercepts,
        bob_successes=bob_ok,
    )
