"""
Resource allocation: the fewest scheduled transmissions N in [K, N_hat]
that let Bob decode with probability at least P_hat.

Intercept probability never decreases with N in either mode, so the
smallest feasible N is optimal, and Eve's link plays no part in finding it.
Eve's erasure probability is only used to report what the solution leaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .analysis import LinkParams, Scenario, delivery_cdf, delivery_cdf_curve, intercept_curves
from .errors import InvalidArgs
from .rlnc import CodeParams


@dataclass(frozen=True)
class RamConstraints:
    n_hat: int
    p_hat: float

    def __post_init__(self):
        if self.n_hat < 1:
            raise InvalidArgs(f"n_hat must be >= 1, got {self.n_hat}")
        if not 0.0 < self.p_hat <= 1.0:
            raise InvalidArgs(f"p_hat must lie in (0, 1], got {self.p_hat}")


@dataclass(frozen=True)
class RamSolution:
    n_star: int
    bob_delivery: float
    eps_b: float
    eps_e: Optional[float] = None
    intercept_ft: Optional[float] = None
    intercept_ut: Optional[float] = None
    secrecy_gain: Optional[float] = None

    feasible = True


@dataclass(frozen=True)
class Infeasible:
    """No N <= n_hat reaches the delivery target; ``bob_delivery`` is F_B(n_hat)."""

    n_hat: int
    p_hat: float
    bob_delivery: float
    eps_b: float
    eps_e: Optional[float] = None

    feasible = False
    n_star = None


def _scan(code: CodeParams, eps_b: float, constraints: RamConstraints):
    k, q = code.k, code.q
    if constraints.n_hat < k:
        return None, 0.0
    cdf = delivery_cdf_curve(constraints.n_hat, k, q, eps_b)
    for n in range(k, constraints.n_hat + 1):
        if cdf[n] >= constraints.p_hat:
            return n, float(cdf[n])
    return None, float(cdf[constraints.n_hat])


def _bisect(code: CodeParams, eps_b: float, constraints: RamConstraints):
    k, q, n_hat = code.k, code.q, constraints.n_hat
    if n_hat < k:
        return None, 0.0
    top = delivery_cdf(n_hat, k, q, eps_b)
    if top < constraints.p_hat:
        return None, top
    lo, hi = k - 1, n_hat  # F(lo) < p_hat <= F(hi), with F(k-1) = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if delivery_cdf(mid, k, q, eps_b) >= constraints.p_hat:
            hi = mid
        else:
            lo = mid
    return hi, delivery_cdf(hi, k, q, eps_b)


def solve_ram(code: CodeParams, eps_b: float, constraints: RamConstraints,
              eps_e: Optional[float] = None, method: str = "scan"):
    """Return a :class:`RamSolution` or an :class:`Infeasible` marker.

    ``method`` is ``"scan"`` (linear scan over one precomputed CDF curve) or
    ``"bisect"``; both are exact because feasibility is monotone in N.
    """
    if method == "scan":
        n_star, bob = _scan(code, eps_b, constraints)
    elif method == "bisect":
        n_star, bob = _bisect(code, eps_b, constraints)
    else:
        raise InvalidArgs(f"unknown search method {method!r}")

    if n_star is None:
        return Infeasible(constraints.n_hat, constraints.p_hat, bob, eps_b, eps_e)
    if eps_e is None:
        return RamSolution(n_star, bob, eps_b)
    curves = intercept_curves(code.k, code.q, eps_b, eps_e, n_star)
    return RamSolution(
        n_star, bob, eps_b, eps_e,
        intercept_ft=float(curves.ft[-1]),
        intercept_ut=float(curves.ut[-1]),
        secrecy_gain=float(curves.gain[-1]),
    )


def scenario_at_optimum(code: CodeParams, solution: RamSolution) -> Scenario:
    return Scenario(code, LinkParams(solution.eps_b, solution.eps_e or 0.0), solution.n_star)


def sweep_ram(code: CodeParams, eps_b_grid: Sequence[float], constraints: RamConstraints,
              eps_e_grid: Sequence[float] = ()) -> list:
    """Solve RAM over a grid, eps_b-major; one entry per (eps_b, eps_e) pair.

    An empty ``eps_e_grid`` gives one entry per eps_b with no intercept
    figures, since N* does not depend on Eve.
    """
    if not eps_b_grid:
        raise InvalidArgs("eps_b grid is empty")
    rows = []
    for eps_b in eps_b_grid:
        base = solve_ram(code, eps_b, constraints)
        if not eps_e_grid:
            rows.append(base)
            continue
        for eps_e in eps_e_grid:
            if not base.feasible:
                rows.append(Infeasible(base.n_hat, base.p_hat, base.bob_delivery, eps_b, eps_e))
            else:
                rows.append(solve_ram(code, eps_b, constraints, eps_e))
    return rows


def grid(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic grid; the endpoint is kept within half a step."""
    if step <= 0:
        raise InvalidArgs("grid step must be > 0")
    if lo > hi:
        raise InvalidArgs(f"grid min {lo} exceeds max {hi}")
    count = int(math.floor((hi - lo) / step + 0.5)) + 1
    # round away representation noise so 0.01*7 prints as 0.07
    return [round(lo + i * step, 12) for i in range(count)]
