"""
Command-line front end.

    rlnc-intercept analyze   # RAM-optimal N and analytical FT/UT intercept per grid point
    rlnc-intercept optimize  # N* and the UT-to-FT secrecy gain per grid point
    rlnc-intercept simulate  # analytical and Monte Carlo intercept side by side
    rlnc-intercept validate  # exact-oracle cross-checks on small instances

Every table uses one CSV schema (see ``COLUMNS``).  The first line of a CSV
file is a ``# config:`` comment holding the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import analysis, oracle
from .analysis import LinkParams, Scenario
from .errors import ConfigError, InvalidArgs, RlncInterceptError, TooLarge
from .ram import RamConstraints, grid, solve_ram
from .rlnc import CodeParams
from .simulation import Mode, SimConfig, estimate_intercept

log = logging.getLogger(__name__)

COLUMNS = (
    "mode", "k", "q", "eps_b", "eps_e", "n", "intercept_analytical",
    "intercept_simulated", "sim_std_err", "bob_delivery", "feasible",
)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VALIDATION = 0, 1, 2, 3

OUTDIR_ENV = "RLNC_INTERCEPT_OUTDIR"

DEFAULTS = {
    "k": 50,
    "q": 2,
    "n_max": 150,
    "p_target": 0.9,
    "eps_b": "0.01:0.09:0.02",
    "eps_e": "0.1:0.5:0.1",
    "mode": "both",
    "trials": 10_000,
    "seed": 42,
    "n": None,
    "format": "csv",
    "out": None,
    "workers": 1,
}
COMMAND_DEFAULTS = {"optimize": {"eps_b": "0.01:0.1:0.01", "eps_e": "0.1:0.5:0.05"}}

# Not part of the logged config: they do not change the numbers produced.
UNLOGGED = ("out", "workers")


@dataclass
class ResultRow:
    mode: str
    k: int
    q: int
    eps_b: float
    eps_e: Optional[float]
    n: Optional[int]
    intercept_analytical: Optional[float] = None
    intercept_simulated: Optional[float] = None
    sim_std_err: Optional[float] = None
    bob_delivery: Optional[float] = None
    feasible: bool = True


def parse_grid(spec, name: str) -> list[float]:
    """``0.1``, ``0.01,0.05`` or inclusive ``min:max:step``; '' is empty."""
    if isinstance(spec, (int, float)):
        values = [float(spec)]
    elif isinstance(spec, (list, tuple)):
        values = [float(v) for v in spec]
    else:
        text = str(spec).strip()
        try:
            if not text:
                values = []
            elif ":" in text:
                parts = [float(p) for p in text.split(":")]
                if len(parts) != 3:
                    raise ConfigError(name, f"grid {text!r} must be min:max:step")
                values = grid(*parts)
            else:
                values = [float(p) for p in text.split(",")]
        except InvalidArgs as exc:
            raise ConfigError(name, f"bad grid {text!r}: {exc}") from None
        except ValueError:
            raise ConfigError(name, f"cannot parse grid {text!r}") from None
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ConfigError(name, f"value {v} outside [0, 1]")
    return values


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Defaults, then the optional JSON config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(command, {}))
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise ConfigError("config", f"unknown keys {sorted(unknown)}")
        cfg.update(from_file)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = command
    _check_config(cfg)
    return cfg


def _check_config(cfg: dict) -> None:
    for key in ("k", "q", "n_max", "trials", "seed", "workers"):
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool):
            raise ConfigError(key, f"expected an integer, got {cfg[key]!r}")
    if cfg["k"] < 1:
        raise ConfigError("k", "must be >= 1")
    if cfg["q"] < 2 or cfg["q"] & (cfg["q"] - 1) or cfg["q"] > 256:
        raise ConfigError("q", "must be a power of two in [2, 256]")
    if cfg["n_max"] < 1:
        raise ConfigError("n_max", "must be >= 1")
    if not 0.0 < float(cfg["p_target"]) <= 1.0:
        raise ConfigError("p_target", "must lie in (0, 1]")
    if cfg["trials"] < 1:
        raise ConfigError("trials", "must be >= 1")
    if cfg["workers"] < 1:
        raise ConfigError("workers", "must be >= 1")
    if cfg["n"] is not None and cfg["n"] < cfg["k"]:
        raise ConfigError("n", f"must be >= k={cfg['k']}")
    if cfg["mode"] not in ("ft", "ut", "both"):
        raise ConfigError("mode", "must be ft, ut or both")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("format", "must be csv or json")
    cfg["eps_b_values"] = parse_grid(cfg["eps_b"], "eps_b")
    cfg["eps_e_values"] = parse_grid(cfg["eps_e"], "eps_e")
    if not cfg["eps_b_values"]:
        raise ConfigError("eps_b", "grid is empty")
    if not cfg["eps_e_values"] and cfg["command"] != "optimize":
        raise ConfigError("eps_e", "grid is empty")


def _modes(cfg) -> list[str]:
    return ["ft", "ut"] if cfg["mode"] == "both" else [cfg["mode"]]


def _plan(cfg, code: CodeParams, eps_b: float):
    """(n, bob_delivery, feasible) for one eps_b: RAM, or the --n override."""
    constraints = RamConstraints(cfg["n_max"], float(cfg["p_target"]))
    if cfg["n"] is not None:
        bob = analysis.delivery_cdf(cfg["n"], code.k, code.q, eps_b)
        ok = cfg["n"] <= constraints.n_hat and bob >= constraints.p_hat
        return cfg["n"], bob, ok
    sol = solve_ram(code, eps_b, constraints)
    return sol.n_star, sol.bob_delivery, sol.feasible


def cmd_analyze(cfg: dict) -> list[ResultRow]:
    code = CodeParams.of(cfg["k"], cfg["q"])
    rows = []
    for eps_b in cfg["eps_b_values"]:
        n, bob, ok = _plan(cfg, code, eps_b)
        for eps_e in cfg["eps_e_values"]:
            for mode in _modes(cfg):
                row = ResultRow(mode, code.k, code.q, eps_b, eps_e, n, bob_delivery=bob, feasible=ok)
                if n is not None:
                    s = Scenario(code, LinkParams(eps_b, eps_e), n)
                    row.intercept_analytical = (
                        analysis.intercept_ft(s) if mode == "ft" else analysis.intercept_ut(s)
                    )
                rows.append(row)
    return rows


def cmd_optimize(cfg: dict) -> list[ResultRow]:
    """N* per eps_b; mode 'gain' rows carry the UT minus FT intercept in the
    ``intercept_analytical`` column."""
    code = CodeParams.of(cfg["k"], cfg["q"])
    rows = []
    for eps_b in cfg["eps_b_values"]:
        n, bob, ok = _plan(cfg, code, eps_b)
        for eps_e in cfg["eps_e_values"] or [None]:
            row = ResultRow("gain", code.k, code.q, eps_b, eps_e, n, bob_delivery=bob, feasible=ok)
            if n is not None and eps_e is not None:
                row.intercept_analytical = analysis.secrecy_gain(
                    Scenario(code, LinkParams(eps_b, eps_e), n)
                )
            rows.append(row)
    return rows


def point_seed(seed: int, i_b: int, i_e: int) -> int:
    """64-bit simulation seed for grid point (i_b, i_e); shared by both modes."""
    state = np.random.SeedSequence([seed % 2**64, i_b, i_e]).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def cmd_simulate(cfg: dict) -> list[ResultRow]:
    code = CodeParams.of(cfg["k"], cfg["q"])
    rows = []
    for i_b, eps_b in enumerate(cfg["eps_b_values"]):
        n, bob, ok = _plan(cfg, code, eps_b)
        for i_e, eps_e in enumerate(cfg["eps_e_values"]):
            for mode in _modes(cfg):
                row = ResultRow(mode, code.k, code.q, eps_b, eps_e, n, bob_delivery=bob, feasible=ok)
                if n is not None:
                    s = Scenario(code, LinkParams(eps_b, eps_e), n)
                    row.intercept_analytical = (
                        analysis.intercept_ft(s) if mode == "ft" else analysis.intercept_ut(s)
                    )
                    est = estimate_intercept(
                        SimConfig(s, Mode(mode), cfg["trials"], point_seed(cfg["seed"], i_b, i_e)),
                        workers=cfg["workers"],
                    )
                    row.intercept_simulated = est.p_hat
                    row.sim_std_err = est.std_err
                rows.append(row)
    return rows


@dataclass
class Check:
    name: str
    cases: int
    max_deviation: float
    tolerance: Optional[float]

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.max_deviation <= self.tolerance


VALIDATION_EPS = (Fraction(0), Fraction(1, 10), Fraction(1, 2), Fraction(1))


def run_validation(
    max_k: int = 3,
    max_n: int = 6,
    qs=(2,),
    full_rank_fn: Callable = analysis.full_rank_prob,
    cdf_fn: Callable = analysis.delivery_cdf,
    ut_fn: Callable = analysis.intercept_ut,
    ft_fn: Callable = analysis.intercept_ft,
) -> list[Check]:
    """Compare the closed forms against exact enumeration on small sizes.

    The ``*_fn`` hooks exist so a corrupted implementation can be fed in as
    a negative control.
    """
    for q in qs:
        if q**max_k > oracle.MAX_SPACE or max_n > oracle.MAX_TRANSMISSIONS:
            raise TooLarge(f"k={max_k}, n={max_n}, q={q} exceeds the oracle guards")
    dev = {"exact rank enumeration": [0, 0.0], "full-rank float": [0, 0.0],
           "delivery cdf": [0, 0.0], "ut joint": [0, 0.0], "ft joint gap": [0, 0.0],
           "ft below ut": [0, 0.0]}

    def note(name, d):
        dev[name][0] += 1
        dev[name][1] = max(dev[name][1], d)

    for q in qs:
        for k in range(1, max_k + 1):
            for n in range(k, max_n + 1):
                exact = oracle.exact_full_rank_prob(n, k, q)
                note("exact rank enumeration", abs(float(exact - oracle.closed_form_full_rank(n, k, q))))
                note("full-rank float", abs(full_rank_fn(n, k, q) - float(exact)))
                for eps in VALIDATION_EPS:
                    note("delivery cdf", abs(cdf_fn(n, k, q, float(eps)) - float(oracle.exact_delivery_cdf(n, k, q, eps))))
                for eps_b in VALIDATION_EPS[1:3]:
                    for eps_e in VALIDATION_EPS[1:3]:
                        s = Scenario(CodeParams.of(k, q), LinkParams(eps_b, eps_e), n)
                        ut = oracle.exact_joint_intercept("ut", s)
                        ft = oracle.exact_joint_intercept("ft", s)
                        note("ut joint", abs(ut_fn(s) - float(ut)))
                        note("ft joint gap", abs(ft_fn(s) - float(ft)))
                        note("ft below ut", max(0.0, float(ft - ut)))

    tolerances = {"exact rank enumeration": 0.0, "full-rank float": 1e-14, "delivery cdf": 1e-14,
                  "ut joint": 1e-14, "ft joint gap": None, "ft below ut": 0.0}
    return [Check(name, c, d, tolerances[name]) for name, (c, d) in dev.items()]


def format_checks(checks: list[Check]) -> str:
    lines = [f"{'check':<24} {'cases':>6} {'max deviation':>14} {'tolerance':>10}  result"]
    for c in checks:
        tol = "report" if c.tolerance is None else f"{c.tolerance:.0e}"
        lines.append(f"{c.name:<24} {c.cases:>6} {c.max_deviation:>14.3e} {tol:>10}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    ok = all(c.passed for c in checks)
    lines.append("PASS" if ok else "FAIL: " + ", ".join(c.name for c in checks if not c.passed))
    return "\n".join(lines)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _logged_config(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k not in UNLOGGED}


def render(rows: list[ResultRow], cfg: dict) -> str:
    if cfg["format"] == "json":
        records = []
        for row in rows:
            rec = asdict(row)
            for key, val in rec.items():
                if isinstance(val, float):
                    rec[key] = float(f"{val:.12g}")
            records.append(rec)
        return json.dumps({"config": _logged_config(cfg), "rows": records}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_logged_config(cfg), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def _output_path(cfg: dict) -> Optional[str]:
    if cfg["out"]:
        return cfg["out"]
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir:
        return os.path.join(outdir, f"{cfg['command']}.{cfg['format']}")
    return None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of settings; flags override it")
    p.add_argument("--k", type=int, help="source packets K (default 50)")
    p.add_argument("--q", type=int, help="field size, a power of two (default 2)")
    p.add_argument("--eps-b", dest="eps_b", help="Bob erasure grid: x, x,y,... or min:max:step")
    p.add_argument("--eps-e", dest="eps_e", help="Eve erasure grid, same syntax ('' for none)")
    p.add_argument("--n-max", dest="n_max", type=int, help="hard deadline on transmissions (150)")
    p.add_argument("--p-target", dest="p_target", type=float, help="Bob delivery target (0.9)")
    p.add_argument("--mode", choices=("ft", "ut", "both"))
    p.add_argument("--trials", type=int, help="Monte Carlo trials per point (10000)")
    p.add_argument("--seed", type=int, help="master seed (42)")
    p.add_argument("--n", type=int, help="use this N instead of the RAM optimum")
    p.add_argument("--out", help=f"output file (default stdout, or ${OUTDIR_ENV}/<command>.<format>)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, help="processes for Monte Carlo trials (1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlnc-intercept", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("analyze", "analytical intercept at the RAM optimum"),
                        ("optimize", "RAM optimum N* and secrecy gain"),
                        ("simulate", "Monte Carlo next to the analysis")):
        _add_common(sub.add_parser(name, help=help_))
    v = sub.add_parser("validate", help="cross-check closed forms against exact enumeration")
    v.add_argument("--max-k", type=int, default=3)
    v.add_argument("--max-n", type=int, default=6)
    v.add_argument("--q", type=int, nargs="+", default=[2])
    return parser


COMMANDS = {"analyze": cmd_analyze, "optimize": cmd_optimize, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            for q in args.q:
                if q < 2 or q & (q - 1) or q > 256:
                    raise ConfigError("q", "must be a power of two in [2, 256]")
            checks = run_validation(args.max_k, args.max_n, tuple(args.q))
            print(format_checks(checks))
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION

        cfg = resolve_config(args.command, args)
        log.info("resolved config: %s", _logged_config(cfg))
        rows = COMMANDS[args.command](cfg)
        text = render(rows, cfg)
        path = _output_path(cfg)
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except RlncInterceptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if rows and not any(r.feasible for r in rows):
        print("error: no grid point satisfies the delivery target", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
