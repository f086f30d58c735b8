"""Command-line front end: solve, sweep, verify, roots, kdv-check.

Exit codes: 0 ok, 1 verification failure, 2 invalid parameters or config,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from .analysis import SolverConfig, convergence_campaign
from .dynamics import (
    DEFAULT_DXI,
    DEFAULT_TAIL_CUT,
    DEFAULT_XI_MAX,
    NumericalFailure,
    WaveProfile,
    integrate_half_profile,
    mirror_to_full_line,
    saddle_eigenvalue,
)
from .kdv import KdvReference, compute_remainders, kdv_residual, n_kdv
from .model import (
    BracketError,
    InadmissibleParameters,
    ModelParams,
    check_admissible,
    solve_critical_densities,
    solve_zeta,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CSV_COLUMNS = ("xi", "n", "u", "phi", "E", "n_kdv", "n_R", "u_R", "phi_R")
COMMANDS = ("solve", "sweep", "verify", "roots", "kdv-check")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    sigma: float = 0.0
    gamma: float = 1.0
    epsilons: list[float] = field(default_factory=list)
    dxi: float = DEFAULT_DXI
    xi_max: float = DEFAULT_XI_MAX
    tail_cut: float = DEFAULT_TAIL_CUT
    alpha: float | None = None
    out: str = "-"
    format: str = "csv"
    workers: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        knobs = {"dxi": self.dxi, "xi-max": self.xi_max, "tail-cut": self.tail_cut}
        if self.alpha is not None:
            knobs["alpha"] = self.alpha
        for name, v in knobs.items():
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"--{name} must be a positive number, got {v!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.command == "sweep":
            if len(self.epsilons) < 3:
                raise ConfigError("need ≥ 3 epsilons")
            if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
                raise ConfigError("epsilons must be strictly decreasing")
        elif self.command in ("solve", "roots") and len(self.epsilons) != 1:
            raise ConfigError(f"{self.command} takes exactly one --epsilon")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.sigma, self.gamma, self.epsilons[0])


# --- serialisation ----------------------------------------------------------

def fmt_float(v: float) -> str:
    """17 significant digits, scientific notation."""
    return f"{v:.16e}"


def _json_token(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or obj is True or obj is False:
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_json_token(str(k), indent, level + 1)}: {_json_token(v, indent, level + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) for v in obj):
            return "[" + ", ".join(_json_token(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _json_token(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    return _json_token(obj, indent, 0) + "\n"


def atomic_write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def profile_columns(profile: WaveProfile, alpha: float | None = None) -> dict[str, np.ndarray]:
    p = profile.params
    rem = compute_remainders(profile, alpha)
    return {"xi": profile.xi, "n": profile.n, "u": profile.u, "phi": profile.phi,
            "E": profile.E, "n_kdv": n_kdv(KdvReference.from_params(p), profile.xi),
            "n_R": rem.n_R, "u_R": rem.u_R, "phi_R": rem.phi_R}


def profile_csv(profile: WaveProfile, alpha: float | None = None) -> str:
    cols = profile_columns(profile, alpha)
    lines = [",".join(CSV_COLUMNS)]
    for row in zip(*(cols[c] for c in CSV_COLUMNS)):
        lines.append(",".join(fmt_float(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_profile_csv(path: str) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


# --- commands -----------------------------------------------------------------

def cmd_solve(cfg: RunConfig) -> int:
    p = cfg.params
    profile = mirror_to_full_line(integrate_half_profile(p, cfg.dxi, cfg.xi_max, cfg.tail_cut))
    if cfg.format == "csv":
        text = profile_csv(profile, cfg.alpha)
    else:
        cols = profile_columns(profile, cfg.alpha)
        text = dumps_json({
            "schema_version": 1,
            "params": {"sigma": p.sigma, "gamma": p.gamma, "epsilon": p.epsilon, "V": p.V,
                       "J": p.J, "dxi": cfg.dxi, "xi_max": cfg.xi_max, "tail_cut": cfg.tail_cut},
            "first_integral_drift": profile.first_integral_drift,
            "stop_reason": profile.stop_reason,
            "columns": {c: cols[c] for c in CSV_COLUMNS},
        })
    atomic_write(cfg.out, text)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    for e in cfg.epsilons:
        verdict = check_admissible(ModelParams(cfg.sigma, cfg.gamma, e))
        if not verdict.admissible:
            raise InadmissibleParameters(verdict)
    report = convergence_campaign(cfg.sigma, cfg.gamma, cfg.epsilons,
                                  SolverConfig(cfg.dxi, cfg.xi_max, cfg.tail_cut, cfg.alpha),
                                  workers=cfg.workers)
    atomic_write(cfg.out, dumps_json(report.to_dict()))
    if report.failures:
        for f in report.failures:
            print(f"eps={f['epsilon']}: {f['error']}: {f['message']}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_roots(cfg: RunConfig) -> int:
    p = cfg.params
    verdict = check_admissible(p)
    if not verdict.admissible:
        print(f"admissible=false\nreason={verdict.reason.value}")
        raise InadmissibleParameters(verdict)
    c = solve_critical_densities(p)
    rows = [("zeta", solve_zeta(p.sigma)), ("V", p.V), ("J", p.J), ("n_c", c.n_c),
            ("n_ce", c.n_ce), ("n_star", c.n_star)]
    if c.n_s is not None:
        rows.append(("n_s", c.n_s))
    rows.append(("lambda", saddle_eigenvalue(p)))
    for name, v in rows:
        print(f"{name}={v!r}")
    print("admissible=true")
    print(f"reason={verdict.reason.value}")
    return EXIT_OK


def cmd_kdv_check(cfg: RunConfig) -> int:
    ref = KdvReference(cfg.gamma, math.sqrt(1.0 + cfg.sigma))
    xi = np.arange(-10.0, 10.0 + 0.5 * cfg.dxi, cfg.dxi)
    analytic = kdv_residual(ref, xi)
    print(f"gamma={ref.gamma!r}\nV={ref.V!r}")
    print(f"residual_analytic={analytic!r}")
    print(f"residual_fd={kdv_residual(ref, xi, method='fd')!r}")
    return EXIT_OK if analytic <= 1e-12 else EXIT_VERIFY


def cmd_verify(cfg: RunConfig) -> int:
    results = acceptance.run_all(cfg.dxi, cfg.xi_max, cfg.tail_cut)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify,
            "roots": cmd_roots, "kdv-check": cmd_kdv_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionsoliton", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--sigma", type=float, default=0.0)
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--epsilon", type=float, action="append", default=None)
        sp.add_argument("--dxi", type=float, default=DEFAULT_DXI)
        sp.add_argument("--xi-max", type=float, default=DEFAULT_XI_MAX)
        sp.add_argument("--tail-cut", type=float, default=DEFAULT_TAIL_CUT)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--out", default="-")
        sp.add_argument("--format", choices=("csv", "json"),
                        default="json" if name == "sweep" else "csv")
        sp.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    eps = ns.epsilon
    if eps is None:
        eps = [0.1, 0.05, 0.025, 0.0125] if ns.command == "sweep" else [0.1]
    return RunConfig(ns.command, ns.sigma, ns.gamma, list(eps), ns.dxi, ns.xi_max,
                     ns.tail_cut, ns.alpha, ns.out, ns.format, ns.workers)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cfg.validate()
        return HANDLERS[cfg.command](cfg)
    except (ConfigError, InadmissibleParameters) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
