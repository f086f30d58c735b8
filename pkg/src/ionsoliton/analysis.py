"""Cross-epsilon verification: peak asymptotics, remainder orders, tail rates."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .dynamics import (
    DEFAULT_DXI,
    DEFAULT_TAIL_CUT,
    DEFAULT_XI_MAX,
    WaveProfile,
    integrate_half_profile,
    mirror_to_full_line,
    saddle_eigenvalue,
)
from .kdv import KdvReference, compute_remainders, default_alpha, n_kdv
from .model import (
    H_excess,
    ModelParams,
    check_admissible,
    g_of_n,
    solve_critical_densities,
)

FIELDS = ("n_R", "u_R", "phi_R")


class InsufficientResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    dxi: float = DEFAULT_DXI
    xi_max: float = DEFAULT_XI_MAX
    tail_cut: float = DEFAULT_TAIL_CUT
    alpha: float | None = None  # None: half the soliton tail rate


@dataclass(frozen=True)
class PeakCheck:
    epsilon: float
    n_star: float
    u_star: float
    phi_star: float
    predicted: tuple[float, float, float]
    abs_errors: tuple[float, float, float]

    @property
    def scaled_errors(self) -> tuple[float, float, float]:
        e2 = self.epsilon ** 2
        return tuple(a / e2 for a in self.abs_errors)


def peak_check(params: ModelParams) -> PeakCheck:
    """Peak values against ``(1 + 3 gamma eps/V, 3 gamma eps, 3 gamma eps/V)``."""
    crit = solve_critical_densities(params)
    x = crit.star_excess
    u_star = params.J * x / (1.0 + x)
    phi_star = float(H_excess(params, x))
    e, g, V = params.epsilon, params.gamma, params.V
    pred = (1.0 + 3 * g * e / V, 3 * g * e, 3 * g * e / V)
    errs = (abs(x - 3 * g * e / V), abs(u_star - pred[1]), abs(phi_star - pred[2]))
    return PeakCheck(e, crit.n_star, u_star, phi_star, pred, errs)


@dataclass(frozen=True)
class NecessityReport:
    confirmed: bool
    vacuous: bool
    epsilons: tuple[float, ...]
    peak_excess: tuple[float, ...]

    def __bool__(self):
        return self.confirmed


def necessity_probe(sigma: float, gamma: float, epsilons, V_wrong: float) -> NecessityReport:
    """Does the peak fail to approach 1 when the frame uses sound speed ``V_wrong``?

    Confirmed when the excess at the smallest ``eps`` is still at least ten
    times that ``eps``.  Vacuous when some tested ``eps`` is inadmissible.
    """
    eps = tuple(float(e) for e in epsilons)
    fam = [ModelParams(sigma, gamma, e, V=V_wrong) for e in eps]
    if not all(check_admissible(p).admissible for p in fam):
        return NecessityReport(False, True, eps, ())
    xs = tuple(solve_critical_densities(p).star_excess for p in fam)
    return NecessityReport(xs[-1] >= 10.0 * eps[-1], False, eps, xs)


def fit_order(epsilons, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(epsilons)``."""
    return float(np.polyfit(np.log(epsilons), np.log(values), 1)[0])


def tail_rate(half: WaveProfile) -> float:
    """Exponential decay rate of ``n - 1`` over its last decade on the half line."""
    x = half.excess
    if half.mirrored:
        x = x[len(x) // 2:]
    xi = half.dxi * np.arange(len(x))
    win = x <= 10.0 * x[-1]
    if np.count_nonzero(win) < 3:
        raise ValueError("tail too short to fit a rate")
    slope = np.polyfit(xi[win], np.log(x[win]), 1)[0]
    return float(-slope)


def profile_discrepancy(profile: WaveProfile) -> float:
    """``max |(n - 1)/eps - n_KdV|`` over the grid."""
    p = profile.params
    ref = KdvReference.from_params(p)
    return float(np.max(np.abs(profile.excess / p.epsilon - n_kdv(ref, profile.xi))))


def _fd(a: np.ndarray, h: float, k: int) -> np.ndarray:
    if k == 0:
        return a
    if k == 1:
        return (a[2:] - a[:-2]) / (2.0 * h)
    if k == 2:
        return (a[2:] - 2.0 * a[1:-1] + a[:-2]) / (h * h)
    raise ValueError("finite differences are provided for k <= 2 only")


def derivative_remainder_check(profile: WaveProfile, k_max: int = 2,
                               alpha: float | None = None) -> dict[int, dict[str, float]]:
    """Sup norms of the ``k``-th derivatives of the remainders, ``k <= k_max``.

    Uses centred second-order differences on the mirrored grid.  Each entry
    maps field name to its plain sup, plus ``"weighted"`` for the weighted sup
    of the three together.
    """
    if not profile.mirrored:
        raise ValueError("derivative checks need a mirrored profile")
    if k_max > 2:
        raise InsufficientResolutionError("k > 2 is noise-dominated in double precision")
    if k_max > 0 and profile.dxi > 1e-3 * (1 + 1e-9):
        raise InsufficientResolutionError(f"dxi={profile.dxi} too coarse for derivatives")
    rem = compute_remainders(profile, alpha)
    out = {}
    for k in range(k_max + 1):
        xi = rem.xi if k == 0 else rem.xi[1:-1]
        w = np.exp(0.5 * rem.alpha * np.abs(xi))
        sups = {}
        stack = []
        for name in FIELDS:
            d = np.abs(_fd(getattr(rem, name), profile.dxi, k))
            sups[name] = float(np.max(d))
            stack.append(d)
        sups["weighted"] = float(np.max(w * np.max(stack, axis=0)))
        out[k] = sups
    return out


@dataclass
class EpsilonResult:
    epsilon: float
    sups: dict[int, dict[str, float]]
    tail_rate: float
    predicted_rate: float
    drift: float
    drift_bound: float
    overlay: float
    peak: dict


@dataclass
class ConvergenceReport:
    sigma: float
    gamma: float
    config: SolverConfig
    epsilons: list[float]
    sup_norms: dict[str, dict[str, list[float]]]
    fitted_order: dict[str, float]
    fitted_order_by_k: dict[str, dict[str, float]]
    tail_rates: list[dict]
    peak_checks: list[dict]
    drifts: list[dict]
    weighted_constant: dict
    failures: list[dict] = field(default_factory=list)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        p = ModelParams(self.sigma, self.gamma, 1.0)
        cfg["alpha"] = self.config.alpha if self.config.alpha is not None else default_alpha(p)
        return {
            "schema_version": 1,
            "params": {"sigma": self.sigma, "gamma": self.gamma, **cfg},
            "epsilons": self.epsilons,
            "sup_norms": self.sup_norms,
            "fitted_order": self.fitted_order,
            "fitted_order_by_k": self.fitted_order_by_k,
            "tail_rates": self.tail_rates,
            "peak_checks": self.peak_checks,
            "drifts": self.drifts,
            "weighted_constant": self.weighted_constant,
            "failures": self.failures,
        }


def solve_case(sigma: float, gamma: float, epsilon: float, config: SolverConfig,
               k_max: int = 2) -> EpsilonResult:
    """Integrate, mirror and measure one ``eps``; picklable for worker pools."""
    p = ModelParams(sigma, gamma, epsilon)
    half = integrate_half_profile(p, config.dxi, config.xi_max, config.tail_cut)
    full = mirror_to_full_line(half)
    k_eff = k_max if config.dxi <= 1e-3 * (1 + 1e-9) else 0
    sups = derivative_remainder_check(full, k_eff, config.alpha)
    pc = peak_check(p)
    peak = {"epsilon": epsilon, "n_star": pc.n_star, "u_star": pc.u_star,
            "phi_star": pc.phi_star, "predicted": list(pc.predicted),
            "abs_errors": list(pc.abs_errors), "scaled_errors": list(pc.scaled_errors)}
    return EpsilonResult(epsilon, sups, tail_rate(half), saddle_eigenvalue(p),
                         half.first_integral_drift, 1e-8 * float(g_of_n(p, 1.0)),
                         profile_discrepancy(full), peak)


def _run_case(args):
    sigma, gamma, eps, config, k_max = args
    try:
        return solve_case(sigma, gamma, eps, config, k_max)
    except Exception as exc:  # recorded per-eps, campaign keeps going
        return {"epsilon": eps, "error": type(exc).__name__, "message": str(exc)}


def convergence_campaign(sigma: float, gamma: float, epsilons, config: SolverConfig | None = None,
                         k_max: int = 2, workers: int = 1) -> ConvergenceReport:
    """Solve every ``eps``, fit log-log orders of the remainder sup norms."""
    config = config or SolverConfig()
    eps = [float(e) for e in epsilons]
    if len(eps) < 3:
        raise ValueError("need >= 3 epsilons")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    jobs = [(sigma, gamma, e, config, k_max) for e in eps]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case, jobs))
    else:
        results = [_run_case(j) for j in jobs]

    ok = [r for r in results if isinstance(r, EpsilonResult)]
    failures = [r for r in results if not isinstance(r, EpsilonResult)]
    good_eps = [r.epsilon for r in ok]
    ks = sorted({k for r in ok for k in r.sups})
    names = FIELDS + ("weighted",)
    sup_norms = {f"k{k}": {nm: [r.sups[k][nm] for r in ok if k in r.sups] for nm in names}
                 for k in ks}
    by_k = {}
    for k in ks:
        vals = sup_norms[f"k{k}"]
        if len(vals["n_R"]) >= 2:
            by_k[f"k{k}"] = {nm: fit_order(good_eps, vals[nm]) for nm in names}
    fitted = by_k.get("k0", {})

    wc = [r.sups[0]["weighted"] / r.epsilon ** 2 for r in ok]
    spread = max(wc) / min(wc) if wc else math.nan
    weighted_constant = {"values": wc, "spread": spread, "stable": bool(spread <= 2.0)}

    tails = [{"epsilon": r.epsilon, "fitted": r.tail_rate, "predicted": r.predicted_rate,
              "relative_error": abs(r.tail_rate - r.predicted_rate) / r.predicted_rate}
             for r in ok]
    drifts = [{"epsilon": r.epsilon, "drift": r.drift, "bound": r.drift_bound} for r in ok]
    return ConvergenceReport(sigma, gamma, config, good_eps, sup_norms, fitted, by_k, tails,
                             [r.peak for r in ok], drifts, weighted_constant, failures)
