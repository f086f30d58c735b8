"""Parameters, density functions and critical constants of the travelling-wave problem.

Everything here is a pure function of a :class:`ModelParams` value.  Scalar
functions of the density accept floats or numpy arrays.  The ``*_excess``
variants take ``x = n - 1`` and avoid the cancellation that the plain forms
suffer near the constant state ``n = 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

ROOT_XTOL = 1e-12


class DensityDomainError(ValueError):
    """Density argument outside ``n > 0``."""


class BracketError(RuntimeError):
    """No sign change where one is guaranteed; points at a bug upstream."""


class InadmissibleParameters(ValueError):
    """Raised by solvers that need the speed condition to hold."""

    def __init__(self, verdict: "AdmissibilityVerdict"):
        self.verdict = verdict
        super().__init__(verdict.describe())


@dataclass(frozen=True)
class ModelParams:
    """Temperature ratio ``sigma``, KdV speed ``gamma`` and amplitude ``epsilon``.

    ``V`` defaults to the ion-sound speed ``sqrt(1 + sigma)``.  Passing another
    value detunes the frame; only the necessity probe does that.
    """

    sigma: float
    gamma: float
    epsilon: float
    V: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.V is None:
            object.__setattr__(self, "V", math.sqrt(1.0 + self.sigma))
            object.__setattr__(self, "_detune", 0.0)
        else:
            object.__setattr__(self, "_detune", self.V * self.V - (1.0 + self.sigma))

    @property
    def J(self) -> float:
        return self.V + self.gamma * self.epsilon

    @property
    def detuned(self) -> bool:
        return self._detune != 0.0

    @property
    def speed_excess_sq(self) -> float:
        """``J**2 - (1 + sigma)`` without cancellation."""
        ge = self.gamma * self.epsilon
        return ge * (2.0 * self.V + ge) + self._detune


def _check_density(n):
    if np.any(np.asarray(n) <= 0):
        raise DensityDomainError(f"density must be positive, got {n!r}")


def bernoulli_H(params: ModelParams, n):
    """Potential as a function of density, ``phi = H(n)``."""
    _check_density(n)
    J2 = params.J ** 2
    return 0.5 * J2 * (1.0 - 1.0 / np.square(n)) - params.sigma * np.log(n)


def h_of_n(params: ModelParams, n):
    """``dH/dn = J^2/n^3 - sigma/n``."""
    _check_density(n)
    return params.J ** 2 / np.power(n, 3) - params.sigma / n


def g_of_n(params: ModelParams, n):
    """Potential of the first integral, ``J^2/n + sigma n + exp(H(n))``."""
    _check_density(n)
    return params.J ** 2 / n + params.sigma * n + np.exp(bernoulli_H(params, n))


def l_of_n(params: ModelParams, n):
    """Stationarity defect ``ln n - H(n)``; vanishes at 1 and ``n_ce``."""
    _check_density(n)
    return np.log(n) - bernoulli_H(params, n)


def H_excess(params: ModelParams, x):
    """``H(1 + x)`` evaluated stably for small ``x``."""
    _check_density(1.0 + np.asarray(x))
    return 0.5 * params.J ** 2 * x * (2.0 + x) / np.square(1.0 + x) - params.sigma * np.log1p(x)


_SERIES_CUT = 0.05
_SERIES_TERMS = 16


def _log1p_minus_x(x):
    """``log(1 + x) - x``; power series near zero."""
    x = np.asarray(x, dtype=float)
    direct = np.log1p(x) - x
    acc = np.zeros_like(x)
    for k in range(_SERIES_TERMS + 1, 1, -1):
        acc = (-1.0) ** (k + 1) / k + x * acc
    series = acc * x * x
    return np.where(np.abs(x) < _SERIES_CUT, series, direct)


def _expm1_minus_x(h):
    """``exp(h) - 1 - h``; power series near zero."""
    h = np.asarray(h, dtype=float)
    direct = np.expm1(h) - h
    acc = np.zeros_like(h)
    for k in range(_SERIES_TERMS + 1, 1, -1):
        acc = 1.0 / math.factorial(k) + h * acc
    series = acc * h * h
    return np.where(np.abs(h) < _SERIES_CUT, series, direct)


def g_excess(params: ModelParams, x):
    """``g(1 + x) - g(1)`` evaluated stably for small ``x``.

    The terms linear in ``x`` cancel identically and are removed before
    evaluation, leaving ``(e^H - 1 - H) - J^2 x^2 / (2 (1+x)^2) - sigma (log(1+x) - x)``.
    """
    x = np.asarray(x, dtype=float)
    H = H_excess(params, x)
    out = (_expm1_minus_x(H) - 0.5 * params.J ** 2 * np.square(x / (1.0 + x))
           - params.sigma * _log1p_minus_x(x))
    return out if out.ndim else float(out)


def l_excess(params: ModelParams, x):
    """``l(1 + x)`` evaluated stably for small ``x``."""
    return np.log1p(x) - H_excess(params, x)


def g_derivatives_at_1(params: ModelParams) -> tuple[float, float]:
    """Second and third derivatives of ``g`` at ``n = 1``."""
    J2, s = params.J ** 2, params.sigma
    hs = J2 - s
    g2 = hs * params.speed_excess_sq
    g3 = 6.0 * J2 - 2.0 * s + hs ** 3 + 3.0 * hs * (-3.0 * J2 + s)
    return g2, g3


# --- critical constants ----------------------------------------------------

def zeta_residual(sigma: float, z: float) -> float:
    """Log-form residual whose positive root beyond 1 is ``zeta_sigma``.

    For ``sigma > 0`` this is ``sigma ln z + ln sigma + ln((z-1)^2 + 1/sigma)
    - sigma (z^2 - 1)/2``; for ``sigma = 0`` it is ``ln(z^2 + 1) - z^2/2``.
    Positive between 1 and the root, negative beyond.
    """
    if sigma == 0:
        return math.log(z * z + 1.0) - 0.5 * z * z
    return (sigma * math.log(z) + math.log(sigma)
            + math.log((z - 1.0) ** 2 + 1.0 / sigma) - 0.5 * sigma * (z * z - 1.0))


def _bisect(f, a: float, b: float, xtol: float = ROOT_XTOL) -> float:
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{a!r}, {b!r}]: f={fa!r}, {fb!r}")
    return optimize.bisect(f, a, b, xtol=xtol, maxiter=400)


def _grow_bracket(f, lo: float, sign: int, start: float | None = None,
                  max_doublings: int = 200) -> float:
    """Double an upper endpoint from ``lo`` until ``sign * f`` turns positive."""
    b = 2.0 * lo if start is None else start
    for _ in range(max_doublings):
        if sign * f(b) > 0:
            return b
        b *= 2.0
    raise BracketError(f"could not bracket a root above {lo!r}")


def solve_zeta(sigma: float) -> float:
    """Upper speed constant: ``zeta_sigma`` for ``sigma > 0``, ``zeta_0`` otherwise."""
    if not sigma >= 0:
        raise ValueError(f"sigma must be non-negative, got {sigma!r}")
    f = lambda z: zeta_residual(sigma, z)  # noqa: E731
    lo = 1.0 if sigma == 0 else math.sqrt((1.0 + sigma) / sigma) * (1.0 + 1e-9)
    hi = _grow_bracket(f, lo, sign=-1)
    return _bisect(f, lo, hi)


class Reason(str, enum.Enum):
    OK = "ok"
    SPEED_TOO_LOW = "speed-too-low"
    SPEED_TOO_HIGH = "speed-too-high"
    DOMAIN = "parameter-domain-violation"


@dataclass(frozen=True)
class AdmissibilityVerdict:
    """Outcome of the speed condition.

    ``quantity`` is ``J/sqrt(sigma)`` when ``sigma > 0`` and ``J`` when
    ``sigma = 0``; ``bounds`` is the open interval it must lie in.
    """

    admissible: bool
    reason: Reason
    quantity: float = math.nan
    bounds: tuple[float, float] = (math.nan, math.nan)

    def describe(self) -> str:
        if self.reason is Reason.OK:
            return f"admissible: {self.bounds[0]:.12g} < {self.quantity:.12g} < {self.bounds[1]:.12g}"
        if self.reason is Reason.DOMAIN:
            return "parameter-domain-violation: need sigma >= 0, gamma >= 0, epsilon >= 0, V > 0"
        if self.reason is Reason.SPEED_TOO_LOW:
            return (f"speed-too-low: frame speed quantity {self.quantity:.12g} "
                    f"must exceed lower bound {self.bounds[0]:.12g}")
        return (f"speed-too-high: frame speed quantity {self.quantity:.12g} "
                f"must stay below upper bound {self.bounds[1]:.12g}")


def check_admissible(params: ModelParams) -> AdmissibilityVerdict:
    vals = (params.sigma, params.gamma, params.epsilon, params.V)
    if (not all(math.isfinite(v) for v in vals) or params.sigma < 0 or params.gamma < 0
            or params.epsilon < 0 or params.V <= 0):
        return AdmissibilityVerdict(False, Reason.DOMAIN)
    s = params.sigma
    zeta = solve_zeta(s)
    if s > 0:
        q = params.J / math.sqrt(s)
        lo = math.sqrt((1.0 + s) / s)
    else:
        q, lo = params.J, 1.0
    bounds = (lo, zeta)
    if not q > lo:
        return AdmissibilityVerdict(False, Reason.SPEED_TOO_LOW, q, bounds)
    if not q < zeta:
        return AdmissibilityVerdict(False, Reason.SPEED_TOO_HIGH, q, bounds)
    return AdmissibilityVerdict(True, Reason.OK, q, bounds)


def require_admissible(params: ModelParams) -> AdmissibilityVerdict:
    verdict = check_admissible(params)
    if not verdict.admissible:
        raise InadmissibleParameters(verdict)
    return verdict


@dataclass(frozen=True)
class CriticalDensities:
    zeta: float
    n_s: float | None
    n_c: float
    n_ce: float
    n_star: float
    star_excess: float  # n_star - 1 at full relative precision


def solve_critical_densities(params: ModelParams) -> CriticalDensities:
    """Roots organising the phase plane: sonic, turning, centre and peak densities."""
    verdict = require_admissible(params)
    s = params.sigma
    n_s = params.J / math.sqrt(s) if s > 0 else None
    n_c = params.J / math.sqrt(1.0 + s)

    # roots are bracketed in the excess variable x = n - 1
    l_x = lambda x: float(l_excess(params, x))  # noqa: E731
    xc = n_c - 1.0
    x_hi = _grow_bracket(l_x, xc, sign=+1, start=2.0 * n_c - 1.0)
    x_ce = _bisect(l_x, xc, x_hi)

    g_x = lambda x: float(g_excess(params, x))  # noqa: E731
    if s > 0:
        x_hi = n_s - 1.0
    else:
        x_hi = _grow_bracket(g_x, x_ce, sign=-1, start=2.0 * (1.0 + x_ce) - 1.0)
    # the peak seeds the orbit, so it is resolved to machine precision
    x_star = _bisect(g_x, x_ce, x_hi, xtol=1e-17)
    zeta = verdict.bounds[1]
    return CriticalDensities(zeta, n_s, n_c, 1.0 + x_ce, 1.0 + x_star, x_star)
