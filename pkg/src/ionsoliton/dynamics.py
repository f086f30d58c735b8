"""Phase-plane engine for the (n, E) system.

The state obeys ``n' = -E/h(n)`` and ``eps E' = n - exp(H(n))`` in the
stretched variable.  The solitary wave is the homoclinic orbit of the saddle
``(1, 0)``; its right half is traced from the peak ``(n_star, 0)`` with
fixed-step classical RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    H_excess,
    ModelParams,
    bernoulli_H,
    g_excess,
    g_of_n,
    h_of_n,
    require_admissible,
    solve_critical_densities,
)

SONIC_GUARD = 1e-14
DEFAULT_DXI = 1e-3
DEFAULT_XI_MAX = 60.0
DEFAULT_TAIL_CUT = 1e-12
DEFAULT_DRIFT_RTOL = 1e-8
# orbit may leave the stable manifold only after decaying this far below the peak
DEPARTURE_FLOOR = 1e-3
MANIFOLD_TOL = 1e-4
MIN_AMPLITUDE = 1e-10


class NumericalFailure(RuntimeError):
    pass


class SonicSingularityError(NumericalFailure):
    pass


class DriftError(NumericalFailure):
    pass


class NonMonotoneError(NumericalFailure):
    pass


class AmplitudeTooSmallError(NumericalFailure):
    pass


@dataclass(frozen=True)
class PhaseState:
    n: float
    E: float


def _h_checked(params: ModelParams, n: float) -> float:
    h = float(h_of_n(params, n))
    if abs(h) < SONIC_GUARD:
        raise SonicSingularityError(f"h(n) vanishes at n={n!r} (sonic density)")
    return h


def ode_rhs(params: ModelParams, s: PhaseState) -> tuple[float, float]:
    h = _h_checked(params, s.n)
    return -s.E / h, (s.n - math.exp(float(bernoulli_H(params, s.n)))) / params.epsilon


def jacobian_at(params: ModelParams, s: PhaseState) -> np.ndarray:
    h = _h_checked(params, s.n)
    dh = -3.0 * params.J ** 2 / s.n ** 4 + params.sigma / s.n ** 2
    eH = math.exp(float(bernoulli_H(params, s.n)))
    return np.array([[s.E * dh / h ** 2, -1.0 / h],
                     [(1.0 - h * eH) / params.epsilon, 0.0]])


def saddle_eigenvalue(params: ModelParams) -> float:
    """Positive eigenvalue of the linearisation at ``(1, 0)``.

    Equals ``sqrt((2 V gamma + gamma^2 eps) / (1 + 2 V gamma eps + (gamma eps)^2))``
    for the physical sound speed; the general form also covers detuned ``V``.
    """
    require_admissible(params)
    return math.sqrt(params.speed_excess_sq / (params.epsilon * (params.J ** 2 - params.sigma)))


@dataclass(frozen=True)
class StationaryPointReport:
    location: PhaseState
    kind: str
    jacobian_det_sign: int


def classify_stationary_points(params: ModelParams) -> list[StationaryPointReport]:
    crit = solve_critical_densities(params)
    reports = []
    for n in (1.0, crit.n_ce):
        s = PhaseState(n, 0.0)
        A = jacobian_at(params, s)
        det = float(np.linalg.det(A))
        if det < 0:
            kind = "saddle"
        elif det > 0 and abs(np.trace(A)) == 0.0:
            kind = "center"
        else:
            kind = "degenerate"
        reports.append(StationaryPointReport(s, kind, int(np.sign(det))))
    return reports


def _frozen(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WaveProfile:
    """Sampled wave on a uniform grid.

    ``excess`` holds ``n - 1`` at full relative precision; prefer it over
    ``n - 1`` in the far field.
    """

    xi: np.ndarray
    n: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    E: np.ndarray
    excess: np.ndarray
    params: ModelParams
    first_integral_drift: float
    dxi: float
    stop_reason: str = "horizon"
    mirrored: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("xi", "n", "u", "phi", "E", "excess"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        sizes = {len(getattr(self, k)) for k in ("xi", "n", "u", "phi", "E", "excess")}
        if len(sizes) != 1:
            raise ValueError(f"profile arrays differ in length: {sorted(sizes)}")

    def __len__(self):
        return len(self.xi)


def first_integral_defect(params: ModelParams, excess, E) -> np.ndarray:
    """``eps/2 E^2 - (g(n) - g(1))`` along samples."""
    return 0.5 * params.epsilon * np.square(E) - g_excess(params, np.asarray(excess))


def _unstable_ratio(params: ModelParams, x: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Unstable over stable amplitude in the saddle eigenbasis."""
    scale = saddle_eigenvalue(params) * (params.J ** 2 - params.sigma)
    stable = x + E / scale
    unstable = x - E / scale
    return np.abs(unstable) / np.abs(stable)


def _manifold_cut(ratio: np.ndarray) -> int:
    k = int(np.argmin(ratio))
    limit = max(MANIFOLD_TOL, float(ratio[k]))
    over = np.nonzero(ratio[k:] > limit)[0]
    return len(ratio) if over.size == 0 else k + int(over[0])


def integrate_half_profile(params: ModelParams, dxi: float = DEFAULT_DXI,
                           xi_max: float = DEFAULT_XI_MAX,
                           tail_cut: float = DEFAULT_TAIL_CUT,
                           drift_tol: float | None = None,
                           check_drift: bool = True) -> WaveProfile:
    """Trace the half wave on ``xi >= 0`` from the peak with RK4 at step ``dxi``.

    Stepping ends when ``n - 1 < tail_cut``, when ``xi`` reaches ``xi_max``, or
    when round-off pushes the orbit off the stable manifold of the saddle.  In
    the last case the samples contaminated by the unstable direction are
    dropped, so the returned tail decays at the linearised rate.
    """
    if not (dxi > 0 and xi_max > 0 and tail_cut > 0):
        raise ValueError("dxi, xi_max and tail_cut must be positive")
    require_admissible(params)
    crit = solve_critical_densities(params)
    x0 = crit.star_excess
    if x0 < MIN_AMPLITUDE:
        raise AmplitudeTooSmallError(f"peak excess {x0:.3e} too small to resolve")

    J2, sig, inv_eps = params.J ** 2, params.sigma, 1.0 / params.epsilon
    x_sonic = crit.n_s - 1.0 if crit.n_s is not None else math.inf

    def rhs(x, E):
        n = 1.0 + x
        h = J2 / (n * n * n) - sig / n
        if abs(h) < SONIC_GUARD:
            raise SonicSingularityError(f"h(n) vanishes at n={n!r}")
        H = 0.5 * J2 * x * (2.0 + x) / (n * n) - sig * math.log1p(x)
        return -E / h, (x - math.expm1(H)) * inv_eps

    n_steps = int(math.floor(xi_max / dxi + 1e-9))
    xs = [x0]
    Es = [0.0]
    x, E = x0, 0.0
    half = 0.5 * dxi
    sixth = dxi / 6.0
    stop = "horizon"
    for _ in range(n_steps):
        a1, b1 = rhs(x, E)
        a2, b2 = rhs(x + half * a1, E + half * b1)
        a3, b3 = rhs(x + half * a2, E + half * b2)
        a4, b4 = rhs(x + dxi * a3, E + dxi * b3)
        xn = x + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        En = E + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        if xn >= x_sonic:
            raise SonicSingularityError(f"orbit reached the sonic density at n={1.0 + xn!r}")
        if not (xn < x and En > 0.0 and xn > 0.0):
            if x > DEPARTURE_FLOOR * x0:
                raise NonMonotoneError(
                    f"density stopped decreasing at xi={len(xs) * dxi:.6g}, n-1={x:.3e}")
            stop = "manifold-departure"
            break
        x, E = xn, En
        xs.append(x)
        Es.append(E)
        if x < tail_cut:
            stop = "tail-cut"
            break

    xs_a = np.array(xs)
    Es_a = np.array(Es)
    if stop != "horizon":
        # a departing orbit can also dive through the tail cut
        keep = _manifold_cut(_unstable_ratio(params, xs_a, Es_a))
        xs_a, Es_a = xs_a[:keep], Es_a[:keep]

    defect = first_integral_defect(params, xs_a, Es_a)
    drift = float(np.max(np.abs(defect)))
    g1 = float(g_of_n(params, 1.0))
    if drift_tol is None:
        drift_tol = DEFAULT_DRIFT_RTOL * g1
    if check_drift and drift > drift_tol:
        raise DriftError(f"first-integral drift {drift:.3e} exceeds {drift_tol:.3e}")

    xi = dxi * np.arange(len(xs_a))
    n = 1.0 + xs_a
    u = params.J * xs_a / n
    phi = H_excess(params, xs_a)
    return WaveProfile(xi, n, u, phi, Es_a, xs_a, params, drift, dxi, stop)


def mirror_to_full_line(half: WaveProfile) -> WaveProfile:
    """Even extension of ``n, u, phi``; odd extension of ``E``."""
    if half.mirrored:
        raise ValueError("profile is already mirrored")

    def even(a):
        return np.concatenate([a[:0:-1], a])

    xi = np.concatenate([-half.xi[:0:-1], half.xi])
    E = np.concatenate([-half.E[:0:-1], half.E])
    return WaveProfile(xi, even(half.n), even(half.u), even(half.phi), E,
                       even(half.excess), half.params, half.first_integral_drift,
                       half.dxi, half.stop_reason, mirrored=True)


def solve_wave(params: ModelParams, dxi: float = DEFAULT_DXI,
               xi_max: float = DEFAULT_XI_MAX, tail_cut: float = DEFAULT_TAIL_CUT,
               **kwargs) -> WaveProfile:
    """Full-line profile: integrate the half wave and mirror it."""
    return mirror_to_full_line(integrate_half_profile(params, dxi, xi_max, tail_cut, **kwargs))
