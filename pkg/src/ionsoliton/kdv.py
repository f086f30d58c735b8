"""KdV sech^2 soliton and the remainders of a computed wave against it."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import WaveProfile
from .model import ModelParams


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class KdvReference:
    gamma: float
    V: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "KdvReference":
        return cls(params.gamma, params.V)

    @property
    def amplitude(self) -> float:
        return 3.0 * self.gamma / self.V

    @property
    def width_rate(self) -> float:
        return math.sqrt(0.5 * self.V * self.gamma)


def _sech2(z):
    # 4 e^{-2|z|} / (1 + e^{-2|z|})^2, no overflow in the tails
    w = np.exp(-2.0 * np.abs(z))
    return 4.0 * w / np.square(1.0 + w)


def n_kdv(ref: KdvReference, xi):
    return ref.amplitude * _sech2(ref.width_rate * np.asarray(xi, dtype=float))


def n_kdv_derivatives(ref: KdvReference, xi) -> tuple[np.ndarray, ...]:
    """Analytic ``n, n', n'', n'''`` of the soliton."""
    A, k = ref.amplitude, ref.width_rate
    z = k * np.asarray(xi, dtype=float)
    s = _sech2(z)
    t = np.tanh(z)
    d0 = A * s
    d1 = -2.0 * A * k * s * t
    d2 = -2.0 * A * k ** 2 * s * (3.0 * s - 2.0)
    d3 = 8.0 * A * k ** 3 * s * t * (3.0 * s - 1.0)
    return d0, d1, d2, d3


def kdv_residual(ref: KdvReference, xi_grid, method: str = "analytic") -> float:
    """Max of ``|-gamma n' + V n n' + n'''/(2V)|`` over the grid.

    ``method="fd"`` swaps the analytic derivatives for second-order centred
    differences on the (uniform) grid and drops the two points at each end.
    """
    xi = np.asarray(xi_grid, dtype=float)
    if method == "analytic":
        n, d1, _, d3 = n_kdv_derivatives(ref, xi)
    elif method == "fd":
        h = xi[1] - xi[0]
        f = n_kdv(ref, xi)
        n = f[2:-2]
        d1 = (f[3:-1] - f[1:-3]) / (2.0 * h)
        d3 = (f[4:] - 2.0 * f[3:-1] + 2.0 * f[1:-3] - f[:-4]) / (2.0 * h ** 3)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = -ref.gamma * d1 + ref.V * n * d1 + d3 / (2.0 * ref.V)
    return float(np.max(np.abs(res)))


def default_alpha(params: ModelParams) -> float:
    """Half the common tail rate ``sqrt(2 V gamma)`` of wave and soliton."""
    return 0.5 * math.sqrt(2.0 * params.V * params.gamma)


@dataclass(frozen=True)
class RemainderField:
    xi: np.ndarray
    n_R: np.ndarray
    u_R: np.ndarray
    phi_R: np.ndarray
    alpha: float
    weighted_sup: float

    def sup(self, name: str, weighted: bool = False) -> float:
        a = np.abs(getattr(self, name))
        if weighted:
            a = a * np.exp(0.5 * self.alpha * np.abs(self.xi))
        return float(np.max(a))


def _check_grid(profile: WaveProfile):
    xi = profile.xi
    if len(xi) < 2:
        raise GridMismatchError("profile needs at least two samples")
    d = np.diff(xi)
    if np.any(d <= 0) or np.max(np.abs(d - profile.dxi)) > 1e-9 * max(1.0, float(np.max(np.abs(xi)))):
        raise GridMismatchError("profile grid is not uniform with spacing dxi")
    for name in ("n", "u", "phi", "E", "excess"):
        if len(getattr(profile, name)) != len(xi):
            raise GridMismatchError(f"array {name!r} does not match the grid")


def compute_remainders(profile: WaveProfile, alpha: float | None = None) -> RemainderField:
    """``n - 1 - eps n_KdV``, ``u - eps V n_KdV`` and ``phi - eps n_KdV`` on the profile grid."""
    _check_grid(profile)
    p = profile.params
    if alpha is None:
        alpha = default_alpha(p)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    ref = KdvReference.from_params(p)
    nk = p.epsilon * n_kdv(ref, profile.xi)
    n_R = profile.excess - nk
    u_R = profile.u - p.V * nk
    phi_R = profile.phi - nk
    w = np.exp(0.5 * alpha * np.abs(profile.xi))
    wsup = float(np.max(w * np.maximum(np.abs(n_R), np.maximum(np.abs(u_R), np.abs(phi_R)))))
    return RemainderField(profile.xi, n_R, u_R, phi_R, float(alpha), wsup)


def coefficient_onset(profile: WaveProfile, rem: RemainderField | None = None) -> float | None:
    """Smallest ``xi1 >= 0`` with ``2V gamma - 2V^2 n_KdV - V^2 phi_R/eps > V gamma`` beyond it.

    Diagnostic only; returns ``None`` if the inequality fails at the last sample.
    """
    p = profile.params
    rem = rem if rem is not None else compute_remainders(profile)
    ref = KdvReference.from_params(p)
    V, g = p.V, p.gamma
    F = 2 * V * g - 2 * V * V * n_kdv(ref, rem.xi) - V * V * rem.phi_R / p.epsilon
    right = rem.xi >= 0
    xi, F = rem.xi[right], F[right]
    bad = np.nonzero(F <= V * g)[0]
    if bad.size == 0:
        return 0.0
    if bad[-1] == len(F) - 1:
        return None
    return float(xi[bad[-1] + 1])
