import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import half_profile
from ionsoliton.dynamics import WaveProfile, mirror_to_full_line
from ionsoliton.kdv import (
    GridMismatchError,
    KdvReference,
    coefficient_onset,
    compute_remainders,
    default_alpha,
    kdv_residual,
    n_kdv,
    n_kdv_derivatives,
)
from ionsoliton.model import ModelParams, solve_critical_densities

REF = KdvReference(1.0, 1.0)


def test_soliton_values():
    assert n_kdv(REF, 0.0) == 3.0
    # mpmath, 30 digits: 3 sech^2(1/sqrt 2)
    assert n_kdv(REF, 1.0) == pytest.approx(1.8878708209045610025, rel=1e-15)
    assert n_kdv(REF, [-1.0, 1.0])[0] == n_kdv(REF, 1.0)
    assert n_kdv(REF, 60.0) < 1e-30
    assert n_kdv(REF, 1e4) == 0.0


def test_reference_from_params():
    ref = KdvReference.from_params(ModelParams(2.0, 0.5, 0.1))
    assert ref.V == math.sqrt(3.0)
    assert ref.amplitude == pytest.approx(1.5 / math.sqrt(3.0))
    assert ref.width_rate == pytest.approx(math.sqrt(0.25 * math.sqrt(3.0)))


def test_derivatives_match_finite_differences():
    xi = np.linspace(-4, 4, 81)
    h = 1e-4
    d0, d1, d2, d3 = n_kdv_derivatives(REF, xi)
    f = lambda z: n_kdv(REF, z)
    assert np.allclose(d1, (f(xi + h) - f(xi - h)) / (2 * h), atol=1e-7)
    assert np.allclose(d2, (f(xi + h) - 2 * f(xi) + f(xi - h)) / h ** 2, atol=1e-5)
    g = lambda z: n_kdv_derivatives(REF, z)[2]
    assert np.allclose(d3, (g(xi + h) - g(xi - h)) / (2 * h), atol=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(1.0, 3.0))
def test_analytic_residual_vanishes(gamma, V):
    xi = np.arange(-10, 10.0005, 1e-3)
    assert kdv_residual(KdvReference(gamma, V), xi) <= 1e-12


@pytest.mark.parametrize("gamma,V", [(1.0, 1.0), (1.0, math.sqrt(3.0)), (0.5, 1.2)])
def test_fd_residual_small(gamma, V):
    xi = np.arange(-10, 10.0005, 1e-3)
    assert kdv_residual(KdvReference(gamma, V), xi, method="fd") <= 1e-5


def test_wrong_amplitude_is_not_a_solution():
    xi = np.arange(-10, 10.0005, 1e-3)
    ref = KdvReference(1.0, 1.0)
    _, d1, _, d3 = n_kdv_derivatives(ref, xi)
    n = n_kdv(ref, xi)
    # doubling the amplitude breaks the balance between the nonlinear and dispersive terms
    res = -ref.gamma * 2 * d1 + ref.V * 4 * n * d1 + 2 * d3 / (2 * ref.V)
    assert np.max(np.abs(res)) > 0.1


def test_unknown_method():
    with pytest.raises(ValueError):
        kdv_residual(REF, [0.0, 1.0], method="spectral")


def test_default_alpha():
    p = ModelParams(0.0, 1.0, 0.1)
    assert default_alpha(p) == pytest.approx(math.sqrt(2) / 2)


def test_remainder_identities(cold_full):
    f = cold_full
    p = f.params
    rem = compute_remainders(f)
    nk = p.epsilon * n_kdv(KdvReference.from_params(p), f.xi)
    assert np.array_equal(rem.n_R, f.excess - nk)
    assert np.array_equal(rem.u_R, f.u - p.V * nk)
    assert np.array_equal(rem.phi_R, f.phi - nk)
    assert np.array_equal(rem.xi, f.xi)
    assert rem.alpha == default_alpha(p)


@pytest.mark.parametrize("fixture", ["cold_full", "hot_full"])
def test_remainders_even_and_peak(fixture, request):
    f = request.getfixturevalue(fixture)
    rem = compute_remainders(f)
    for a in (rem.n_R, rem.u_R, rem.phi_R):
        assert np.array_equal(a, a[::-1])
    p = f.params
    x_star = solve_critical_densities(p).star_excess
    mid = len(f) // 2
    assert abs(rem.n_R[mid]) == pytest.approx(abs(x_star - 3 * p.gamma * p.epsilon / p.V), rel=1e-12)


def test_remainder_sizes(cold_full):
    rem = compute_remainders(cold_full)
    # second order in eps: sup|n_R| about 6 eps^2 at eps = 0.1
    assert 0.03 < rem.sup("n_R") < 0.08
    assert rem.sup("n_R", weighted=True) >= rem.sup("n_R")
    assert rem.weighted_sup == max(rem.sup(k, weighted=True) for k in ("n_R", "u_R", "phi_R"))


@pytest.mark.parametrize("eps", [0.05, 0.025, 0.0125])
def test_velocity_remainder_tracks_density(eps):
    p = ModelParams(0.0, 1.0, eps)
    rem = compute_remainders(mirror_to_full_line(half_profile(0.0, eps)))
    assert np.max(np.abs(rem.u_R - p.V * rem.n_R)) <= 8 * eps ** 2  # limit 6 eps^2, attained at the peak


def test_alpha_override(cold_full):
    a = compute_remainders(cold_full, alpha=0.0)
    assert a.weighted_sup == max(a.sup(k) for k in ("n_R", "u_R", "phi_R"))
    with pytest.raises(ValueError):
        compute_remainders(cold_full, alpha=-1.0)


def test_grid_mismatch(cold_half):
    h = cold_half
    xi = np.array(h.xi)
    xi[5] += 1e-4
    bad = WaveProfile(xi, h.n, h.u, h.phi, h.E, h.excess, h.params, 0.0, h.dxi)
    with pytest.raises(GridMismatchError):
        compute_remainders(bad)
    wrong_step = WaveProfile(h.xi, h.n, h.u, h.phi, h.E, h.excess, h.params, 0.0, 2 * h.dxi)
    with pytest.raises(GridMismatchError):
        compute_remainders(wrong_step)


def test_coefficient_onset(cold_full):
    onset = coefficient_onset(cold_full)
    assert onset is not None and 0.0 < onset < 5.0
