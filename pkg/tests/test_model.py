import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionsoliton.model import (
    DensityDomainError,
    InadmissibleParameters,
    ModelParams,
    Reason,
    bernoulli_H,
    check_admissible,
    g_derivatives_at_1,
    g_excess,
    g_of_n,
    h_of_n,
    l_of_n,
    solve_critical_densities,
    solve_zeta,
    zeta_residual,
)

COLD = ModelParams(0.0, 1.0, 0.1)
HOT = ModelParams(2.0, 1.0, 0.1)

# mpmath at 40 digits, independent of the bisection path
ZETA = {0.0: 1.585201065244513187, 0.5: 2.0231536615644375526, 1.0: 1.5694838466843457072,
        2.0: 1.3051951170552763505, 5.0: 1.1283271449309665963}
N_STAR_EXCESS = {(0.0, 0.1): 0.36326682015404872, (0.0, 0.0125): 0.038338125123794682,
                 (2.0, 0.1): 0.22420790136436591, (2.0, 0.0125): 0.022099572378319274}
N_CE = {0.0: 1.2178485280067194222, 2.0: 1.1212471245173289569}


@st.composite
def admissible_params(draw):
    sigma = draw(st.sampled_from([0.0, 0.5, 1.0, 2.0, 5.0]))
    gamma = draw(st.floats(0.2, 3.0))
    V = math.sqrt(1 + sigma)
    upper = solve_zeta(sigma) * (math.sqrt(sigma) if sigma > 0 else 1.0)
    frac = draw(st.floats(0.02, 0.9))
    eps = frac * (upper - V) / gamma
    return ModelParams(sigma, gamma, eps)


def test_params_speeds():
    assert COLD.J == pytest.approx(1.1, abs=1e-15)
    assert HOT.V ** 2 == pytest.approx(3.0, abs=4 * np.spacing(3.0))
    assert HOT.J > HOT.V > 0


def test_bernoulli_H_values():
    assert bernoulli_H(COLD, 1.0) == 0.0
    assert bernoulli_H(COLD, 2.0) == pytest.approx(0.45375, rel=1e-15)
    far = bernoulli_H(HOT, np.array([1e3, 1e6, 1e9]))
    assert np.all(np.diff(far) < 0) and far[-1] < 0


def test_h_values():
    assert h_of_n(COLD, 1.0) == pytest.approx(1.21, rel=1e-15)
    n_s = HOT.J / math.sqrt(2.0)
    assert abs(h_of_n(HOT, n_s)) < 1e-15
    assert h_of_n(COLD, 10.0) == pytest.approx(1.21 / 1000)


def test_g_values():
    assert g_of_n(COLD, 1.0) == pytest.approx(2.21, rel=1e-15)
    assert g_of_n(COLD, 1e12) == pytest.approx(math.exp(0.605), rel=1e-9)
    assert math.exp(0.605) < 2.21


def test_l_values():
    crit = solve_critical_densities(COLD)
    assert l_of_n(COLD, 1.0) == 0.0
    assert l_of_n(COLD, crit.n_c) < 0
    assert l_of_n(COLD, 1e8) > 10


@pytest.mark.parametrize("fn", [bernoulli_H, h_of_n, g_of_n, l_of_n])
@pytest.mark.parametrize("n", [0.0, -1.0])
def test_density_domain(fn, n):
    with pytest.raises(DensityDomainError):
        fn(COLD, n)


@pytest.mark.parametrize("sigma", sorted(ZETA))
def test_zeta_against_high_precision(sigma):
    z = solve_zeta(sigma)
    assert z == pytest.approx(ZETA[sigma], abs=1e-12)
    assert abs(zeta_residual(sigma, z)) <= 1e-10
    if sigma > 0:
        assert z > math.sqrt((1 + sigma) / sigma)
    else:
        assert z > 1 and abs(z * z + 1 - math.exp(z * z / 2)) <= 1e-10


def test_zeta_negative_sigma():
    with pytest.raises(ValueError):
        solve_zeta(-1.0)


@pytest.mark.parametrize("params,reason", [
    (ModelParams(0.0, 1.0, 0.1), Reason.OK),
    (ModelParams(0.0, 1.0, 0.0), Reason.SPEED_TOO_LOW),
    (ModelParams(0.0, 6.0, 0.1), Reason.SPEED_TOO_HIGH),
    (ModelParams(0.0, 1.0, 0.9), Reason.SPEED_TOO_HIGH),
    (ModelParams(-1.0, 1.0, 0.1), Reason.DOMAIN),
    (ModelParams(0.0, 1.0, -0.1), Reason.DOMAIN),
    (ModelParams(0.0, 1.0, math.nan), Reason.DOMAIN),
    (ModelParams(2.0, 1.0, 0.1), Reason.OK),
    (ModelParams(2.0, 1.0, 0.2), Reason.SPEED_TOO_HIGH),
])
def test_check_admissible(params, reason):
    v = check_admissible(params)
    assert v.reason is reason
    assert v.admissible == (reason is Reason.OK)


def test_admissible_bounds_cold():
    v = check_admissible(COLD)
    assert v.bounds == (1.0, pytest.approx(ZETA[0.0], abs=1e-12))
    assert v.quantity == pytest.approx(1.1)


def test_boundary_is_inadmissible():
    zeta = solve_zeta(0.0)
    assert not check_admissible(ModelParams(0.0, 1.0, zeta - 1.0)).admissible


@pytest.mark.parametrize("key", sorted(N_STAR_EXCESS))
def test_peak_against_high_precision(key):
    crit = solve_critical_densities(ModelParams(key[0], 1.0, key[1]))
    assert crit.star_excess == pytest.approx(N_STAR_EXCESS[key], rel=1e-12)


@pytest.mark.parametrize("sigma", sorted(N_CE))
def test_center_density_against_high_precision(sigma):
    crit = solve_critical_densities(ModelParams(sigma, 1.0, 0.1))
    assert crit.n_ce == pytest.approx(N_CE[sigma], abs=1e-12)


def test_critical_densities_cold():
    crit = solve_critical_densities(COLD)
    assert crit.n_c == pytest.approx(1.1, abs=1e-15)
    assert crit.n_s is None
    assert abs(crit.n_star - 1.3) <= 10 * 0.1 ** 2


def test_critical_densities_hot_below_sonic():
    crit = solve_critical_densities(HOT)
    assert crit.n_s == pytest.approx(HOT.J / math.sqrt(2))
    assert crit.n_star < crit.n_s


def test_critical_densities_inadmissible():
    with pytest.raises(InadmissibleParameters) as info:
        solve_critical_densities(ModelParams(0.0, 1.0, 0.9))
    assert info.value.verdict.reason is Reason.SPEED_TOO_HIGH


@settings(max_examples=40, deadline=None)
@given(admissible_params())
def test_critical_ordering_and_residuals(p):
    c = solve_critical_densities(p)
    assert 1 < c.n_c < c.n_ce < c.n_star
    if p.sigma > 0:
        assert c.n_star < c.n_s
    assert abs(l_of_n(p, c.n_ce)) <= 1e-10
    g1 = g_of_n(p, 1.0)
    assert abs(g_of_n(p, c.n_star) - g1) <= 1e-10 * g1


@settings(max_examples=25, deadline=None)
@given(admissible_params())
def test_first_integral_potential_above_level_inside_orbit(p):
    c = solve_critical_densities(p)
    x = np.linspace(0, c.star_excess, 401)[1:-1]
    assert np.all(g_excess(p, x) > 0)
    assert np.all(h_of_n(p, 1 + np.linspace(0, c.star_excess, 401)) > 0)


@settings(max_examples=25, deadline=None)
@given(admissible_params())
def test_g_excess_matches_plain_form(p):
    n = np.linspace(1.05, 1.5, 50)
    assert np.allclose(g_excess(p, n - 1), g_of_n(p, n) - g_of_n(p, 1.0), rtol=1e-9, atol=1e-13)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("frac", [0.1, 0.5, 0.9])
def test_g1_above_sonic_level(sigma, frac):
    V = math.sqrt(1 + sigma)
    upper = solve_zeta(sigma) * math.sqrt(sigma)
    p = ModelParams(sigma, 1.0, frac * (upper - V))
    assert g_of_n(p, 1.0) > g_of_n(p, p.J / math.sqrt(sigma))


@settings(max_examples=25, deadline=None)
@given(admissible_params())
def test_h_is_derivative_of_H(p):
    c = solve_critical_densities(p)
    n = np.linspace(1.0, c.n_star, 40)
    d = 1e-5
    fd = (bernoulli_H(p, n + d) - bernoulli_H(p, n - d)) / (2 * d)
    assert np.allclose(fd, h_of_n(p, n), rtol=1e-6)


def test_g_second_derivative_values():
    g2, g3 = g_derivatives_at_1(COLD)
    # 0.1 * 2.1 * (1 + 0.2 + 0.01)
    assert g2 == pytest.approx(0.2541, rel=1e-13)
    assert g2 == pytest.approx(0.1 * 2.1 * 1.21, rel=1e-13)
    _, g3_small = g_derivatives_at_1(ModelParams(0.0, 1.0, 1e-8))
    assert g3_small == pytest.approx(-2.0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(admissible_params())
def test_g_derivatives_match_finite_differences(p):
    g2, g3 = g_derivatives_at_1(p)
    ge, V = p.gamma * p.epsilon, p.V
    assert g2 == pytest.approx(ge * (2 * V + ge) * (1 + 2 * V * ge + ge * ge), rel=1e-12)
    d = 1e-3
    x = np.array([-2 * d, -d, 0.0, d, 2 * d])
    f = g_excess(p, x)
    fd2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * d * d)
    assert fd2 == pytest.approx(g2, rel=1e-6)
    h = 5e-3
    f = g_excess(p, h * np.arange(-3, 4))
    fd3 = (-f[6] + 8 * f[5] - 13 * f[4] + 13 * f[2] - 8 * f[1] + f[0]) / (8 * h ** 3)
    assert fd3 == pytest.approx(g3, rel=1e-5)
