import pytest

from ionsoliton.dynamics import integrate_half_profile, mirror_to_full_line
from ionsoliton.model import ModelParams

_cache = {}


def half_profile(sigma, epsilon, gamma=1.0, dxi=1e-3):
    key = (sigma, epsilon, gamma, dxi)
    if key not in _cache:
        _cache[key] = integrate_half_profile(ModelParams(sigma, gamma, epsilon), dxi)
    return _cache[key]


@pytest.fixture(scope="session")
def cold_half():
    return half_profile(0.0, 0.1)


@pytest.fixture(scope="session")
def cold_full(cold_half):
    return mirror_to_full_line(cold_half)


@pytest.fixture(scope="session")
def hot_full():
    return mirror_to_full_line(half_profile(2.0, 0.1))
