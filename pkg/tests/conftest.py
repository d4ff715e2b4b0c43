import numpy as np
import pytest

from ghcs.measure import radial_rule
from ghcs.states import Family, FamilyParams


def rel_err(got, ref, floor=1e-300):
    return abs(got - ref) / max(abs(ref), floor)


@pytest.fixture(scope="session")
def bessel_params():
    return FamilyParams(1, 0.5, Family.BESSEL)


@pytest.fixture(scope="session")
def jacobi_params():
    return FamilyParams(1, 0.5, Family.JACOBI)


@pytest.fixture(scope="session")
def bessel_rule(bessel_params):
    return radial_rule(bessel_params)


@pytest.fixture(scope="session")
def jacobi_rule(jacobi_params):
    return radial_rule(jacobi_params)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
