import numpy as np
import pytest

from kobalab import (CONVEX, DomainOracle, build_piecewise_max, exp_power,
                     mollify)


@pytest.fixture
def rng():
    return np.random.default_rng(1729)


@pytest.fixture(scope="session")
def smooth_profile():
    return exp_power(1.0, 1.0)


@pytest.fixture(scope="session")
def smooth_oracle(smooth_profile):
    return DomainOracle(smooth_profile, CONVEX)


@pytest.fixture(scope="session")
def steep_oracle():
    return DomainOracle(exp_power(2.0, 1.0), CONVEX)


@pytest.fixture(scope="session")
def shallow_profile():
    return exp_power(0.5, 1.0)


@pytest.fixture(scope="session")
def piecewise_profile(shallow_profile):
    return build_piecewise_max(shallow_profile)


@pytest.fixture(scope="session")
def mollified_profile(piecewise_profile):
    return mollify(piecewise_profile)


@pytest.fixture(scope="session")
def mollified_oracle(mollified_profile):
    return DomainOracle(mollified_profile, CONVEX)
