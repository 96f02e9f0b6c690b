import math

import pytest

from lutzlab import family as fam
from lutzlab import profile as prof


@pytest.fixture(scope="session")
def solved_params():
    return prof.TwistParams(epsilon0=0.05, delta0=0.0005, delta=0.01,
                            mu_minus=-1.0, mu_plus=1.0, u=0.05).solved()


@pytest.fixture(scope="session")
def raw_pair(solved_params):
    return prof.build_twisted_path(solved_params)


@pytest.fixture(scope="session")
def smooth_pair(solved_params, raw_pair):
    return prof.mollify(raw_pair, prof.default_window(solved_params))


@pytest.fixture(scope="session")
def cap_pair():
    return prof.standard_cap_pair(1.0)


@pytest.fixture(scope="session")
def model():
    return fam.FamilyModel(1.0, 1.0, n=2)


@pytest.fixture(scope="session")
def base_b(model):
    return math.log(model.defaults.l_base)
