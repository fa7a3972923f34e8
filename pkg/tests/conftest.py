import numpy as np
import pytest

from lacunary_pn.algebra import PRODUCT, ratio_df
from lacunary_pn.convergence import ParamGrid, planted_instance
from lacunary_pn.ideals import DensityIdeal, FiniteIdeal
from lacunary_pn.lacunary import make_scheme, squares_indicator
from lacunary_pn.pn_space import simple_space

PLANTED_SEEDS = range(50)


def ratio_space(dim=1):
    return simple_space(dim, ratio_df(1.0), PRODUCT)


@pytest.fixture
def space():
    return ratio_space(1)


@pytest.fixture
def geo():
    return make_scheme({"kind": "geometric", "rho": 2.0, "c": 1.0})


@pytest.fixture
def squares_seq():
    return squares_indicator()


@pytest.fixture
def density():
    return DensityIdeal()


@pytest.fixture
def finite():
    return FiniteIdeal()


@pytest.fixture
def grid():
    return ParamGrid()


_PLANTED = {}


def planted(seed):
    """Planted instance for a seed, cached so suites share the sequence memo."""
    if seed not in _PLANTED:
        inst = planted_instance(np.random.default_rng(seed))
        _PLANTED[seed] = (inst, ratio_space(inst.dim))
    return _PLANTED[seed]
