import numpy as np
import pytest

from mdcycles import YearMonth, decompose, load_bundled

START = YearMonth(1976, 5)


@pytest.fixture(scope="session")
def table():
    return load_bundled()


@pytest.fixture(scope="session")
def apps_trend(table):
    return decompose(table["X510krPMAr"]).trend


@pytest.fixture(scope="session")
def reg_trend(table):
    return decompose(table["X510kcPMAa"]).trend


@pytest.fixture
def rng():
    return np.random.default_rng(20201231)
