import numpy as np
import pytest

from trendcycle import henderson_kernel, local_poly_filter, musgrave_filter_set
from trendcycle.series import Month, TimeSeries


@pytest.fixture(scope="session")
def h13():
    return local_poly_filter(6, 3, henderson_kernel(6))


@pytest.fixture(scope="session")
def musgrave13():
    return musgrave_filter_set(6, 3.5)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240917)


def make_series(values, start=Month(2018, 1)):
    return TimeSeries(start, np.asarray(values, dtype=float))


@pytest.fixture()
def series_factory():
    return make_series
