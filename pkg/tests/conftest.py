import time

import pytest
from hypothesis import HealthCheck, settings

from helpers import LARGE_N, SUBINTERVAL
from sturm_rand import ComparisonSpec, anderson_model, run_experiment

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def default_model():
    return anderson_model()


@pytest.fixture(scope="session")
def subinterval_run(default_model):
    """The N = 1e4 subinterval experiment at master seed 0 and its wall time."""
    t0 = time.perf_counter()
    rep = run_experiment(default_model, ComparisonSpec.subinterval(*SUBINTERVAL), LARGE_N,
                         master_seed=0)
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="session")
def subinterval_report(subinterval_run):
    return subinterval_run[0]


@pytest.fixture(scope="session")
def coordinate_report(default_model):
    return run_experiment(default_model, ComparisonSpec.h_of_coordinate(0), LARGE_N,
                          master_seed=0)
