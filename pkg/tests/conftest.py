"""Shared fixtures: canonical instances used across the test modules."""

import pytest

from coopsense.model import ProblemInstance

DEFAULT_GAMMA = (9e3, 1.2e4, 1.5e4)


def make_instance(
    gamma=DEFAULT_GAMMA,
    data_volume=20e6,
    workload=2.0,
    bandwidth=1e5,
    p_max=0.01,
    energy_budget=1.0,
):
    return ProblemInstance.from_parameters(
        gamma, data_volume, workload, bandwidth, p_max, energy_budget
    )


@pytest.fixture
def default_instance():
    """Three UAVs, slack energy: the documented reference scenario."""
    return make_instance()


@pytest.fixture
def tight_instance():
    """Same fleet with a binding 0.02 J budget."""
    return make_instance(energy_budget=0.02)


@pytest.fixture
def single_uav_instance():
    return make_instance(gamma=(9e3,))


@pytest.fixture
def two_uav_instance():
    return make_instance(gamma=DEFAULT_GAMMA[:2])
