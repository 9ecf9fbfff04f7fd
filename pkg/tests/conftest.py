import numpy as np
import pytest

from rovsim.dynamics import DragModel, Hydrostatics, MassMatrix
from rovsim.simengine import ScenarioConfig
from rovsim.teleop import LatencyProfile
from rovsim.vehicle import VehicleParams


@pytest.fixture
def default_params():
    return VehicleParams()


@pytest.fixture
def no_latency():
    """Commands take effect immediately: isolates the dynamics in trials."""
    return LatencyProfile(startup_range=(0.0, 0.0), nav_range=(0.0, 0.0))


@pytest.fixture
def fast_cfg(no_latency):
    """Short latency-free scenario for tests that only need a few sim-seconds."""
    return ScenarioConfig(latency=no_latency, max_time=10.0)


def random_pd_mass(rng: np.random.Generator) -> MassMatrix:
    """Random diagonal-plus-coupling mass matrix that passes the PD check."""
    m11 = rng.uniform(1.0, 15.0)
    m22 = rng.uniform(1.0, 15.0)
    m66 = rng.uniform(0.1, 3.0)
    m12 = rng.uniform(-0.2, 0.2) * min(m11, m22)
    m16 = rng.uniform(-0.2, 0.2) * min(m11, m66)
    m26 = rng.uniform(-0.2, 0.2) * min(m22, m66)
    return MassMatrix(m11=m11, m12=m12, m16=m16, m22=m22, m26=m26, m66=m66)
