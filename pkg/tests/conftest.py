"""Shared fixtures for the search simulator tests"""
import numpy as np
import pytest

from environment.geometry import Environment
from filtering.phd_filter import FilterConfig
from sensors.fov_sensor import FovCameraSensor
from sensors.omni_sensor import OmniRangeSensor, SensorConfig3D
from targets.found_targets import Thresholds


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run slow acceptance tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def env3d():
    return Environment(lower=(0.0, 0.0, 0.0), upper=(100.0, 100.0, 100.0))


@pytest.fixture
def env2d():
    return Environment(lower=(-0.3, -0.3, 1.0), upper=(2.0, 2.0, 1.0))


@pytest.fixture
def sensor():
    """Default field-of-view constants with a small noise level"""
    return OmniRangeSensor(SensorConfig3D(G=0.98, F=(25.0, 25.0, 25.0), sigma=0.05))


@pytest.fixture
def camera():
    return FovCameraSensor()


@pytest.fixture
def filter_cfg():
    return FilterConfig()


@pytest.fixture
def thresholds():
    return Thresholds(T_r=2.0, T_m=0.5, T_z=5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
