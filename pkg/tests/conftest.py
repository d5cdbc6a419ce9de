"""
Shared fixtures for the COPQ bench test suite.
"""
import logging
import os

os.environ.setdefault('COPQ_ENV', 'testing')

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from models.instance import QapInstance, TspInstance
from services.instance_loader import random_instance

settings.register_profile(
    'ci', max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile('dev', max_examples=20, deadline=None)
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'dev'))


@pytest.fixture(autouse=True)
def quiet_logging():
    logging.getLogger('services').setLevel(logging.WARNING)
    yield


@pytest.fixture
def uniform_tsp3():
    """Three cities, every distance 1: all tours cost 3."""
    return TspInstance(d=np.ones((3, 3)) - np.eye(3), name='uniform3')


@pytest.fixture
def square_tsp4():
    """Unit square with diagonals of length 2; optimum 4 along the perimeter."""
    d = [[0, 1, 2, 1],
         [1, 0, 1, 2],
         [2, 1, 0, 1],
         [1, 2, 1, 0]]
    return TspInstance(d=d, name='square4')


@pytest.fixture
def pair_qap():
    return QapInstance(b=[[0, 1], [1, 0]], c=[[0, 3], [3, 0]], name='pair')


@pytest.fixture
def tsp3():
    return random_instance('tsp', 3, 11)


@pytest.fixture
def qap3():
    return random_instance('qap', 3, 11)


@pytest.fixture
def max_qubits(monkeypatch):
    """Set COPQ_MAX_QUBITS for one test."""
    def set_cap(value: int):
        monkeypatch.setenv('COPQ_MAX_QUBITS', str(value))
    return set_cap
