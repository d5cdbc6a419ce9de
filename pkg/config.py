"""
Configuration settings for COPQ bench.
"""
import os
from pathlib import Path

# Base directory
BASE_DIR = Path(__file__).parent.absolute()


class Config:
    """Base configuration."""
    DEBUG = False
    TESTING = False

    # Logging
    LOG_LEVEL = os.getenv('COPQ_LOG_LEVEL', 'INFO')
    LOG_DIR = Path(os.getenv('COPQ_LOG_DIR', str(BASE_DIR / 'logs')))
    LOG_TO_FILE = os.getenv('COPQ_LOG_FILE', 'false').lower() == 'true'
    LOG_MAX_BYTES = 10 * 1024 * 1024  # 10MB
    LOG_BACKUP_COUNT = 5

    # Size guards
    BRUTE_FORCE_MAX_SIZE = 9  # n! permutations
    BNB_MAX_SIZE = 12
    GROUND_STATE_MAX_QUBITS = 20  # 2^q basis states
    DEFAULT_MAX_QUBITS = 16
    HARD_MAX_QUBITS = 25
    UNITARY_MAX_QUBITS = 10

    # Simulated annealing
    SA_MAX_CHAINS = 10000
    SA_FLOOR_MODE = 'absolute'

    # SPSA schedule
    SPSA_A = 0.2
    SPSA_C = 0.1
    SPSA_ALPHA = 0.602
    SPSA_GAMMA = 0.101

    # Variational runs
    DEFAULT_SHOTS = 1024
    DEFAULT_VQE_REPS = 1
    DEFAULT_QAOA_P = 3
    DEFAULT_SPSA_MAXITER = 100

    # Benchmark harness
    DEFAULT_TRIALS = 30
    DEFAULT_WORKERS = int(os.getenv('COPQ_WORKERS', '1'))
    REPORT_SCHEMA_VERSION = '1.0'
    SHOW_PROGRESS = True

    @classmethod
    def max_qubits(cls) -> int:
        """Simulator width cap; COPQ_MAX_QUBITS is read on every call."""
        raw = os.getenv('COPQ_MAX_QUBITS')
        if raw is None or not raw.strip():
            return cls.DEFAULT_MAX_QUBITS
        return int(raw)


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    LOG_TO_FILE = False
    SHOW_PROGRESS = False


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config():
    """Return the configuration class selected by COPQ_ENV."""
    return config.get(os.getenv('COPQ_ENV', 'default'), DevelopmentConfig)
