"""
⚙️ CONFIGURATION SETTINGS - Amputation Toolkit Configuration
"""

import os


def _env_float(name: str, default: float) -> float:
    return float(os.environ.get(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


class Config:
    """Application configuration settings"""

    # Logging settings
    DEBUG = os.environ.get('AMPUTE_DEBUG', 'False').lower() == 'true'
    LOG_LEVEL = os.environ.get('AMPUTE_LOG_LEVEL', 'DEBUG' if DEBUG else 'WARNING')
    LOG_FOLDER = os.environ.get('AMPUTE_LOG_FOLDER')  # unset: no log file

    # Copula settings
    PSD_TOLERANCE = _env_float('AMPUTE_PSD_TOLERANCE', 1e-10)
    UNIFORM_CLAMP = 1e-15
    SURVIVAL_IE_CAP = _env_int('AMPUTE_SURVIVAL_IE_CAP', 12)  # 2^12 terms
    MC_MIN_SAMPLES = 1000

    # Sampling settings (ROW_BLOCK_SIZE is part of the seed contract)
    ROW_BLOCK_SIZE = 1024
    WORKERS = _env_int('AMPUTE_WORKERS', 1)

    # Imputation settings
    RIDGE_LAMBDA = 1e-8
    MAX_CONDITION = 1e12  # above this X'X gets the ridge
    PMM_DONORS = 5
    PMM_IMPUTATIONS = 5
    PMM_ITERATIONS = 5
    BIAS_REPLICATIONS = 200

    # Rendering settings
    CELL_SIZE = _env_int('AMPUTE_CELL_SIZE', 16)
    DEFAULT_PALETTE = os.environ.get('AMPUTE_PALETTE', 'blues')
    MISSING_COLOR = '#cb181d'

    # Config file settings
    CONFIG_SCHEMA_VERSION = 1
    DATA_FOLDER = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')

    @classmethod
    def get_version(cls):
        """Get application version"""
        return "1.0.0"

    @classmethod
    def mtcars_path(cls):
        """Path of the vendored mtcars fixture"""
        return os.path.join(cls.DATA_FOLDER, 'mtcars.csv')
