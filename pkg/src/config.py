import os
from dotenv import load_dotenv

load_dotenv()


def _env_bool(name: str, default: str = 'false') -> bool:
    return os.getenv(name, default).strip().lower() in ('1', 'true', 'yes', 'on')


class Config:
    """Configuration management for the idempotent metric toolkit."""

    # Numerical tolerances
    TOLERANCE: float = float(os.getenv('IDEMETRIC_TOLERANCE', '1e-9'))
    TRIANGLE_TOLERANCE: float = float(os.getenv('IDEMETRIC_TRIANGLE_TOLERANCE', '1e-9'))

    # Oracle guard: exhaustive support search over at most this many pairs
    ORACLE_MAX_PAIRS: int = int(os.getenv('IDEMETRIC_ORACLE_MAX_PAIRS', '20'))

    # Reproducibility and output
    DEFAULT_SEED: int = int(os.getenv('IDEMETRIC_SEED', '20240229'))
    OUTPUT_DIGITS: int = int(os.getenv('IDEMETRIC_OUTPUT_DIGITS', '12'))

    # Convergence diagnostics
    STAR_EPS_X: float = float(os.getenv('IDEMETRIC_STAR_EPS_X', '1e-3'))
    STAR_EPS_LAMBDA: float = float(os.getenv('IDEMETRIC_STAR_EPS_LAMBDA', '1e-3'))
    TAIL_FRACTION: float = float(os.getenv('IDEMETRIC_TAIL_FRACTION', '0.25'))

    # Gram matrix fan-out
    GRAM_WORKERS: int = int(os.getenv('IDEMETRIC_GRAM_WORKERS', '1'))

    # Logging
    LOG_LEVEL: str = os.getenv('IDEMETRIC_LOG_LEVEL', 'WARNING').upper()
    LOG_TO_FILE: bool = _env_bool('IDEMETRIC_LOG_TO_FILE')

    # Directory Paths
    BASE_DIR: str = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    OUTPUTS_DIR: str = os.path.join(BASE_DIR, 'outputs')
    LOGS_DIR: str = os.path.join(BASE_DIR, 'logs')

    @classmethod
    def default_tail(cls, length: int) -> int:
        """Number of trailing sequence elements inspected by the convergence checks."""
        return max(1, int(round(length * cls.TAIL_FRACTION)))

    @classmethod
    def validate_config(cls) -> bool:
        """Validate that configured values are usable."""
        problems = []

        for key in ('TOLERANCE', 'TRIANGLE_TOLERANCE', 'STAR_EPS_X', 'STAR_EPS_LAMBDA'):
            if not getattr(cls, key) > 0:
                problems.append(key)

        if not 0 < cls.TAIL_FRACTION <= 1:
            problems.append('TAIL_FRACTION')
        if cls.ORACLE_MAX_PAIRS < 1:
            problems.append('ORACLE_MAX_PAIRS')
        if cls.OUTPUT_DIGITS < 1:
            problems.append('OUTPUT_DIGITS')
        if cls.GRAM_WORKERS < 1:
            problems.append('GRAM_WORKERS')

        if problems:
            raise ValueError(f"Invalid configuration values: {', '.join(problems)}")

        return True
