"""
Centralized numerical configuration.

This module loads worker limits, the rank threshold and the log level
from environment variables and exposes a single shared instance.
"""

import os
import logging
from enum import Enum

logger = logging.getLogger(__name__)


class CommandKind(str, Enum):
    """Sub-commands exposed by the command-line driver."""
    LINDBLAD = "lindblad"
    DEC_SPECTRUM = "dec-spectrum"
    ALGEBRA_CHECK = "algebra-check"
    FISHER = "fisher"


class OutputFormat(str, Enum):
    """Supported table output formats."""
    CSV = "csv"
    JSON = "json"


DEFAULT_RANK_EPS = 1e-10
DEFAULT_LOG_LEVEL = "WARNING"


class NumericsConfig:
    """Configuration manager for numerical runs."""

    def __init__(self):
        """Initialize configuration from environment variables."""
        default_workers = os.cpu_count() or 1
        raw_threads = os.getenv("STRATAFOLD_THREADS")
        self.max_workers = default_workers
        if raw_threads:
            try:
                self.max_workers = int(raw_threads)
                if self.max_workers < 1:
                    raise ValueError(raw_threads)
            except ValueError:
                logger.warning(
                    f"Invalid STRATAFOLD_THREADS '{raw_threads}', defaulting to {default_workers}"
                )
                self.max_workers = default_workers

        raw_eps = os.getenv("STRATAFOLD_RANK_EPS", str(DEFAULT_RANK_EPS))
        try:
            self.rank_eps = float(raw_eps)
            if not self.rank_eps > 0:
                raise ValueError(raw_eps)
        except ValueError:
            logger.warning(f"Invalid STRATAFOLD_RANK_EPS '{raw_eps}', defaulting to {DEFAULT_RANK_EPS}")
            self.rank_eps = DEFAULT_RANK_EPS

        level = os.getenv("STRATAFOLD_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
        if not isinstance(logging.getLevelName(level), int):
            logger.warning(f"Invalid STRATAFOLD_LOG_LEVEL '{level}', defaulting to {DEFAULT_LOG_LEVEL}")
            level = DEFAULT_LOG_LEVEL
        self.log_level = level

        self._log_config_status()

    def _log_config_status(self):
        """Log the resolved numerical settings."""
        logger.info("Numerics Configuration:")
        logger.info(f"  Max workers: {self.max_workers}")
        logger.info(f"  Rank threshold: {self.rank_eps:g}")
        logger.info(f"  Log level: {self.log_level}")

    def worker_count(self, jobs: int) -> int:
        """Number of workers to use for `jobs` independent tasks."""
        return max(1, min(self.max_workers, jobs))


# Global configuration instance
numerics_config = NumericsConfig()
