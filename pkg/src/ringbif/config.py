"""
Environment-driven settings.

RINGBIF_THREADS caps the worker pool used by parameter sweeps;
RINGBIF_LOG_LEVEL sets the default CLI log level.
"""

import logging
import os

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORKERS = 8


def worker_count() -> int:
    """Number of worker threads for per-k sweeps."""
    default = min(DEFAULT_MAX_WORKERS, os.cpu_count() or 1)
    raw = os.getenv("RINGBIF_THREADS")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring RINGBIF_THREADS=%r (not an integer)", raw)
        return default
    if value < 1:
        logger.warning("Ignoring RINGBIF_THREADS=%r (must be >= 1)", raw)
        return default
    return value


LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def log_level() -> str:
    """Default CLI log level name."""
    raw = os.getenv("RINGBIF_LOG_LEVEL", "WARNING").upper()
    if raw not in LOG_LEVELS:
        logger.warning("Ignoring RINGBIF_LOG_LEVEL=%r (use one of %s)", raw, ", ".join(LOG_LEVELS))
        return "WARNING"
    return raw
