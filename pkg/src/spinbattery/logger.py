"""Package logging: a console handler plus an optional rotating log file."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

PACKAGE_LOGGER = "spinbattery"


def _level(name: str) -> int:
    return getattr(logging, name.upper())


def setup_logging(
    log_level: str = "INFO",
    log_file: str | Path | None = "spinbattery.log",
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    max_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    console_level: str = "WARNING",
) -> logging.Logger:
    """Configure the `spinbattery` logger tree.

    Calling it again replaces (and closes) the handlers of the previous call,
    so repeated CLI invocations in one process never leak file handles.

    Args:
        log_level: Level of the package logger and of the log file
        log_file: Rotating log file, or None to log to the console only
        log_format: Log message format
        max_size: Maximum log file size in bytes
        backup_count: Number of rotated files to keep
        console_level: Level of the stderr handler

    Returns:
        The package logger

    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(_level(log_level))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(log_format)
    console_handler = logging.StreamHandler()
    console_handler.setLevel(_level(console_level))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file is None:
        return logger

    try:
        file_handler = RotatingFileHandler(
            log_file, maxBytes=max_size, backupCount=backup_count, encoding="utf-8"
        )
    except OSError as e:
        logger.warning(f"Could not setup file logging: {e}")
        return logger
    file_handler.setLevel(_level(log_level))
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
    return logger


def get_logger(name: str | None = None) -> logging.Logger:
    """Module logger below the package logger, e.g. `spinbattery.evolution`."""
    return logging.getLogger(f"{PACKAGE_LOGGER}.{name}" if name else PACKAGE_LOGGER)
