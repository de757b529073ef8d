"""Logging setup for the hstobit command line."""

from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: int | str = logging.INFO, log_dir: str | Path | None = None) -> None:
    """Configure the root logger with a console handler.

    With ``log_dir``, also write a rotating run log and a WARNING-level
    log of clamps, failed replicates and other problems.
    """
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(level.upper() if isinstance(level, str) else level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_dir is None:
        return

    base = Path(log_dir)
    base.mkdir(parents=True, exist_ok=True)

    # 10MB max size, keep 5 backups
    file_handler = RotatingFileHandler(base / "hstobit.log", maxBytes=10 * 1024 * 1024, backupCount=5)
    file_handler.setFormatter(formatter)
    root_logger.addHandler(file_handler)

    warning_handler = RotatingFileHandler(base / "warnings.log", maxBytes=10 * 1024 * 1024, backupCount=3)
    warning_handler.setLevel(logging.WARNING)
    warning_handler.setFormatter(formatter)
    root_logger.addHandler(warning_handler)
