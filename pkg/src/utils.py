"""
Utility functions for berrylab.

Includes helpers for logging setup, run naming, thread budgets and provenance.
"""

import logging
import os
import subprocess
from pathlib import Path
from typing import Optional, Union


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
PACKAGE_LOGGER = "src"


def configure_logging(level: Optional[Union[str, int]] = None) -> logging.Logger:
    """
    Install a single stream handler on the package logger.

    The level comes from the argument, else BERRYLAB_LOG_LEVEL, else WARNING.
    Calling it again only updates the level.
    """
    if level is None:
        level = os.getenv("BERRYLAB_LOG_LEVEL", "WARNING")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logger = logging.getLogger(PACKAGE_LOGGER)
    if not any(getattr(h, "_berrylab", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._berrylab = True
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger


def generate_run_id(kind: str, seed: int) -> str:
    """Deterministic run name, so repeated runs overwrite their own outputs."""
    return f"{kind}-seed{seed}"


def run_directory(out_dir: Union[str, Path], kind: str, seed: int) -> Path:
    return Path(out_dir) / generate_run_id(kind, seed)


def resolve_threads(requested: Optional[int] = None) -> int:
    """Thread budget: the request, else THREADS, else 1."""
    if requested is None:
        env = os.getenv("THREADS")
        requested = int(env) if env and env.isdigit() else 1
    return max(1, int(requested))


def git_describe(cwd: Optional[Union[str, Path]] = None) -> str:
    """`git describe --always --dirty`, or "unknown" outside a repository."""
    try:
        result = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                                text=True, timeout=10, cwd=cwd)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    out = result.stdout.strip()
    return out if result.returncode == 0 and out else "unknown"
