"""
Unit tests for logging setup, run naming and provenance helpers.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import logging
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from src.utils import PACKAGE_LOGGER, configure_logging, generate_run_id, git_describe, resolve_threads, run_directory


class TestUtils(unittest.TestCase):

    def test_run_naming(self):
        self.assertEqual(generate_run_id("cov-table", 3), "cov-table-seed3")
        self.assertEqual(run_directory("out", "disorder", 0), Path("out") / "disorder-seed0")

    def test_resolve_threads(self):
        self.assertEqual(resolve_threads(4), 4)
        self.assertEqual(resolve_threads(0), 1)
        with patch.dict(os.environ, {"THREADS": "3"}):
            self.assertEqual(resolve_threads(), 3)
        with patch.dict(os.environ, {"THREADS": "lots"}):
            self.assertEqual(resolve_threads(), 1)

    def test_configure_logging_is_idempotent(self):
        logger = configure_logging("DEBUG")
        count = len(logger.handlers)
        configure_logging("ERROR")
        self.assertEqual(len(logger.handlers), count)
        self.assertEqual(logger.level, logging.ERROR)
        self.assertEqual(logger.name, PACKAGE_LOGGER)
        configure_logging("nonsense")
        self.assertEqual(logger.level, logging.WARNING)

    def test_git_describe_outside_repository(self):
        with tempfile.TemporaryDirectory() as tmp:
            with patch.dict(os.environ, {"GIT_CEILING_DIRECTORIES": tmp}):
                self.assertEqual(git_describe(tmp), "unknown")


if __name__ == "__main__":
    unittest.main()
