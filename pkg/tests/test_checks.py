"""
Unit tests for the self-check registry.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import unittest

from src.checks import (
    Check, CheckConfig, CheckGroup, CheckRegistry, CheckResult, get_check_registry, reset_check_registry,
)


class Exploding(Check):
    def run(self):
        raise RuntimeError("boom")


class Passing(Check):
    def run(self):
        return self.result(True, "fine")


class TestCheckRegistry(unittest.TestCase):

    def setUp(self):
        reset_check_registry()

    def tearDown(self):
        reset_check_registry()

    def test_default_checks_in_every_group(self):
        registry = get_check_registry()
        for group in CheckGroup:
            self.assertGreater(len(registry.list_checks(group)), 0)
        names = [c.name for c in registry.list_checks()]
        self.assertIn("bessel-recurrence", names)
        self.assertIn("helmholtz", names)
        self.assertIn("split-invariance", names)
        self.assertEqual(len(names), len(set(names)))

    def test_groups_partition_checks(self):
        registry = get_check_registry()
        total = sum(len(registry.list_checks(g)) for g in CheckGroup)
        self.assertEqual(total, len(registry.list_checks()))
        self.assertTrue(all(c.group == CheckGroup.GEOMETRY for c in registry.list_checks("geometry")))

    def test_parameters_reach_checks(self):
        check = get_check_registry().get_check("bessel-recurrence")
        self.assertEqual(check.config.parameters["tol"], 1e-10)
        self.assertEqual(check.description, "J0 + J2 = 2 J1 / x")

    def test_exception_becomes_failure(self):
        registry = CheckRegistry()
        registry.register_check(Exploding(CheckConfig("explodes", CheckGroup.FIELD, "raises")))
        with self.assertLogs("src.checks", level="WARNING"):
            result = registry.run_check("explodes")
        self.assertFalse(result.passed)
        self.assertIn("RuntimeError", result.error)
        self.assertTrue(result.line().startswith("FAIL explodes"))

    def test_unknown_check(self):
        result = CheckRegistry().run_check("missing")
        self.assertFalse(result.passed)
        self.assertIn("not found", result.error)

    def test_disabled_config_is_skipped(self):
        registry = CheckRegistry()
        registry.register_config(CheckConfig("off", CheckGroup.SPECIAL, "disabled", enabled=False), Passing)
        self.assertIsNone(registry.get_check("off"))

    def test_run_group(self):
        registry = CheckRegistry()
        registry.register_config(CheckConfig("ok", CheckGroup.SPECIAL, "passes"), Passing)
        registry.register_config(CheckConfig("other", CheckGroup.GEOMETRY, "passes"), Passing)
        results = registry.run_group(CheckGroup.SPECIAL)
        self.assertEqual([r.line() for r in results], ["PASS ok: fine"])
        with self.assertRaises(ValueError):
            registry.run_group("plumbing")

    def test_result_line(self):
        self.assertEqual(CheckResult("x", True).line(), "PASS x")


class TestDefaultChecks(unittest.TestCase):

    def setUp(self):
        reset_check_registry()

    def tearDown(self):
        reset_check_registry()

    def test_special_group_passes(self):
        results = get_check_registry().run_group(CheckGroup.SPECIAL)
        self.assertTrue(all(r.passed for r in results), [r.line() for r in results if not r.passed])

    def test_geometry_group_passes(self):
        results = get_check_registry().run_group(CheckGroup.GEOMETRY)
        self.assertTrue(all(r.passed for r in results), [r.line() for r in results if not r.passed])

    @unittest.skipUnless(os.getenv("BERRYLAB_SLOW"), "slow Monte Carlo check")
    def test_field_group_passes(self):
        results = get_check_registry().run_group(CheckGroup.FIELD)
        self.assertTrue(all(r.passed for r in results), [r.line() for r in results if not r.passed])


if __name__ == "__main__":
    unittest.main()
