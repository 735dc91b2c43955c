"""
Unit tests for the replication engine.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import unittest

import numpy as np

from src.errors import ConfigurationError
from src.field import sample_field
from src.geometry import RectDomain, rect_boundary_chain
from src.montecarlo import covariance_matrix_experiment, run_replications, sup_moment_scan


def point_value(i: int):
    field = sample_field(100.0, None, 3, i)
    return {"rep": i, "value": float(field.values(np.array([0.2]), np.array([0.3]))[0])}


class TestRunReplications(unittest.TestCase):

    def test_index_order(self):
        rows = run_replications(lambda i: {"i": i}, 10, threads=3)
        self.assertEqual([r["i"] for r in rows], list(range(10)))

    def test_independent_of_threads(self):
        serial = run_replications(point_value, 12, threads=1)
        pooled = run_replications(point_value, 12, threads=4)
        self.assertEqual(serial, pooled)

    def test_empty(self):
        self.assertEqual(run_replications(point_value, 0, threads=2), [])


class TestSupMomentScan(unittest.TestCase):

    def test_needs_four_energies(self):
        with self.assertRaises(ConfigurationError):
            sup_moment_scan([100.0, 200.0, 400.0])

    def test_needs_sorted_energies(self):
        with self.assertRaises(ConfigurationError):
            sup_moment_scan([100.0, 400.0, 200.0, 800.0])

    def test_small_scan(self):
        report = sup_moment_scan([20.0, 40.0, 80.0, 160.0], n_reps=3, seed=1)
        self.assertEqual(len(report.means), 4)
        self.assertTrue(all(m > 0 for m in report.means))
        self.assertIn("fit", report.to_dict())


class TestCovarianceMatrixExperiment(unittest.TestCase):

    def test_needs_two_targets(self):
        with self.assertRaises(ConfigurationError):
            covariance_matrix_experiment([RectDomain.unit()], 100.0, 4)

    def test_rectangles(self):
        exp = covariance_matrix_experiment([RectDomain.unit(), RectDomain.anchored(0.5, 0.5)], 100.0, 4, seed=2)
        self.assertEqual(exp.kind, "rects")
        self.assertEqual(exp.samples.shape, (4, 2))
        self.assertEqual(exp.comparison.target, [[1.0, 0.25], [0.25, 0.25]])

    def test_chains(self):
        chains = [rect_boundary_chain(RectDomain.unit()), rect_boundary_chain(RectDomain.anchored(0.5, 1.0))]
        exp = covariance_matrix_experiment(chains, 100.0, 3, seed=2)
        self.assertEqual(exp.kind, "chains")
        self.assertAlmostEqual(exp.comparison.target[0][1], 2.0)

    def test_points(self):
        exp = covariance_matrix_experiment([(0.5, 0.5), (1.0, 1.0)], 100.0, 3, seed=2, K=2)
        self.assertEqual(exp.kind, "points")
        self.assertEqual(exp.comparison.target, [[0.25, 0.25], [0.25, 1.0]])

    def test_reproducible(self):
        a = covariance_matrix_experiment([(0.5, 0.5), (1.0, 1.0)], 100.0, 3, seed=5, K=2)
        b = covariance_matrix_experiment([(0.5, 0.5), (1.0, 1.0)], 100.0, 3, seed=5, K=2, threads=3)
        np.testing.assert_array_equal(a.samples, b.samples)


if __name__ == "__main__":
    unittest.main()
