"""
Unit tests for replication estimators and diagnostics.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math
import unittest

import numpy as np

from src.errors import DiagnosticError, DomainError
from src.estimators import (
    clt_diagnostics, compare_covariance, covariance_se, empirical_cdf, fit_linear,
    jackknife_variance_se, overlapping_intervals, summarize, variance_standard_error,
)


class TestSummarize(unittest.TestCase):

    def test_known_sample(self):
        s = summarize([1.0, 2.0, 3.0, 4.0])
        self.assertEqual(s.n, 4)
        self.assertAlmostEqual(s.mean[0], 2.5)
        self.assertAlmostEqual(s.variance[0], 5.0 / 3.0)
        self.assertAlmostEqual(s.se_mean[0], math.sqrt(5.0 / 12.0))
        self.assertAlmostEqual(s.se_variance[0], 5.0 / 3.0 * math.sqrt(2.0 / 3.0))
        self.assertEqual(s.columns, ["c0"])

    def test_columns_and_covariance(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((500, 2))
        s = summarize(x, columns=["a", "b"])
        np.testing.assert_allclose(s.covariance, np.cov(x, rowvar=False), atol=1e-12)
        self.assertEqual(s.column("b")["variance"], s.variance[1])
        with self.assertRaises(KeyError):
            s.column("z")

    def test_rejects_bad_input(self):
        with self.assertRaises(DomainError):
            summarize([1.0])
        with self.assertRaises(DomainError):
            summarize([1.0, float("nan")])
        with self.assertRaises(DomainError):
            summarize(np.zeros((3, 2)), columns=["only"])

    def test_constant_sample(self):
        s = summarize([2.0] * 10)
        self.assertEqual(s.variance[0], 0.0)
        self.assertEqual(s.skewness[0], 0.0)


class TestJackknife(unittest.TestCase):

    def test_matches_explicit_leave_one_out(self):
        rng = np.random.default_rng(1)
        x = rng.exponential(size=40)
        loo = np.array([np.var(np.delete(x, i), ddof=1) for i in range(x.size)])
        expected = math.sqrt((x.size - 1) / x.size * np.sum((loo - loo.mean()) ** 2))
        self.assertAlmostEqual(float(jackknife_variance_se(x)[0]), expected, delta=1e-12)

    def test_heavy_tails_use_jackknife(self):
        rng = np.random.default_rng(2)
        s = summarize(rng.standard_t(3, size=2000), jackknife=True)
        if abs(s.excess_kurtosis[0]) > 1.0:
            with self.assertLogs("src.estimators", level="WARNING"):
                self.assertEqual(variance_standard_error(s), s.se_variance_jackknife[0])

    def test_gaussian_without_jackknife(self):
        s = summarize([0.1, -0.3, 0.2, 0.5])
        self.assertEqual(variance_standard_error(s), s.se_variance[0])


class TestDiagnostics(unittest.TestCase):

    def test_gaussian_sample_passes(self):
        rng = np.random.default_rng(3)
        report = clt_diagnostics(rng.standard_normal(2000))
        self.assertTrue(report.passed)
        self.assertEqual(report.n, 2000)

    def test_skewed_sample_fails(self):
        rng = np.random.default_rng(4)
        self.assertFalse(clt_diagnostics(rng.exponential(size=2000)).passed)

    def test_requires_samples(self):
        with self.assertRaises(DiagnosticError):
            clt_diagnostics(np.arange(50.0))
        with self.assertRaises(DiagnosticError):
            clt_diagnostics(np.ones(200))


class TestComparison(unittest.TestCase):

    def test_covariance_se_formula(self):
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        se = covariance_se(cov, 101)
        self.assertAlmostEqual(se[0, 1], math.sqrt((2.0 + 0.25) / 100))
        self.assertAlmostEqual(se[0, 0], math.sqrt(8.0 / 100))

    def test_compare_against_truth(self):
        rng = np.random.default_rng(5)
        target = np.array([[1.0, 0.6], [0.6, 2.0]])
        x = rng.multivariate_normal([0.0, 0.0], target, size=4000)
        self.assertTrue(compare_covariance(x, target).passed)
        self.assertFalse(compare_covariance(x, 2 * target).passed)

    def test_shape_mismatch(self):
        with self.assertRaises(DomainError):
            compare_covariance(np.zeros((10, 2)), np.eye(3))

    def test_fit_linear(self):
        fit = fit_linear([1.0, 2.0, 3.0, 4.0], [3.0, 5.0, 7.0, 9.0])
        self.assertAlmostEqual(fit.slope, 2.0)
        self.assertAlmostEqual(fit.intercept, 1.0)
        self.assertAlmostEqual(fit.r_squared, 1.0)
        with self.assertRaises(DomainError):
            fit_linear([1.0, 2.0], [1.0, 2.0])

    def test_empirical_cdf(self):
        self.assertEqual(empirical_cdf([3.0, 1.0, 2.0, 2.0], [0.0, 2.0, 5.0]), [0.0, 0.75, 1.0])

    def test_overlapping_intervals(self):
        self.assertTrue(overlapping_intervals(1.0, 0.1, 1.3, 0.1))
        self.assertFalse(overlapping_intervals(1.0, 0.01, 1.3, 0.01))


if __name__ == "__main__":
    unittest.main()
