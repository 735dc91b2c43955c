"""
Unit tests for composite quadrature and bump test functions.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math
import unittest

import numpy as np
from scipy import special

from src.bumps import TestFunction, bump_inner, bump_integral, bump_profile, parse_bump
from src.errors import DomainError, QuadratureAccuracyError
from src.quadrature import (
    adaptive_panel_integrate, adaptive_tensor_integrate, composite_nodes, gauss_legendre, panel_count,
    panel_rule,
)


# int_{-1}^{1} exp(-1 / (1 - u^2)) du
PROFILE_INTEGRAL = 0.44399381616807943


class TestRules(unittest.TestCase):

    def test_gauss_legendre_exact_for_polynomials(self):
        x, w = gauss_legendre(8)
        self.assertAlmostEqual(float(w @ x ** 14), 2.0 / 15.0, places=14)
        with self.assertRaises(ValueError):
            x[0] = 1.0

    def test_panel_count(self):
        self.assertEqual(panel_count(1.0, 0.25), 4)
        self.assertEqual(panel_count(1.0, 0.3), 4)
        self.assertEqual(panel_count(0.0, 0.3), 0)
        self.assertEqual(panel_count(1e-9, 0.3), 1)

    def test_composite_nodes(self):
        x, w = composite_nodes(0.0, 2.0, 5, 4)
        self.assertEqual(x.size, 20)
        self.assertAlmostEqual(float(w.sum()), 2.0)
        self.assertTrue(np.all((x > 0) & (x < 2)))
        self.assertEqual(composite_nodes(1.0, 1.0, 3)[0].size, 0)

    def test_breakpoints_split_panels(self):
        x, _ = panel_rule(0.0, 1.0, 1.0, order=4, breakpoints=(0.3, 5.0))
        self.assertEqual(x.size, 8)
        self.assertEqual(int(np.sum(x < 0.3)), 4)


class TestAdaptive(unittest.TestCase):

    def test_oscillatory_bessel_integral(self):
        value = adaptive_panel_integrate(lambda x: special.j0(x), 0.0, 200.0, math.pi)
        x, w = composite_nodes(0.0, 200.0, 2000, 16)
        self.assertAlmostEqual(value, float(w @ special.j0(x)), delta=1e-10)

    def test_reversed_limits(self):
        f = np.cos
        self.assertAlmostEqual(adaptive_panel_integrate(f, 1.0, 0.0, 0.5), -math.sin(1.0), delta=1e-12)
        self.assertEqual(adaptive_panel_integrate(f, 1.0, 1.0, 0.5), 0.0)

    def test_kink_with_breakpoint(self):
        f = lambda x: np.abs(x - 0.3)
        value = adaptive_panel_integrate(f, 0.0, 1.0, 0.5, breakpoints=(0.3,))
        self.assertAlmostEqual(value, 0.5 * (0.3 ** 2 + 0.7 ** 2), delta=1e-13)

    def test_nonconvergence_raises(self):
        with self.assertRaises(QuadratureAccuracyError) as ctx:
            adaptive_panel_integrate(lambda x: np.sign(x - 0.3), 0.0, 1.0, 0.5, tol=1e-15, max_doublings=2)
        self.assertGreater(ctx.exception.achieved_error, 1e-15)
        self.assertEqual(ctx.exception.tolerance, 1e-15)

    def test_tensor_rule(self):
        f = lambda x, y: np.cos(x) * np.exp(y)
        value = adaptive_tensor_integrate(f, (0.0, 1.0), (0.0, 2.0), 0.5)
        self.assertAlmostEqual(value, math.sin(1.0) * (math.e ** 2 - 1.0), delta=1e-10)
        self.assertEqual(adaptive_tensor_integrate(f, (0.0, 0.0), (0.0, 2.0), 0.5), 0.0)


class TestBumps(unittest.TestCase):

    def test_profile(self):
        self.assertAlmostEqual(float(bump_profile(0.0)), math.exp(-1.0))
        np.testing.assert_array_equal(bump_profile(np.array([-1.0, 1.0, 2.0])), 0.0)

    def test_integral(self):
        phi = TestFunction((0.5, 0.5), (0.2, 0.1), amplitude=3.0)
        self.assertAlmostEqual(bump_integral(phi), 3.0 * 0.02 * PROFILE_INTEGRAL ** 2, delta=1e-9)

    def test_inner_product(self):
        phi = TestFunction((0.5, 0.5), (0.2, 0.2))
        scaled = TestFunction((0.5, 0.5), (0.2, 0.2), amplitude=-2.0)
        self.assertAlmostEqual(bump_inner(phi, scaled), -2.0 * bump_inner(phi, phi))
        self.assertEqual(bump_inner(phi, TestFunction((0.1, 0.1), (0.05, 0.05))), 0.0)

    def test_support_checks(self):
        self.assertAlmostEqual(TestFunction((0.5, 0.4), (0.1, 0.2)).support.y1, 0.6)
        TestFunction((0.5, 0.5), (0.3, 0.3)).require_inside_unit_square()
        with self.assertRaises(DomainError):
            TestFunction((0.2, 0.5), (0.2, 0.1)).require_inside_unit_square()
        with self.assertRaises(DomainError):
            TestFunction((0.5, 0.5), (0.0, 0.1))

    def test_parse(self):
        phi = parse_bump({"center": [0.4, 0.6], "radius": 0.1})
        self.assertEqual(phi.radius, (0.1, 0.1))
        self.assertEqual(phi.amplitude, 1.0)
        self.assertEqual(parse_bump({"center": [0.4, 0.6], "radius": [0.1, 0.2], "amplitude": 2}).radius,
                         (0.1, 0.2))
        for bad in ({"radius": 0.1}, {"center": [0.4], "radius": 0.1}, {"center": [0.4, 0.6], "radius": "x"}):
            with self.assertRaises(DomainError):
                parse_bump(bad)


if __name__ == "__main__":
    unittest.main()
