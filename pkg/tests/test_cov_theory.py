"""
Unit tests for the covariance oracles.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import math
import unittest
from unittest.mock import patch

import numpy as np
from scipy import special, stats

from src.bumps import TestFunction
from src.cov_theory import (
    COVTABLE_COLUMNS, a_term, asymptotic_cov, b_term, boundary_sup_cdf, brute_force_a_term,
    brute_force_b_term, covtable_rows, disorder_sigma, exact_cov_chains, exact_cov_segments,
    inner_g_closed, kernel_g1, kernel_h, parallel_kernel, psd_report, reduced_cov_segments,
    segment_pair_config, sheet_boundary_overlap, whitenoise_cov, wiener_sheet_cov,
)
from src.errors import DomainError
from src.geometry import OrientedSegment, PolygonalChain, RectDomain, make_chain, rect_boundary_chain
from src.quadrature import composite_nodes


LEADING = 16.0 * math.pi ** 2


def unit_chain(seg: OrientedSegment) -> PolygonalChain:
    return make_chain([seg])


class TestKernels(unittest.TestCase):

    def test_g1_against_scipy(self):
        tau = np.linspace(1e-3, 50.0, 500)
        np.testing.assert_allclose(kernel_g1(tau), special.j0(tau) * special.j1(tau) / tau, atol=1e-12)
        self.assertAlmostEqual(float(kernel_g1(np.array(0.0))), 0.5)

    def test_h_against_scipy(self):
        tau = np.linspace(2e-3, 50.0, 500)
        expected = (special.j0(tau) * special.jv(2, tau) + special.j1(tau) ** 2) / tau ** 2
        np.testing.assert_allclose(kernel_h(tau), expected, atol=1e-9)
        self.assertAlmostEqual(float(kernel_h(np.array(0.0))), 0.375)

    def test_h_continuous_at_switch(self):
        lo, hi = kernel_h(np.array([0.999e-3, 1.001e-3]))
        self.assertAlmostEqual(lo, hi, delta=1e-9)

    def test_inner_closed_form(self):
        psi = 7.3
        x, w = composite_nodes(0.0, psi, 40, 8)
        numeric = float(w @ (x * (special.j0(x) * special.jv(2, x) + special.j1(x) ** 2)))
        self.assertAlmostEqual(float(inner_g_closed(np.array(psi))), numeric, delta=1e-12)


class TestSegmentCovariance(unittest.TestCase):

    def test_canonical_frame(self):
        s1 = OrientedSegment((1.0, 1.0), math.pi / 2, 2.0)
        s2 = OrientedSegment((0.0, 2.0), math.pi, 1.0)
        cfg = segment_pair_config(s1, s2)
        self.assertAlmostEqual(cfg.offset[0], 1.0)
        self.assertAlmostEqual(cfg.offset[1], 1.0)
        self.assertAlmostEqual(cfg.theta, math.pi / 2)
        self.assertFalse(cfg.parallel)

    def test_parallel_gap(self):
        cfg = segment_pair_config(OrientedSegment((0, 0), 0.0, 1.0), OrientedSegment((0.2, 0.3), math.pi, 1.0))
        self.assertTrue(cfg.parallel)
        self.assertAlmostEqual(cfg.gap, 0.3)

    def test_diagonal_matches_leading_order(self):
        seg = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        value = exact_cov_segments(seg, seg, 1e4)
        self.assertTrue(0.9 <= value * LEADING * 100.0 <= 1.1)

    def test_diagonal_convergence_law(self):
        seg = OrientedSegment((0.3, 0.1), 1.1, 1.0)
        ratios = [exact_cov_segments(seg, seg, e) * LEADING * math.sqrt(e) for e in (1e2, 1e3, 1e4, 1e5)]
        gaps = [abs(r - 1.0) for r in ratios]
        self.assertTrue(all(b < a for a, b in zip(gaps, gaps[1:])))
        self.assertLess(gaps[-1], 0.1)

    def test_rigid_motion_invariance(self):
        s1 = OrientedSegment((0.0, 0.0), 0.3, 0.8)
        s2 = OrientedSegment((0.5, -0.2), 1.9, 0.6)
        base = exact_cov_segments(s1, s2, 100.0)
        moved = exact_cov_segments(s1.rotated(0.7).translated(2.0, -1.0), s2.rotated(0.7).translated(2.0, -1.0), 100.0)
        self.assertAlmostEqual(base, moved, delta=1e-10)

    def test_symmetric(self):
        s1 = OrientedSegment((0.0, 0.0), 0.3, 0.8)
        s2 = OrientedSegment((0.5, -0.2), 1.9, 0.6)
        self.assertAlmostEqual(exact_cov_segments(s1, s2, 100.0), exact_cov_segments(s2, s1, 100.0), delta=1e-10)

    def test_split_additivity(self):
        s1 = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        s2 = OrientedSegment((0.2, 0.1), 2.0, 0.7)
        head, tail = s1.split(0.4)
        whole = exact_cov_segments(s1, s2, 100.0)
        parts = exact_cov_segments(head, s2, 100.0) + exact_cov_segments(tail, s2, 100.0)
        self.assertAlmostEqual(whole, parts, delta=1e-9)

    def test_reversal_negates(self):
        s1 = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        s2 = OrientedSegment((0.2, 0.1), 2.0, 0.7)
        self.assertAlmostEqual(exact_cov_segments(s1, s2.reversed(), 100.0), -exact_cov_segments(s1, s2, 100.0),
                               delta=1e-10)

    def test_decomposition_identity(self):
        for theta in (math.pi / 3, 2.0, math.pi / 2):
            s1 = OrientedSegment((0.0, 0.0), 0.0, 1.0)
            s2 = OrientedSegment((0.0, 0.0), theta, 0.7)
            exact = exact_cov_segments(s1, s2, 100.0)
            self.assertAlmostEqual(exact, a_term(1.0, 0.7, theta, 100.0) + b_term(1.0, 0.7, theta, 100.0),
                                   delta=1e-8)

    def test_reduction_to_common_origin(self):
        pairs = [
            (OrientedSegment((0.0, 0.0), 0.0, 1.0), OrientedSegment((0.3, -0.4), 1.2, 0.9)),
            (OrientedSegment((0.1, 0.2), 0.5, 0.6), OrientedSegment((1.0, 1.0), 3.0, 0.5)),
            (OrientedSegment((0.0, 0.0), 0.0, 1.0), OrientedSegment((0.4, 0.3), 0.0, 0.5)),
        ]
        for s1, s2 in pairs:
            self.assertAlmostEqual(reduced_cov_segments(s1, s2, 100.0), exact_cov_segments(s1, s2, 100.0),
                                   delta=1e-8)

    def test_chain_sum(self):
        c1 = rect_boundary_chain(RectDomain.anchored(0.5, 0.5))
        c2 = make_chain([OrientedSegment((0.2, 0.6), 0.0, 0.5)])
        total = sum(exact_cov_segments(s, t, 100.0) for s in c1 for t in c2)
        self.assertAlmostEqual(exact_cov_chains(c1, c2, 100.0), total, delta=1e-15)

    def test_rejects_nonpositive_energy(self):
        seg = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        with self.assertRaises(DomainError):
            exact_cov_segments(seg, seg, 0.0)

    @unittest.skipUnless(os.getenv("BERRYLAB_SLOW"), "slow quadrature check")
    def test_perpendicular_is_small(self):
        s1 = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        s2 = OrientedSegment((0.0, 0.0), math.pi / 2, 1.0)
        self.assertLessEqual(abs(exact_cov_segments(s1, s2, 1e4)) * LEADING * 100.0, 0.1)


class TestDecomposition(unittest.TestCase):

    def test_a_term_vanishes_at_right_angle(self):
        self.assertEqual(a_term(1.0, 1.0, math.pi / 2, 100.0), 0.0)

    def test_b_term_vanishes_for_parallel(self):
        self.assertEqual(b_term(1.0, 1.0, 0.0, 100.0), 0.0)
        self.assertEqual(b_term(1.0, 0.5, math.pi, 100.0), 0.0)

    def test_against_brute_force(self):
        for theta in (math.pi / 4, 1.2, 2.5):
            self.assertAlmostEqual(a_term(1.0, 0.8, theta, 100.0), brute_force_a_term(1.0, 0.8, theta, 100.0),
                                   delta=1e-8)
            self.assertAlmostEqual(b_term(1.0, 0.8, theta, 100.0), brute_force_b_term(1.0, 0.8, theta, 100.0),
                                   delta=1e-8)

    def test_parallel_a_term_matches_exact(self):
        seg = OrientedSegment((0.0, 0.0), 0.0, 1.0)
        other = OrientedSegment((0.0, 0.0), 0.0, 0.6)
        self.assertAlmostEqual(a_term(1.0, 0.6, 0.0, 100.0), exact_cov_segments(seg, other, 100.0), delta=1e-10)

    def test_a_term_rate(self):
        energies = np.array([1e2, 1e3, 1e4])
        values = np.array([abs(a_term(1.0, 1.0, math.pi / 4, e)) for e in energies])
        slope = np.polyfit(np.log(energies), np.log(values), 1)[0]
        self.assertTrue(-1.2 <= slope <= -0.8, slope)

    def test_b_term_rate(self):
        energies = np.array([1e2, 1e3, 1e4])
        values = np.array([abs(b_term(1.0, 1.0, math.pi / 2, e)) for e in energies])
        slope = np.polyfit(np.log(energies), np.log(values), 1)[0]
        self.assertTrue(-1.2 <= slope <= -0.8, slope)

    def test_invalid_lengths(self):
        with self.assertRaises(DomainError):
            a_term(0.0, 1.0, 1.0, 100.0)


class TestParallelKernel(unittest.TestCase):

    def test_bound(self):
        u = np.linspace(-1.0, 2.0, 61)
        for L in (0.0, 0.01, 0.3):
            values = parallel_kernel(u, L, 0.2, 0.9, 100.0)
            self.assertTrue(np.all(np.abs(values) <= 0.7 + 1e-12))

    def test_scalar_input(self):
        self.assertIsInstance(parallel_kernel(0.5, 0.0, 0.0, 1.0, 100.0), float)

    def test_zero_gap_matches_quadrature(self):
        closed = parallel_kernel(np.array([0.3, 0.7]), 0.0, 0.0, 1.0, 100.0)
        numeric = parallel_kernel(np.array([0.3, 0.7]), 1e-12, 0.0, 1.0, 100.0)
        np.testing.assert_allclose(closed, numeric, atol=1e-10)

    def test_large_gap_decays(self):
        energy = 100.0
        L = 1000.0 / (2 * math.pi * math.sqrt(energy))
        self.assertLess(abs(parallel_kernel(0.5, L, 0.0, 1.0, energy)) * math.sqrt(energy), 1e-2)

    def test_diagonal_limit(self):
        energy = 1e4
        u, w = composite_nodes(0.0, 1.0, 400, 8)
        value = float(w @ (math.sqrt(energy) * parallel_kernel(u, 0.0, 0.0, 1.0, energy))) / 32.0
        self.assertAlmostEqual(value * LEADING, 1.0, delta=0.1)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            parallel_kernel(0.5, -1.0, 0.0, 1.0, 100.0)
        with self.assertRaises(DomainError):
            parallel_kernel(0.5, 0.0, 1.0, 1.0, 100.0)


class TestLimits(unittest.TestCase):

    def test_asymptotic_unit_segment(self):
        chain = unit_chain(OrientedSegment((0.0, 0.0), 0.0, 1.0))
        self.assertAlmostEqual(asymptotic_cov(chain, chain, 1.0), 6.3326e-3, places=6)

    def test_asymptotic_disjoint_and_symmetric(self):
        a = unit_chain(OrientedSegment((0.0, 0.0), 0.0, 1.0))
        c = rect_boundary_chain(RectDomain.anchored(0.5, 0.5))
        self.assertEqual(asymptotic_cov(a, unit_chain(OrientedSegment((0.0, 2.0), 1.0, 1.0)), 100.0), 0.0)
        self.assertAlmostEqual(asymptotic_cov(a, c, 100.0), asymptotic_cov(c, a, 100.0), delta=1e-15)

    def test_wiener_sheet(self):
        self.assertEqual(wiener_sheet_cov((1.0, 1.0), (1.0, 1.0)), 1.0)
        self.assertEqual(wiener_sheet_cov((0.5, 0.5), (0.25, 0.75)), 0.125)
        self.assertEqual(wiener_sheet_cov((0.0, 0.5), (0.3, 0.3)), 0.0)
        with self.assertRaises(DomainError):
            wiener_sheet_cov((1.5, 0.5), (0.3, 0.3))

    def test_sheet_boundary_overlap_matches_chains(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            t, s = np.round(rng.uniform(0.1, 1.0, (2, 2)), 1)
            if rng.uniform() < 0.3:
                s[0] = t[0]
            ct = rect_boundary_chain(RectDomain.anchored(*t))
            cs = rect_boundary_chain(RectDomain.anchored(*s))
            sigma = disorder_sigma([ct, cs])
            self.assertAlmostEqual(sheet_boundary_overlap(tuple(t), tuple(s)), sigma[0, 1], delta=1e-12)

    def test_sheet_boundary_overlap_shared_edge_up_to_rounding(self):
        t, s = (0.1 + 0.2, 0.5), (0.3, 0.8)
        self.assertNotEqual(t[0], s[0])
        self.assertAlmostEqual(sheet_boundary_overlap(t, s), 1.3, delta=1e-12)
        sigma = disorder_sigma([rect_boundary_chain(RectDomain.anchored(*p)) for p in (t, s)])
        self.assertAlmostEqual(sheet_boundary_overlap(t, s), sigma[0, 1], delta=1e-12)

    def test_disorder_sigma(self):
        full = rect_boundary_chain(RectDomain.unit())
        half = rect_boundary_chain(RectDomain.anchored(0.5, 1.0))
        sigma = disorder_sigma([full, half])
        self.assertAlmostEqual(sigma[0, 0], 4.0)
        self.assertAlmostEqual(sigma[0, 1], 2.0)
        self.assertEqual(disorder_sigma([full]).shape, (1, 1))
        crossing = [unit_chain(OrientedSegment((0.0, 0.5), 0.0, 1.0)),
                    unit_chain(OrientedSegment((0.5, 0.0), math.pi / 2, 1.0))]
        self.assertEqual(disorder_sigma(crossing)[0, 1], 0.0)
        with self.assertRaises(DomainError):
            disorder_sigma([])

    def test_perimeter_diagonal(self):
        for t1 in (0.25, 0.5, 1.0):
            for t2 in (0.125, 0.75):
                sigma = disorder_sigma([rect_boundary_chain(RectDomain.anchored(t1, t2))])
                self.assertAlmostEqual(sigma[0, 0], 2 * (t1 + t2), delta=1e-12)

    def test_psd_report(self):
        ok, eig = psd_report(np.array([[1.0, 2.0], [2.0, 1.0]]))
        self.assertFalse(ok)
        self.assertAlmostEqual(eig, -1.0)
        self.assertTrue(psd_report(np.eye(3))[0])

    def test_non_psd_sigma_is_logged(self):
        a = unit_chain(OrientedSegment((0.0, 0.0), 0.0, 1.0))
        c = unit_chain(OrientedSegment((0.0, 1.0), 0.0, 1.0))
        with patch("src.cov_theory.signed_length", lambda x, y: 1.0 if x is y else 2.0):
            with self.assertLogs("src.cov_theory", level="WARNING"):
                sigma = disorder_sigma([a, c])
        self.assertEqual(sigma[0, 1], 2.0)


class TestBoundarySupCdf(unittest.TestCase):

    def test_zero(self):
        self.assertAlmostEqual(boundary_sup_cdf(0.0), 0.0, delta=1e-15)

    def test_large(self):
        self.assertAlmostEqual(boundary_sup_cdf(5.0), 1.0, delta=1e-6)

    def test_one(self):
        expected = 1 - 3 * stats.norm.cdf(-1.0) + math.exp(4.0) * stats.norm.cdf(-3.0)
        self.assertAlmostEqual(boundary_sup_cdf(1.0), expected, delta=1e-12)
        self.assertAlmostEqual(boundary_sup_cdf(1.0), 0.5977, delta=1e-4)

    def test_monotone(self):
        values = [boundary_sup_cdf(z) for z in np.linspace(0.0, 6.0, 1000)]
        self.assertTrue(all(b >= a - 1e-14 for a, b in zip(values, values[1:])))
        self.assertTrue(all(0.0 <= v <= 1.0 for v in values))

    def test_negative(self):
        with self.assertRaises(DomainError):
            boundary_sup_cdf(-0.1)


class TestWhiteNoise(unittest.TestCase):

    def test_disjoint(self):
        a = TestFunction((0.25, 0.25), (0.1, 0.1))
        b = TestFunction((0.75, 0.75), (0.1, 0.1))
        self.assertEqual(whitenoise_cov(a, b), 0.0)

    def test_norm_positive(self):
        a = TestFunction((0.5, 0.5), (0.2, 0.1))
        self.assertGreater(whitenoise_cov(a, a), 0.0)

    def test_riemann_oracle(self):
        a = TestFunction((0.4, 0.5), (0.2, 0.2))
        b = TestFunction((0.5, 0.45), (0.15, 0.25), amplitude=2.0)
        n = 2000
        x = (np.arange(n) + 0.5) / n
        X, Y = np.meshgrid(x, x, indexing="ij")
        riemann = float((a(X, Y) * b(X, Y)).sum()) / n ** 2
        self.assertAlmostEqual(whitenoise_cov(a, b), riemann, delta=1e-7 * abs(riemann))


class TestCovTable(unittest.TestCase):

    def test_rows(self):
        configs = [(1.0, 1.0, math.pi / 2, 0.0), (1.0, 1.0, 0.0, 0.3), (1.0, 0.5, 0.0, 0.0)]
        rows = covtable_rows([100.0], configs)
        self.assertEqual(len(rows), 3)
        self.assertEqual(tuple(rows[0]), COVTABLE_COLUMNS)
        self.assertEqual(rows[0]["a_term"], 0.0)
        self.assertTrue(math.isnan(rows[0]["ratio"]))
        self.assertTrue(math.isnan(rows[1]["a_term"]))
        self.assertEqual(rows[2]["b_term"], 0.0)
        self.assertAlmostEqual(rows[2]["ratio"], rows[2]["exact_cov"] / rows[2]["asymptotic"])
        self.assertAlmostEqual(rows[2]["a_term"], rows[2]["exact_cov"], delta=1e-10)

    def test_gap_requires_parallel(self):
        with self.assertRaises(DomainError):
            covtable_rows([100.0], [(1.0, 1.0, 1.0, 0.2)])


if __name__ == "__main__":
    unittest.main()
