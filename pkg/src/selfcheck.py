"""
Self-check implementations for berrylab.

Each check exercises one invariant of a library layer against an independent
oracle (identities, finite differences, brute-force enumeration):
- special: Bessel and normal-CDF identities and accuracy
- field: Helmholtz residual, gradients, unit variance, kernel bias
- geometry: signed lengths, orientation and partition snapping
"""

import math
from typing import Dict, List

import numpy as np

from .checks import Check, CheckConfig, CheckGroup, CheckResult
from .field import PlaneWaveField, direction_kernel_bias, sample_field, wavenumber
from .geometry import (
    OrientedSegment, RectDomain, discretized_signed_length, polyline_chain,
    rect_boundary_chain, segment_signed_overlap, signed_length, snap_to_partition,
)
from .special_functions import (
    CROSSOVER, SERIES_LIMIT, bessel_j, bessel_j012, bessel_j_report,
    bessel_recurrence_residual, normal_cdf,
)


CHECK_SEED = 20240501


class BesselValuesCheck(Check):
    """Exact values at 0 and the first zero of J0."""

    def run(self) -> CheckResult:
        zero = abs(bessel_j(0, 2.404825557695773))
        ok = bessel_j(0, 0.0) == 1.0 and bessel_j(1, 0.0) == 0.0 and bessel_j(2, 0.0) == 0.0
        return self.result(ok and zero <= 1e-10, f"|J0(j01)| = {zero:.2e}")


class RecurrenceCheck(Check):
    def run(self) -> CheckResult:
        xs = np.concatenate([np.geomspace(1e-3, 1e6, 400), -np.geomspace(1e-3, 1e3, 50)])
        worst = max(abs(bessel_recurrence_residual(float(x))) for x in xs)
        return self.result(worst <= self.config.parameters["tol"], f"max residual {worst:.2e}")


class ParityCheck(Check):
    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED)
        x = rng.uniform(0.0, 200.0, 1000)
        p0, p1, _ = bessel_j012(x)
        m0, m1, _ = bessel_j012(-x)
        worst = float(max(np.max(np.abs(p0 - m0)), np.max(np.abs(p1 + m1))))
        return self.result(worst == 0.0, f"max parity defect {worst:.2e}")


class DerivativeCheck(Check):
    """J0' = -J1 and the antiderivative of J0 J1 / v, by central differences."""

    def run(self) -> CheckResult:
        h = 1e-5
        x = np.linspace(0.1, 100.0, 500)
        j0p, _, _ = bessel_j012(x + h)
        j0m, _, _ = bessel_j012(x - h)
        j0, j1, _ = bessel_j012(x)
        d0 = float(np.max(np.abs((j0p - j0m) / (2 * h) + j1)))

        def anti(v: np.ndarray) -> np.ndarray:
            a, b, _ = bessel_j012(v)
            return v * (a * a + b * b) - a * b

        da = float(np.max(np.abs((anti(x + h) - anti(x - h)) / (2 * h) - j0 * j1 / x)))
        tol = self.config.parameters["tol"]
        return self.result(d0 <= tol and da <= tol, f"J0' defect {d0:.2e}, antiderivative defect {da:.2e}")


class CrossoverCheck(Check):
    """Adjacent branches agree across each switch point."""

    def run(self) -> CheckResult:
        worst = 0.0
        methods_differ = True
        for x0 in (SERIES_LIMIT, CROSSOVER):
            for nu in (0, 1, 2):
                below = bessel_j_report(nu, x0)
                above = bessel_j_report(nu, math.nextafter(x0, math.inf))
                methods_differ &= below.method != above.method
                worst = max(worst, abs(below.value - above.value))
        return self.result(worst <= 1e-10 and methods_differ, f"max jump {worst:.2e}")


class BoundsCheck(Check):
    def run(self) -> CheckResult:
        x = np.linspace(0.0, 1000.0, 20001)
        values = np.stack(bessel_j012(x))
        ok = bool(np.all(np.abs(values) <= 1.0))
        big = x >= 2.0
        ok &= bool(np.all(np.abs(values[:, big]) <= x[big] ** -0.5))
        return self.result(ok, "|J| <= 1 and |J| <= x^-1/2 for x >= 2")


class ErrorBudgetCheck(Check):
    def run(self) -> CheckResult:
        xs = np.concatenate([np.linspace(0.0, 40.0, 401), np.geomspace(40.0, 1e6, 100)])
        worst = max(bessel_j_report(nu, float(x)).est_abs_error for nu in (0, 1, 2) for x in xs)
        return self.result(worst <= 1e-12, f"max estimated error {worst:.2e}")


class NormalCdfCheck(Check):
    def run(self) -> CheckResult:
        z = np.linspace(-8.0, 8.0, 1601)
        phi = normal_cdf(z)
        sym = float(np.max(np.abs(phi + normal_cdf(-z) - 1.0)))
        monotone = bool(np.all(np.diff(phi) >= 0.0))
        quantile = abs(normal_cdf(1.959963985) - 0.975)
        ok = normal_cdf(0.0) == 0.5 and sym <= 1e-14 and monotone and quantile <= 1e-9
        return self.result(ok, f"reflection defect {sym:.1e}, 97.5% quantile defect {quantile:.1e}")


def _laplacian_residual(field: PlaneWaveField, points: np.ndarray) -> float:
    h = 1e-4 / math.sqrt(field.energy)
    px, py = points[:, 0], points[:, 1]
    v = field.values(px, py)
    lap = (field.values(px + h, py) + field.values(px - h, py) + field.values(px, py + h)
           + field.values(px, py - h) - 4.0 * v) / (h * h)
    k2 = wavenumber(field.energy) ** 2
    return float(np.max(np.abs(lap + k2 * v) / (k2 * (1.0 + np.abs(v)))))


class HelmholtzCheck(Check):
    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED)
        field = sample_field(self.config.parameters["energy"], None, CHECK_SEED, 0)
        worst = _laplacian_residual(field, rng.uniform(0.0, 1.0, (100, 2)))
        return self.result(worst <= 1e-3, f"max relative residual {worst:.2e}")


class GradientCheck(Check):
    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED + 1)
        field = sample_field(self.config.parameters["energy"], None, CHECK_SEED, 1)
        h = 1e-6
        scale = wavenumber(field.energy)
        worst = 0.0
        for x in rng.uniform(0.0, 1.0, (50, 2)):
            g = field.evaluate(tuple(x)).gradient
            fd = np.array([
                (field.evaluate((x[0] + h, x[1])).value - field.evaluate((x[0] - h, x[1])).value) / (2 * h),
                (field.evaluate((x[0], x[1] + h)).value - field.evaluate((x[0], x[1] - h)).value) / (2 * h),
            ])
            worst = max(worst, float(np.max(np.abs(fd - g))) / scale)
        return self.result(worst <= 1e-5, f"max gradient defect {worst:.2e} (relative to k)")


class ClosedFormCheck(Check):
    """Two orthogonal waves with xi = (1, 0) reduce to cos(x1)/sqrt(2)."""

    def run(self) -> CheckResult:
        field = PlaneWaveField.from_coefficients(1.0 / (4.0 * math.pi ** 2), [1.0, 0.0], [0.0, 0.0],
                                                 directions=[0.0, math.pi / 2])
        x = np.linspace(-3.0, 3.0, 41)
        worst = float(np.max(np.abs(field.values(x, 0.7 * x) - np.cos(x) / math.sqrt(2.0))))
        return self.result(worst <= 1e-13, f"max defect {worst:.2e}")


class UnitVarianceCheck(Check):
    def run(self) -> CheckResult:
        n = self.config.parameters["n_reps"]
        energy = self.config.parameters["energy"]
        vals = np.empty(n)
        grads = np.empty((n, 2))
        for rep in range(n):
            ev = sample_field(energy, None, CHECK_SEED, rep).evaluate((0.3, 0.4))
            vals[rep] = ev.value
            grads[rep] = ev.normalized_gradient
        se = math.sqrt(2.0 / (n - 1))
        observed = [float(np.var(vals, ddof=1))] + [float(np.var(grads[:, i], ddof=1)) for i in (0, 1)]
        ok = all(abs(v - 1.0) <= 3.0 * se for v in observed)
        return self.result(ok, "variances " + ", ".join(f"{v:.3f}" for v in observed) + f" (3se = {3 * se:.3f})")


class DeterminismCheck(Check):
    def run(self) -> CheckResult:
        a = sample_field(100.0, 256, 7, 0)
        b = sample_field(100.0, 256, 7, 0)
        c = sample_field(100.0, 256, 7, 1)
        same = np.array_equal(a.coeff_cos, b.coeff_cos) and np.array_equal(a.coeff_sin, b.coeff_sin)
        return self.result(same and not np.array_equal(a.coeff_cos, c.coeff_cos), "keyed streams")


class KernelBiasCheck(Check):
    def run(self) -> CheckResult:
        worst = max(direction_kernel_bias(e) for e in self.config.parameters["energies"])
        return self.result(worst <= 0.02, f"max kernel bias {worst:.4f}")


def _random_chain(rng: np.random.Generator, n: int):
    # x-monotone vertices keep the chain simple
    steps = np.column_stack([rng.uniform(0.05, 0.3, n + 1), rng.uniform(-0.3, 0.3, n + 1)])
    pts = np.cumsum(steps, axis=0)
    return polyline_chain([tuple(p) for p in pts])


class SignedLengthExamplesCheck(Check):
    def run(self) -> CheckResult:
        d = rect_boundary_chain(RectDomain.anchored(0.4, 0.9))
        full = rect_boundary_chain(RectDomain.unit())
        half = rect_boundary_chain(RectDomain.anchored(0.5, 1.0))
        seg = OrientedSegment((0.1, 0.2), 0.7, 1.3)
        cross = OrientedSegment((0.0, 0.5), 0.0, 1.0), OrientedSegment((0.5, 0.0), math.pi / 2, 1.0)
        observed = [signed_length(d, d), signed_length(full, half), segment_signed_overlap(seg, seg.reversed()),
                    segment_signed_overlap(*cross)]
        expected = [2.6, 2.0, -1.3, 0.0]
        ok = all(abs(o - e) <= 1e-12 for o, e in zip(observed, expected))
        return self.result(ok, "observed " + ", ".join(f"{o:.6g}" for o in observed))


class SplitInvarianceCheck(Check):
    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED)
        worst = 0.0
        for _ in range(self.config.parameters["trials"]):
            a = _random_chain(rng, 4)
            c = a.rotated(0.0) if rng.uniform() < 0.5 else _random_chain(rng, 3)
            base = signed_length(a, c)
            split = a.split_segment(int(rng.integers(len(a))), float(rng.uniform(0.05, 0.95)))
            worst = max(worst, abs(signed_length(split, c) - base))
        return self.result(worst <= 1e-9, f"max change {worst:.2e}")


class RigidMotionCheck(Check):
    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED + 2)
        worst = 0.0
        for _ in range(100):
            a = rect_boundary_chain(RectDomain.anchored(*rng.uniform(0.1, 1.0, 2)))
            c = rect_boundary_chain(RectDomain.anchored(*rng.uniform(0.1, 1.0, 2)))
            angle, dx, dy = rng.uniform(0, 2 * math.pi), *rng.uniform(-2, 2, 2)
            moved = signed_length(a.rotated(angle).translated(dx, dy), c.rotated(angle).translated(dx, dy))
            worst = max(worst, abs(moved - signed_length(a, c)))
        return self.result(worst <= 1e-9, f"max change {worst:.2e}")


class OracleEquivalenceCheck(Check):
    """Exact signed lengths against the sampled brute-force count."""

    def run(self) -> CheckResult:
        rng = np.random.default_rng(CHECK_SEED + 3)
        worst = 0.0
        for _ in range(self.config.parameters["pairs"]):
            a = rect_boundary_chain(RectDomain.anchored(*np.round(rng.uniform(0.1, 1.0, 2), 3)))
            c = rect_boundary_chain(RectDomain.anchored(*np.round(rng.uniform(0.1, 1.0, 2), 3)))
            if rng.uniform() < 0.3:
                c = c.reversed()
            worst = max(worst, abs(signed_length(a, c) - discretized_signed_length(a, c)))
        return self.result(worst <= 1e-3, f"max oracle gap {worst:.2e}")


class SnapCheck(Check):
    def run(self) -> CheckResult:
        cases = [((0.3, 0.7), 2, (1, 2)), ((1.0, 1.0), 3, (8, 8)), ((0.25, 0.25), 2, (1, 1))]
        ok = True
        for t, k, want in cases:
            p = snap_to_partition(t, k)
            ok &= (p.i1, p.i2) == want
        rng = np.random.default_rng(CHECK_SEED)
        for t in rng.uniform(0.0, 1.0, (200, 2)):
            p = snap_to_partition(tuple(t), 5)
            ok &= snap_to_partition(p.point, 5) == p
            ok &= p.point[0] <= t[0] and p.point[1] <= t[1]
        return self.result(ok, "examples, idempotence and lower-left snapping")


# Default check configurations
DEFAULT_CHECKS: List[CheckConfig] = [
    CheckConfig("bessel-values", CheckGroup.SPECIAL, "Exact values and first zero of J0"),
    CheckConfig("bessel-recurrence", CheckGroup.SPECIAL, "J0 + J2 = 2 J1 / x", {"tol": 1e-10}),
    CheckConfig("bessel-parity", CheckGroup.SPECIAL, "J0 even, J1 odd"),
    CheckConfig("bessel-derivatives", CheckGroup.SPECIAL, "Derivative and antiderivative identities",
                {"tol": 1e-6}),
    CheckConfig("bessel-crossover", CheckGroup.SPECIAL, "Branch continuity"),
    CheckConfig("bessel-bounds", CheckGroup.SPECIAL, "Magnitude bounds"),
    CheckConfig("bessel-error-budget", CheckGroup.SPECIAL, "Estimated absolute error <= 1e-12"),
    CheckConfig("normal-cdf", CheckGroup.SPECIAL, "Reflection, monotonicity and a quantile"),
    CheckConfig("helmholtz", CheckGroup.FIELD, "Finite-difference Laplacian", {"energy": 100.0}),
    CheckConfig("gradient", CheckGroup.FIELD, "Analytic gradient against central differences",
                {"energy": 100.0}),
    CheckConfig("closed-form", CheckGroup.FIELD, "Two-wave closed form"),
    CheckConfig("unit-variance", CheckGroup.FIELD, "Value and normalized gradient variances",
                {"energy": 100.0, "n_reps": 5000}),
    CheckConfig("determinism", CheckGroup.FIELD, "Keyed stream reproducibility"),
    CheckConfig("kernel-bias", CheckGroup.FIELD, "Direction-grid kernel bias",
                {"energies": [100.0, 1000.0, 10000.0]}),
    CheckConfig("signed-length-examples", CheckGroup.GEOMETRY, "Reference signed lengths"),
    CheckConfig("split-invariance", CheckGroup.GEOMETRY, "Signed length under segment splits",
                {"trials": 1000}),
    CheckConfig("rigid-motion", CheckGroup.GEOMETRY, "Signed length under rotations and translations"),
    CheckConfig("oracle-equivalence", CheckGroup.GEOMETRY, "Exact against brute-force signed length",
                {"pairs": 100}),
    CheckConfig("snap", CheckGroup.GEOMETRY, "Dyadic partition snapping"),
]

CHECK_CLASSES: Dict[str, type] = {
    "bessel-values": BesselValuesCheck,
    "bessel-recurrence": RecurrenceCheck,
    "bessel-parity": ParityCheck,
    "bessel-derivatives": DerivativeCheck,
    "bessel-crossover": CrossoverCheck,
    "bessel-bounds": BoundsCheck,
    "bessel-error-budget": ErrorBudgetCheck,
    "normal-cdf": NormalCdfCheck,
    "helmholtz": HelmholtzCheck,
    "gradient": GradientCheck,
    "closed-form": ClosedFormCheck,
    "unit-variance": UnitVarianceCheck,
    "determinism": DeterminismCheck,
    "kernel-bias": KernelBiasCheck,
    "signed-length-examples": SignedLengthExamplesCheck,
    "split-invariance": SplitInvarianceCheck,
    "rigid-motion": RigidMotionCheck,
    "oracle-equivalence": OracleEquivalenceCheck,
    "snap": SnapCheck,
}
