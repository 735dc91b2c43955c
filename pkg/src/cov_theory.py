"""
Semi-analytic covariance oracles for second-chaos functionals.

For oriented segments S1, S2 with normals n1, n2 and z = x - y, tau = k|z|,

    Cov(phi_E(S1), phi_E(S2)) = (1/32) int int [ g1(tau) <n1, n2>
                                    - k^2 h(tau) <n1, z> <n2, z> ] dt ds,

g1(tau) = J0 J1 / tau and h(tau) = (J0 J2 + J1^2) / tau^2. Both kernels are
even analytic functions of tau, so the integrand is smooth even where the
segments meet.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .bumps import TestFunction, bump_inner
from .errors import DomainError
from .field import wavenumber
from .geometry import (
    COLLINEAR_TOL, OrientedSegment, PolygonalChain, Point, _angle_gap_mod_pi, signed_length,
)
from .quadrature import DEFAULT_TOL, adaptive_panel_integrate, adaptive_tensor_integrate
from .special_functions import bessel_j012, erfcx, normal_cdf


logger = logging.getLogger(__name__)

_TINY_TAU = 1e-6
_SMALL_TAU = 1e-3


def kernel_g1(tau: np.ndarray) -> np.ndarray:
    """J0(tau) J1(tau) / tau, using J1/tau = (J0 + J2)/2 near zero."""
    tau = np.asarray(tau, dtype=float)
    j0, j1, j2 = bessel_j012(tau)
    small = np.abs(tau) < _TINY_TAU
    safe = np.where(small, 1.0, tau)
    return np.where(small, 0.5 * j0 * (j0 + j2), j0 * j1 / safe)


def kernel_h(tau: np.ndarray) -> np.ndarray:
    """(J0 J2 + J1^2) / tau^2, with its Taylor expansion near zero."""
    tau = np.asarray(tau, dtype=float)
    j0, j1, j2 = bessel_j012(tau)
    t2 = tau * tau
    small = np.abs(tau) < _SMALL_TAU
    safe = np.where(small, 1.0, t2)
    return np.where(small, 0.375 - 5.0 * t2 / 48.0, (j0 * j2 + j1 * j1) / safe)


def bessel_antiderivative(v: np.ndarray) -> np.ndarray:
    """F(v) = v (J0^2 + J1^2) - J0 J1, an antiderivative of J0(|v|) J1(|v|) / |v|."""
    j0, j1, _ = bessel_j012(v)
    return v * (j0 * j0 + j1 * j1) - j0 * j1


def inner_g_closed(psi: np.ndarray) -> np.ndarray:
    """int_0^psi x (J0 J2 + J1^2)(x) dx = 1 - J0^2 - psi J0 J1."""
    j0, j1, _ = bessel_j012(psi)
    return 1.0 - j0 * j0 - psi * j0 * j1


@dataclass(frozen=True)
class SegmentPairConfig:
    """A segment pair in the frame where S1 starts at the origin along +x."""
    lambda1: float
    lambda2: float
    theta: float
    offset: Point
    gap: float
    parallel: bool


def segment_pair_config(s1: OrientedSegment, s2: OrientedSegment) -> SegmentPairConfig:
    """Rotate and translate so that S1 lies on the positive x-axis from the origin."""
    c, s = math.cos(s1.theta), math.sin(s1.theta)
    dx, dy = s2.origin[0] - s1.origin[0], s2.origin[1] - s1.origin[1]
    offset = (c * dx + s * dy, -s * dx + c * dy)
    theta = (s2.theta - s1.theta) % (2.0 * math.pi)
    parallel = _angle_gap_mod_pi(s1.theta, s2.theta) <= COLLINEAR_TOL
    return SegmentPairConfig(lambda1=s1.length, lambda2=s2.length, theta=theta, offset=offset,
                             gap=abs(offset[1]) if parallel else 0.0, parallel=parallel)


def _overlap_weight(v: np.ndarray, a: float, b: float, c: float, d: float) -> np.ndarray:
    return np.clip(np.minimum(b, d + v) - np.maximum(a, c + v), 0.0, None)


def _parallel_cov(cfg: SegmentPairConfig, energy: float, tol: float) -> float:
    k = wavenumber(energy)
    sigma = 1.0 if math.cos(cfg.theta) > 0 else -1.0
    a, b = 0.0, cfg.lambda1
    ends = (cfg.offset[0], cfg.offset[0] + sigma * cfg.lambda2)
    c, d = min(ends), max(ends)
    gap2 = cfg.gap * cfg.gap

    def integrand(v: np.ndarray) -> np.ndarray:
        rho = np.sqrt(v * v + gap2)
        tau = k * rho
        return _overlap_weight(v, a, b, c, d) * (kernel_g1(tau) - k * k * kernel_h(tau) * gap2)

    breaks = (a - d, a - c, b - d, b - c)
    value = adaptive_panel_integrate(integrand, a - d, b - c, math.pi / k, tol=tol, breakpoints=breaks)
    return sigma * value / 32.0


def _tensor_cov(cfg: SegmentPairConfig, energy: float, tol: float) -> float:
    k = wavenumber(energy)
    ct, st = math.cos(cfg.theta), math.sin(cfg.theta)
    px, py = cfg.offset

    def integrand(t: np.ndarray, s: np.ndarray) -> np.ndarray:
        zx = t - px - s * ct
        zy = -py - s * st
        tau = k * np.sqrt(zx * zx + zy * zy)
        # <n1, z> = zy and <n2, z> = -sin(theta) zx + cos(theta) zy
        return ct * kernel_g1(tau) - k * k * kernel_h(tau) * zy * (-st * zx + ct * zy)

    value = adaptive_tensor_integrate(integrand, (0.0, cfg.lambda1), (0.0, cfg.lambda2),
                                      math.pi / k, tol=tol)
    return value / 32.0


def exact_cov_segments(s1: OrientedSegment, s2: OrientedSegment, energy: float,
                       tol: float = DEFAULT_TOL) -> float:
    """
    Exact finite-E covariance of phi_E on two segments.

    Parallel pairs reduce to a one-dimensional integral over the lag with an
    overlap weight; all other pairs use a tensor rule in the canonical frame.

    Raises:
        DomainError: If E <= 0
        QuadratureAccuracyError: If refinement does not settle
    """
    if not energy > 0:
        raise DomainError(f"Energy must be positive, got {energy}")
    cfg = segment_pair_config(s1, s2)
    if cfg.parallel:
        return _parallel_cov(cfg, energy, tol)
    return _tensor_cov(cfg, energy, tol)


def exact_cov_chains(c1: PolygonalChain, c2: PolygonalChain, energy: float,
                     tol: float = DEFAULT_TOL) -> float:
    """Covariance of phi_E over two chains, summed over segment pairs."""
    return float(sum(exact_cov_segments(s, t, energy, tol) for s in c1 for t in c2))


def _polar_parts(lambda1: float, lambda2: float, theta: float, energy: float):
    k = wavenumber(energy)
    alpha = math.atan2(lambda2, lambda1)
    cos_t = math.cos(theta)

    def radius(phi: np.ndarray) -> np.ndarray:
        return np.where(phi <= alpha, lambda1 / np.cos(phi), lambda2 / np.maximum(np.sin(phi), 1e-300))

    def q(phi: np.ndarray) -> np.ndarray:
        return np.sqrt(1.0 - np.sin(2.0 * phi) * cos_t)

    width = math.pi / (2.0 * k * (lambda1 + lambda2))
    return k, alpha, radius, q, width


def _check_lengths(lambda1: float, lambda2: float, energy: float) -> None:
    if not (lambda1 > 0 and lambda2 > 0):
        raise DomainError("Segment lengths must be positive")
    if not energy > 0:
        raise DomainError(f"Energy must be positive, got {energy}")


def _is_parallel_angle(theta: float) -> bool:
    return abs(math.sin(theta)) <= COLLINEAR_TOL


def a_term(lambda1: float, lambda2: float, theta: float, energy: float,
           tol: float = DEFAULT_TOL) -> float:
    """
    Normal-alignment part of the common-origin covariance,
    (cos theta / 32) int_0^l1 int_0^l2 J0 J1(tau) / tau ds dt.

    The polar substitution with the closed inner integral (1 - J0^2) / 2
    leaves one integral in the polar angle, split at arctan(l2 / l1).
    Parallel angles go through the parallel kernel.
    """
    _check_lengths(lambda1, lambda2, energy)
    cos_t = math.cos(theta)
    if abs(cos_t) < 1e-15:
        return 0.0
    if _is_parallel_angle(theta):
        sigma = 1.0 if cos_t > 0 else -1.0
        c, d = (0.0, lambda2) if sigma > 0 else (-lambda2, 0.0)
        k = wavenumber(energy)

        def kernel(u: np.ndarray) -> np.ndarray:
            return parallel_kernel(u, 0.0, c, d, energy)

        value = adaptive_panel_integrate(kernel, 0.0, lambda1, math.pi / k, tol=tol,
                                         breakpoints=(c, d))
        return sigma * value / 32.0

    k, alpha, radius, q, width = _polar_parts(lambda1, lambda2, theta, energy)

    def integrand(phi: np.ndarray) -> np.ndarray:
        kq = k * q(phi)
        psi = kq * radius(phi)
        j0 = bessel_j012(psi)[0]
        return (1.0 - j0 * j0) / (2.0 * kq * kq)

    value = adaptive_panel_integrate(integrand, 0.0, 0.5 * math.pi, width, tol=tol, breakpoints=(alpha,))
    return cos_t * value / 32.0


def b_term(lambda1: float, lambda2: float, theta: float, energy: float,
           tol: float = DEFAULT_TOL) -> float:
    """
    Cross-normal part of the common-origin covariance,
    -(sin^2 theta / 32) int int ts (J0 J2 + J1^2)(tau) / (t^2 + s^2 - 2 st cos theta).

    Exactly zero for parallel angles.
    """
    _check_lengths(lambda1, lambda2, energy)
    if _is_parallel_angle(theta):
        return 0.0
    k, alpha, radius, q, width = _polar_parts(lambda1, lambda2, theta, energy)

    def integrand(phi: np.ndarray) -> np.ndarray:
        qq = q(phi)
        psi = k * qq * radius(phi)
        return np.cos(phi) * np.sin(phi) * inner_g_closed(psi) / (qq ** 4 * k * k)

    value = adaptive_panel_integrate(integrand, 0.0, 0.5 * math.pi, width, tol=tol, breakpoints=(alpha,))
    return -math.sin(theta) ** 2 * value / 32.0


def brute_force_a_term(lambda1: float, lambda2: float, theta: float, energy: float,
                       tol: float = DEFAULT_TOL) -> float:
    """Direct tensor quadrature of the normal-alignment part."""
    k = wavenumber(energy)
    ct, st = math.cos(theta), math.sin(theta)

    def integrand(t: np.ndarray, s: np.ndarray) -> np.ndarray:
        tau = k * np.sqrt((t - s * ct) ** 2 + (s * st) ** 2)
        return kernel_g1(tau)

    return ct * adaptive_tensor_integrate(integrand, (0.0, lambda1), (0.0, lambda2), math.pi / k, tol=tol) / 32.0


def brute_force_b_term(lambda1: float, lambda2: float, theta: float, energy: float,
                       tol: float = DEFAULT_TOL) -> float:
    """Direct tensor quadrature of the cross-normal part."""
    k = wavenumber(energy)
    ct, st = math.cos(theta), math.sin(theta)

    def integrand(t: np.ndarray, s: np.ndarray) -> np.ndarray:
        tau = k * np.sqrt((t - s * ct) ** 2 + (s * st) ** 2)
        return t * s * k * k * kernel_h(tau)

    return -st * st * adaptive_tensor_integrate(integrand, (0.0, lambda1), (0.0, lambda2),
                                                math.pi / k, tol=tol) / 32.0


def reduced_cov_segments(s1: OrientedSegment, s2: OrientedSegment, energy: float,
                         tol: float = DEFAULT_TOL) -> float:
    """
    Covariance of a general segment pair as a signed combination of common-origin pairs.

    With P the intersection of the two lines, S1 = P + [a, b] e1 and
    S2 = P + [c, d] e2, bilinearity gives G(b,d) - G(a,d) - G(b,c) + G(a,c),
    where G(x, y) is the common-origin covariance a_term + b_term of the
    segments of lengths |x|, |y| in directions sgn(x) e1, sgn(y) e2.
    Parallel pairs use the lag reduction.
    """
    if not energy > 0:
        raise DomainError(f"Energy must be positive, got {energy}")
    cfg = segment_pair_config(s1, s2)
    if cfg.parallel:
        return _parallel_cov(cfg, energy, tol)
    px, py = cfg.offset
    st, ct = math.sin(cfg.theta), math.cos(cfg.theta)
    s_star = -py / st
    x_star = px + s_star * ct
    a, b = -x_star, cfg.lambda1 - x_star
    c, d = -s_star, cfg.lambda2 - s_star

    def corner(x: float, y: float) -> float:
        if abs(x) < 1e-15 or abs(y) < 1e-15:
            return 0.0
        angle = cfg.theta + (math.pi if y < 0 else 0.0) - (math.pi if x < 0 else 0.0)
        return (a_term(abs(x), abs(y), angle, energy, tol)
                + b_term(abs(x), abs(y), angle, energy, tol))

    return corner(b, d) - corner(a, d) - corner(b, c) + corner(a, c)


def parallel_kernel(u, L: float, c: float, d: float, energy: float,
                    tol: float = DEFAULT_TOL):
    """
    K(u; L, c, d) = (1/k) int_{k(u-d)}^{k(u-c)} J0 J1(r) / r dv, r = sqrt(v^2 + (kL)^2).

    For L = 0 the closed antiderivative is used; otherwise the integral is
    taken by panel quadrature. Accepts a scalar or an array of u.
    """
    if L < 0 or not c < d:
        raise DomainError("parallel_kernel needs L >= 0 and c < d")
    k = wavenumber(energy)
    u_arr = np.asarray(u, dtype=float)
    if L == 0:
        out = (bessel_antiderivative(k * (u_arr - c)) - bessel_antiderivative(k * (u_arr - d))) / k
    else:
        kl2 = (k * L) ** 2

        def integrand(v: np.ndarray) -> np.ndarray:
            return kernel_g1(np.sqrt(v * v + kl2))

        flat = np.atleast_1d(u_arr).ravel()
        out = np.array([adaptive_panel_integrate(integrand, k * (x - d), k * (x - c), math.pi, tol=tol)
                        for x in flat]) / k
        out = out.reshape(u_arr.shape)
    return float(out) if u_arr.ndim == 0 else out


def asymptotic_cov(c1: PolygonalChain, c2: PolygonalChain, energy: float) -> float:
    """Leading-order covariance signed_length(C1, C2) / (16 pi^2 sqrt E)."""
    if not energy > 0:
        raise DomainError(f"Energy must be positive, got {energy}")
    return signed_length(c1, c2) / (16.0 * math.pi ** 2 * math.sqrt(energy))


def wiener_sheet_cov(t: Point, s: Point) -> float:
    """Covariance (t1 ^ s1)(t2 ^ s2) of the standard Wiener sheet."""
    for p in (t, s):
        if not (0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0):
            raise DomainError(f"Point {p} is outside [0,1]^2")
    return min(t[0], s[0]) * min(t[1], s[1])


def sheet_boundary_overlap(t: Point, s: Point) -> float:
    """Signed length between the clockwise boundaries of D_t and D_s."""
    total = min(t[1], s[1]) + min(t[0], s[0])
    if math.isclose(t[1], s[1], rel_tol=0.0, abs_tol=COLLINEAR_TOL):
        total += min(t[0], s[0])
    if math.isclose(t[0], s[0], rel_tol=0.0, abs_tol=COLLINEAR_TOL):
        total += min(t[1], s[1])
    return total


def psd_report(matrix: np.ndarray, tol: float = 1e-9) -> Tuple[bool, float]:
    """Whether a symmetric matrix is positive semidefinite, with its smallest eigenvalue."""
    eig = float(np.linalg.eigvalsh(matrix).min())
    scale = max(1.0, float(np.abs(matrix).max()))
    return eig >= -tol * scale, eig


def disorder_sigma(chains: Sequence[PolygonalChain]) -> np.ndarray:
    """
    Limiting covariance matrix of normalized boundary functionals: signed lengths.

    A matrix that fails the PSD check is returned unchanged and logged.
    """
    if not chains:
        raise DomainError("disorder_sigma needs at least one chain")
    n = len(chains)
    sigma = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            sigma[i, j] = sigma[j, i] = signed_length(chains[i], chains[j])
    ok, eig = psd_report(sigma)
    if not ok:
        logger.warning("Signed-length matrix is not positive semidefinite (min eigenvalue %.3e)", eig)
    return sigma


def boundary_sup_cdf(z: float) -> float:
    """
    P(sup over the boundary of the unit square of |W| <= z)
    = 1 - 3 Phi(-z) + exp(4 z^2) Phi(-3z).

    The last term is evaluated as exp(-z^2 / 2) erfcx(3z / sqrt 2) / 2.

    Raises:
        DomainError: For z < 0
    """
    if not math.isfinite(z) or z < 0:
        raise DomainError(f"boundary_sup_cdf needs z >= 0, got {z}")
    value = 1.0 - 3.0 * normal_cdf(-z) + 0.5 * math.exp(-0.5 * z * z) * erfcx(3.0 * z / math.sqrt(2.0))
    if -1e-12 <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + 1e-12:
        return 1.0
    return value


def whitenoise_cov(phi_i: TestFunction, phi_j: TestFunction) -> float:
    """Limiting covariance of white-noise pairings: int phi_i phi_j."""
    return bump_inner(phi_i, phi_j)


COVTABLE_COLUMNS = ("E", "lambda1", "lambda2", "theta", "gap", "a_term", "b_term",
                    "exact_cov", "asymptotic", "ratio")


def covtable_rows(energies: Iterable[float],
                  configs: Iterable[Tuple[float, float, float, float]]) -> List[Dict[str, float]]:
    """
    Rows of the covariance table.

    Each config is (lambda1, lambda2, theta, gap). Gap 0 means a common-origin
    pair, where a_term and b_term are reported; a positive gap places S2 on a
    parallel line (theta must then be 0 or pi) and leaves them as NaN.
    """
    configs = list(configs)
    rows = []
    for energy in energies:
        for lambda1, lambda2, theta, gap in configs:
            s1 = OrientedSegment((0.0, 0.0), 0.0, lambda1)
            s2 = OrientedSegment((0.0, gap), theta, lambda2)
            if gap > 0 and not _is_parallel_angle(theta):
                raise DomainError("A positive gap requires theta in {0, pi}")
            exact = exact_cov_segments(s1, s2, energy)
            if gap == 0:
                a, b = a_term(lambda1, lambda2, theta, energy), b_term(lambda1, lambda2, theta, energy)
            else:
                a = b = float("nan")
            asym = asymptotic_cov(PolygonalChain((s1,)), PolygonalChain((s2,)), energy)
            rows.append({
                "E": energy, "lambda1": lambda1, "lambda2": lambda2, "theta": theta, "gap": gap,
                "a_term": a, "b_term": b, "exact_cov": exact, "asymptotic": asym,
                "ratio": exact / asym if asym != 0 else float("nan"),
            })
    return rows
