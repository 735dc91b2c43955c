"""
Special functions for BerryLab.

Bessel functions J0, J1, J2 and the standard normal CDF, evaluated without
external special-function libraries. Every covariance formula in the toolkit
sits on top of this module.

Regimes for J0/J1 (argument taken in absolute value):
- |x| <= 8: power series
- 8 < |x| <= 18: Miller backward recurrence normalized by J0 + 2*sum(J_2k) = 1
- |x| > 18: Hankel asymptotic expansion with correction terms
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .errors import DomainError


ArrayLike = Union[float, np.ndarray]

SERIES_LIMIT = 8.0
CROSSOVER = 18.0
SMALL_J2 = 1e-3

_EPS = np.finfo(float).eps
_SERIES_TERMS = 40
_MILLER_START = 60
_HANKEL_TERMS = 60
_ERF_SWITCH = 2.5
_CF_DEPTH = 200
_SQRT_PI = math.sqrt(math.pi)


class EvalMethod(str, Enum):
    """Evaluation branch used for a Bessel value."""
    SERIES = "series"
    BACKWARD_RECURRENCE = "backward_recurrence"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class EvalReport:
    """A Bessel value together with the branch that produced it."""
    value: float
    method: EvalMethod
    est_abs_error: float


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel/normal evaluation requires finite arguments")


def _series01(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = 0.5 * x
    h2 = h * h
    term0 = np.ones_like(x)
    term1 = h.copy()
    s0 = term0.copy()
    s1 = term1.copy()
    mag = np.abs(term0) + np.abs(term1)
    for k in range(1, _SERIES_TERMS + 1):
        term0 = term0 * (-h2 / (k * k))
        term1 = term1 * (-h2 / (k * (k + 1)))
        s0 += term0
        s1 += term1
        mag += np.abs(term0) + np.abs(term1)
    return s0, s1, _EPS * mag


def _miller01(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    j_next = np.zeros_like(x)
    j_cur = np.ones_like(x)
    norm = 2.0 * j_cur
    j1 = np.zeros_like(x)
    for n in range(_MILLER_START, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        order = n - 1
        if order == 1:
            j1 = j_cur
        elif order > 0 and order % 2 == 0:
            norm = norm + 2.0 * j_cur
    norm = norm + j_cur
    est = np.full_like(x, 4.0 * _MILLER_START * _EPS)
    return j_cur / norm, j1 / norm, est


def _hankel(nu: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    omitted = np.zeros_like(x)
    for k in range(1, _HANKEL_TERMS + 1):
        term = term * ((mu - (2 * k - 1) ** 2) / (8.0 * k * x))
        size = np.abs(term)
        # asymptotic series: stop where terms start growing
        grows = active & (size >= prev)
        omitted = np.where(grows, size, omitted)
        active &= ~grows
        if k % 2 == 0:
            sign = -1.0 if (k // 2) % 2 else 1.0
            p = np.where(active, p + sign * term, p)
        else:
            sign = -1.0 if ((k - 1) // 2) % 2 else 1.0
            q = np.where(active, q + sign * term, q)
        prev = np.where(active, size, prev)
        done = active & (size < 1e-18)
        omitted = np.where(done, size, omitted)
        active &= ~done
        if not active.any():
            break
    omitted = np.where(active, np.abs(term), omitted)
    omega = (2 * nu + 1) * math.pi / 4.0
    cos_chi = np.cos(x) * math.cos(omega) + np.sin(x) * math.sin(omega)
    sin_chi = np.sin(x) * math.cos(omega) - np.cos(x) * math.sin(omega)
    amp = np.sqrt(2.0 / (math.pi * x))
    value = amp * (p * cos_chi - q * sin_chi)
    return value, amp * omitted + 8.0 * _EPS * amp


def _j01_abs(ax: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """J0 and J1 for nonnegative arguments plus error estimate and method codes."""
    j0 = np.empty_like(ax)
    j1 = np.empty_like(ax)
    err = np.empty_like(ax)
    method = np.zeros(ax.shape, dtype=np.int8)

    low = ax <= SERIES_LIMIT
    mid = (ax > SERIES_LIMIT) & (ax <= CROSSOVER)
    high = ax > CROSSOVER

    if low.any():
        a, b, e = _series01(ax[low])
        j0[low], j1[low], err[low] = a, b, e
    if mid.any():
        a, b, e = _miller01(ax[mid])
        j0[mid], j1[mid], err[mid] = a, b, e
        method[mid] = 1
    if high.any():
        a, ea = _hankel(0, ax[high])
        b, eb = _hankel(1, ax[high])
        j0[high], j1[high], err[high] = a, b, np.maximum(ea, eb)
        method[high] = 2
    return j0, j1, err, method


def _j2_series(x: np.ndarray) -> np.ndarray:
    h = 0.5 * x
    h2 = h * h
    term = 0.5 * h2
    total = term.copy()
    for k in range(1, 12):
        term = term * (-h2 / (k * (k + 2)))
        total += term
    return total


def bessel_j012(x: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Evaluate J0, J1 and J2 together on an array of arguments.

    J2 comes from the three-term recurrence for |x| >= 1e-3 and from its own
    series below that.

    Args:
        x: Real argument(s)

    Returns:
        Tuple of arrays (J0, J1, J2) with the shape of x

    Raises:
        DomainError: If any argument is not finite
    """
    xa = np.asarray(x, dtype=float)
    _check_finite(xa)
    ax = np.abs(xa)
    j0, j1, _, _ = _j01_abs(ax)
    j1 = np.where(xa < 0, -j1, j1)
    small = ax < SMALL_J2
    safe = np.where(small, 1.0, xa)
    j2 = np.where(small, _j2_series(xa), 2.0 * j1 / safe - j0)
    return j0, j1, j2


def bessel_j_array(nu: int, x: ArrayLike) -> np.ndarray:
    """Vectorized J_nu for nu in {0, 1, 2}."""
    if nu not in (0, 1, 2):
        raise DomainError(f"Unsupported Bessel order {nu}; expected 0, 1 or 2")
    return bessel_j012(x)[nu]


def bessel_j_report(nu: int, x: float) -> EvalReport:
    """
    Evaluate J_nu(x) and report the branch and estimated absolute error.

    Args:
        nu: Order, one of 0, 1, 2
        x: Finite real argument

    Returns:
        EvalReport with value, method and error estimate

    Raises:
        DomainError: If x is not finite or nu is unsupported
    """
    if nu not in (0, 1, 2):
        raise DomainError(f"Unsupported Bessel order {nu}; expected 0, 1 or 2")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_finite(xa)
    ax = np.abs(xa)
    _, _, err, method = _j01_abs(ax)
    value = float(bessel_j012(xa)[nu][0])
    est = float(err[0])
    if nu == 2 and ax[0] >= SMALL_J2:
        est = est * (1.0 + 2.0 / ax[0]) + _EPS
    code = int(method[0])
    if nu == 2 and ax[0] < SMALL_J2:
        code = 0
    return EvalReport(value=value, method=list(EvalMethod)[code], est_abs_error=est)


def bessel_j(nu: int, x: float) -> float:
    """Return J_nu(x) for nu in {0, 1, 2} with absolute error below 1e-12."""
    return bessel_j_report(nu, x).value


def bessel_recurrence_residual(x: float) -> float:
    """
    Residual of the identity J0(x) + J2(x) = 2 J1(x) / x.

    Raises:
        DomainError: For x = 0 or non-finite x
    """
    if x == 0:
        raise DomainError("Recurrence residual is undefined at x = 0")
    j0, j1, j2 = bessel_j012(np.array([x], dtype=float))
    return float(j0[0] + j2[0] - 2.0 * j1[0] / x)


def _erf_series(x: np.ndarray) -> np.ndarray:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (2n+1)!!, all terms positive for x >= 0
    x2 = x * x
    term = x.copy()
    total = term.copy()
    for n in range(1, 80):
        term = term * (2.0 * x2 / (2 * n + 1))
        total += term
    return (2.0 / _SQRT_PI) * np.exp(-x2) * total


def _erfcx_cf(x: np.ndarray) -> np.ndarray:
    f = x.copy()
    for k in range(_CF_DEPTH, 0, -1):
        f = x + (0.5 * k) / f
    return 1.0 / (_SQRT_PI * f)


def _erfc_nonneg(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    low = x < _ERF_SWITCH
    if low.any():
        out[low] = 1.0 - _erf_series(x[low])
    if (~low).any():
        xh = x[~low]
        out[~low] = np.exp(-xh * xh) * _erfcx_cf(xh)
    return out


def erfcx(x: ArrayLike) -> ArrayLike:
    """
    Scaled complementary error function exp(x^2) erfc(x) for x >= 0.

    Raises:
        DomainError: For negative or non-finite input
    """
    xa = np.asarray(x, dtype=float)
    _check_finite(xa)
    if np.any(xa < 0):
        raise DomainError("erfcx is only provided for nonnegative arguments")
    flat = np.atleast_1d(xa).astype(float)
    out = np.empty_like(flat)
    low = flat < _ERF_SWITCH
    if low.any():
        xl = flat[low]
        out[low] = np.exp(xl * xl) * (1.0 - _erf_series(xl))
    if (~low).any():
        out[~low] = _erfcx_cf(flat[~low])
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def normal_cdf(z: ArrayLike) -> ArrayLike:
    """
    Standard normal CDF Phi(z) = erfc(-z / sqrt(2)) / 2.

    Accepts scalars or arrays; scalars come back as float.

    Raises:
        DomainError: For non-finite input
    """
    za = np.asarray(z, dtype=float)
    _check_finite(za)
    flat = np.atleast_1d(za).astype(float)
    x = flat / math.sqrt(2.0)
    tail = 0.5 * _erfc_nonneg(np.abs(x))
    out = np.where(x <= 0, tail, 1.0 - tail)
    out = np.clip(out, 0.0, 1.0)
    if za.ndim == 0:
        return float(out[0])
    return out.reshape(za.shape)
