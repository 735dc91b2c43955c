"""
Estimators and diagnostics for replication samples.

Mean, unbiased variance and covariance with standard errors, a jackknife
fallback for the variance, normality diagnostics and the elementwise
covariance comparison used by the acceptance suites.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import DiagnosticError, DomainError
from .special_functions import normal_cdf


logger = logging.getLogger(__name__)

KS_CRITICAL = 1.63
MIN_DIAGNOSTIC_SAMPLES = 100


@dataclass
class StatSummary:
    """Moments of an (n, p) sample; vector fields hold one entry per column."""
    n: int
    mean: List[float]
    variance: List[float]
    covariance: List[List[float]]
    se_mean: List[float]
    se_variance: List[float]
    skewness: List[float]
    excess_kurtosis: List[float]
    minimum: List[float]
    maximum: List[float]
    se_variance_jackknife: Optional[List[float]] = None
    columns: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def column(self, name: str) -> Dict[str, float]:
        """Scalar statistics of one named column."""
        if name not in self.columns:
            raise KeyError(f"Unknown column '{name}'. Available: {', '.join(self.columns)}")
        i = self.columns.index(name)
        out = {
            "n": self.n, "mean": self.mean[i], "variance": self.variance[i],
            "se_mean": self.se_mean[i], "se_variance": self.se_variance[i],
            "skewness": self.skewness[i], "excess_kurtosis": self.excess_kurtosis[i],
            "min": self.minimum[i], "max": self.maximum[i],
        }
        if self.se_variance_jackknife is not None:
            out["se_variance_jackknife"] = self.se_variance_jackknife[i]
        return out


def _as_matrix(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DomainError(f"Samples must be 1-D or 2-D, got shape {x.shape}")
    if x.shape[0] < 2:
        raise DomainError(f"At least 2 samples are needed, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DomainError("Samples contain non-finite values")
    return x


def _standardized_moments(x: np.ndarray):
    centered = x - x.mean(axis=0)
    m2 = np.mean(centered ** 2, axis=0)
    safe = np.where(m2 > 0, m2, 1.0)
    skew = np.where(m2 > 0, np.mean(centered ** 3, axis=0) / safe ** 1.5, 0.0)
    kurt = np.where(m2 > 0, np.mean(centered ** 4, axis=0) / safe ** 2 - 3.0, 0.0)
    return skew, kurt


def jackknife_variance_se(samples) -> np.ndarray:
    """
    Jackknife standard error of the unbiased variance, per column.

    Leave-one-out variances come from running sums, so the cost is O(n p).
    """
    x = _as_matrix(samples)
    n = x.shape[0]
    if n < 3:
        raise DomainError("Jackknife needs at least 3 samples")
    s1 = x.sum(axis=0)
    s2 = (x * x).sum(axis=0)
    loo_s1 = s1 - x
    loo_s2 = s2 - x * x
    m = n - 1
    loo_var = (loo_s2 - loo_s1 * loo_s1 / m) / (m - 1)
    spread = loo_var - loo_var.mean(axis=0)
    return np.sqrt((n - 1) / n * np.sum(spread * spread, axis=0))


def summarize(samples, columns: Optional[Sequence[str]] = None, jackknife: bool = False) -> StatSummary:
    """
    Summarize replication samples.

    Args:
        samples: Array of shape (n,) or (n, p), rows in replication order
        columns: Optional column names
        jackknife: Also report jackknife standard errors of the variance

    Returns:
        StatSummary with unbiased variance and Gaussian-approximation errors

    Raises:
        DomainError: If fewer than 2 rows or non-finite entries
    """
    x = _as_matrix(samples)
    n, p = x.shape
    mean = x.mean(axis=0)
    cov = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
    cov = 0.5 * (cov + cov.T)
    var = np.diag(cov).copy()
    skew, kurt = _standardized_moments(x)
    names = list(columns) if columns is not None else [f"c{i}" for i in range(p)]
    if len(names) != p:
        raise DomainError(f"{len(names)} column names for {p} columns")
    jk = jackknife_variance_se(x).tolist() if jackknife and n >= 3 else None
    return StatSummary(
        n=n,
        mean=mean.tolist(),
        variance=var.tolist(),
        covariance=cov.tolist(),
        se_mean=np.sqrt(var / n).tolist(),
        se_variance=(var * math.sqrt(2.0 / (n - 1))).tolist(),
        skewness=skew.tolist(),
        excess_kurtosis=kurt.tolist(),
        minimum=x.min(axis=0).tolist(),
        maximum=x.max(axis=0).tolist(),
        se_variance_jackknife=jk,
        columns=names,
    )


def covariance_se(cov: np.ndarray, n: int) -> np.ndarray:
    """Gaussian-approximation standard errors sqrt((s_ii s_jj + s_ij^2) / (n - 1))."""
    cov = np.asarray(cov, dtype=float)
    d = np.diag(cov)
    return np.sqrt((np.outer(d, d) + cov * cov) / (n - 1))


def variance_standard_error(summary: StatSummary, i: int = 0, heavy_tail_kurtosis: float = 1.0) -> float:
    """
    Standard error of the variance of column i.

    Falls back to the jackknife when the sample kurtosis makes the Gaussian
    approximation doubtful and a jackknife value is available.
    """
    gaussian = summary.se_variance[i]
    if summary.se_variance_jackknife is None:
        return gaussian
    jk = summary.se_variance_jackknife[i]
    if abs(summary.excess_kurtosis[i]) > heavy_tail_kurtosis:
        logger.warning("Excess kurtosis %.2f in column %s; using jackknife variance error %.3g",
                       summary.excess_kurtosis[i], summary.columns[i], jk)
        return jk
    return max(gaussian, jk)


@dataclass
class CLTReport:
    n: int
    skewness: float
    skewness_z: float
    excess_kurtosis: float
    kurtosis_z: float
    ks_statistic: float
    ks_threshold: float
    z_threshold: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def clt_diagnostics(samples, z_threshold: float = 4.0, ks_factor: float = 1.5) -> CLTReport:
    """
    Normality diagnostics of a standardized sample.

    Skewness and excess kurtosis get z-scores from their null standard errors
    sqrt(6/n) and sqrt(24/n); the Kolmogorov-Smirnov statistic is taken
    against the standard normal after standardizing by the sample moments.

    Raises:
        DiagnosticError: If n < 100 or the sample has zero variance
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < MIN_DIAGNOSTIC_SAMPLES:
        raise DiagnosticError(f"clt_diagnostics needs at least {MIN_DIAGNOSTIC_SAMPLES} samples, got {n}")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise DiagnosticError("Sample has zero variance")
    skew, kurt = (float(v[0]) for v in _standardized_moments(x[:, None]))
    skew_z = skew / math.sqrt(6.0 / n)
    kurt_z = kurt / math.sqrt(24.0 / n)
    standardized = (x - x.mean()) / sd
    ks = float(stats.kstest(standardized, normal_cdf).statistic)
    ks_threshold = KS_CRITICAL / math.sqrt(n) * ks_factor
    passed = abs(skew_z) < z_threshold and abs(kurt_z) < z_threshold and ks < ks_threshold
    return CLTReport(n=n, skewness=skew, skewness_z=skew_z, excess_kurtosis=kurt, kurtosis_z=kurt_z,
                     ks_statistic=ks, ks_threshold=ks_threshold, z_threshold=z_threshold, passed=passed)


@dataclass
class CovarianceComparison:
    empirical: List[List[float]]
    target: List[List[float]]
    standard_error: List[List[float]]
    z_scores: List[List[float]]
    tolerance: List[List[float]]
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def compare_covariance(samples, target, bias_band: float = 0.0) -> CovarianceComparison:
    """
    Elementwise comparison of an empirical covariance with a target.

    An entry passes when |empirical - target| <= 3 se + bias_band.
    """
    x = _as_matrix(samples)
    target = np.atleast_2d(np.asarray(target, dtype=float))
    cov = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
    if cov.shape != target.shape:
        raise DomainError(f"Target shape {target.shape} does not match {cov.shape}")
    se = covariance_se(cov, x.shape[0])
    diff = cov - target
    z = np.divide(diff, se, out=np.zeros_like(diff), where=se > 0)
    tol = 3.0 * se + bias_band
    return CovarianceComparison(empirical=cov.tolist(), target=target.tolist(), standard_error=se.tolist(),
                                z_scores=z.tolist(), tolerance=tol.tolist(),
                                passed=bool(np.all(np.abs(diff) <= tol)))


@dataclass
class FitReport:
    slope: float
    intercept: float
    r_squared: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def fit_linear(x: Sequence[float], y: Sequence[float]) -> FitReport:
    """Least-squares line y = intercept + slope * x."""
    if len(x) < 3:
        raise DomainError("A line fit needs at least 3 points")
    res = stats.linregress(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return FitReport(slope=float(res.slope), intercept=float(res.intercept), r_squared=float(res.rvalue ** 2))


def empirical_cdf(samples, z: Sequence[float]) -> List[float]:
    """Fraction of samples <= z for each z."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    return (np.searchsorted(x, np.asarray(z, dtype=float), side="right") / x.size).tolist()


def overlapping_intervals(a_mean: float, a_se: float, b_mean: float, b_se: float, z: float = 1.96) -> bool:
    """Whether two symmetric confidence intervals overlap."""
    return abs(a_mean - b_mean) <= z * (a_se + b_se)
