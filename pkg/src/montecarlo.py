"""
Replication engine.

Work items are computed independently from streams keyed by (seed, index) and
collected in index order, so results do not depend on the thread budget.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .chaos2 import phi_tilde
from .config import ExperimentConfig, load_config
from .cov_theory import disorder_sigma, wiener_sheet_cov
from .errors import ConfigurationError
from .estimators import CovarianceComparison, FitReport, compare_covariance, fit_linear, summarize
from .experiments import normalized_lengths
from .field import sample_field
from .geometry import PolygonalChain, Point, RectDomain, rect_overlap_area
from .nodal import DEFAULT_PPW, default_K, discretize, extract_nodal, grid_sup, partition_function


logger = logging.getLogger(__name__)


def run_replications(fn: Callable[[int], Dict[str, Any]], n: int, threads: int = 1) -> List[Dict[str, Any]]:
    """
    Evaluate fn(0), ..., fn(n - 1) on a bounded pool and return the results in index order.

    Args:
        fn: Work item function; must only depend on its index and immutable inputs
        n: Number of work items
        threads: Worker count

    Returns:
        List of rows, row i = fn(i)
    """
    def timed(i: int) -> Dict[str, Any]:
        start = time.perf_counter()
        row = fn(i)
        logger.debug("Work item %d finished in %.3fs", i, time.perf_counter() - start)
        return row

    if threads <= 1 or n <= 1:
        return [timed(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=min(threads, n)) as pool:
        return list(pool.map(timed, range(n)))


def run_experiment(cfg: Union[ExperimentConfig, Dict[str, Any]], dry_run: bool = False) -> Dict[str, Any]:
    """
    Run one experiment through the pipeline and persist its outputs.

    Args:
        cfg: Resolved config, or a dict of overrides for load_config
        dry_run: Stop after validation and planning

    Returns:
        Final pipeline state as a dict (rows, summary, report, outputs, errors)
    """
    from .orchestrator import ExperimentPipeline

    if isinstance(cfg, dict):
        cfg = load_config(overrides=cfg)
    return ExperimentPipeline().run(cfg, dry_run=dry_run)


@dataclass
class SupMomentReport:
    energies: List[float]
    means: List[float]
    standard_errors: List[float]
    fit: FitReport
    increasing: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def sup_moment_scan(energies: Sequence[float], n_waves: Optional[int] = None, ppw: int = DEFAULT_PPW,
                    n_reps: int = 200, seed: int = 0, threads: int = 1) -> SupMomentReport:
    """
    Estimate E sup|B_E| over the unit square per energy and fit a + b sqrt(log E).

    Raises:
        ConfigurationError: If fewer than 4 energies are given or they are not sorted
    """
    energies = [float(e) for e in energies]
    if len(energies) < 4:
        raise ConfigurationError(f"sup_moment_scan needs at least 4 energies, got {len(energies)}")
    if sorted(energies) != energies:
        raise ConfigurationError("sup_moment_scan energies must be sorted")
    unit = RectDomain.unit()

    def one(rep: int) -> Dict[str, Any]:
        return {str(e): grid_sup(sample_field(e, n_waves, seed, rep), unit, ppw) for e in energies}

    rows = run_replications(one, n_reps, threads)
    s = summarize(np.array([[row[str(e)] for e in energies] for row in rows]))
    fit = fit_linear([math.sqrt(math.log(e)) for e in energies], s.mean)
    return SupMomentReport(energies=energies, means=s.mean, standard_errors=s.se_mean, fit=fit,
                           increasing=all(b > a for a, b in zip(s.mean, s.mean[1:])))


@dataclass
class CovarianceExperiment:
    kind: str
    comparison: CovarianceComparison
    samples: np.ndarray

    @property
    def passed(self) -> bool:
        return self.comparison.passed


def _statistic_and_target(targets: Sequence[Any], energy: float, ppw: int, K: Optional[int]):
    first = targets[0]
    if isinstance(first, RectDomain):
        target = np.array([[rect_overlap_area(a, b) for b in targets] for a in targets])

        def statistic(field) -> List[float]:
            ns = extract_nodal(field, RectDomain.unit(), ppw)
            return normalized_lengths(ns, targets, energy)

        return "rects", statistic, target
    if isinstance(first, PolygonalChain):
        target = disorder_sigma(targets)

        def statistic(field) -> List[float]:
            return [phi_tilde(field, c) for c in targets]

        return "chains", statistic, target
    points: List[Point] = [(float(t[0]), float(t[1])) for t in targets]
    target = np.array([[wiener_sheet_cov(t, s) for s in points] for t in points])
    level = default_K(energy) if K is None else K

    def statistic(field) -> List[float]:
        grid = partition_function(field, level, ppw)
        return [discretize(grid, t) for t in points]

    return "points", statistic, target


def covariance_matrix_experiment(targets: Sequence[Any], energy: float, n_reps: int, seed: int = 0,
                                 bias_band: float = 0.1, n_waves: Optional[int] = None,
                                 ppw: int = DEFAULT_PPW, K: Optional[int] = None,
                                 threads: int = 1) -> CovarianceExperiment:
    """
    Empirical covariance of normalized statistics against their limit.

    Rectangles use normalized nodal lengths with target area(D_i ∩ D_j);
    chains use normalized phi with target signed length; points in [0,1]^2
    use the partition field with target (t1^s1)(t2^s2).

    Raises:
        ConfigurationError: If fewer than 2 targets are given
    """
    if len(targets) < 2:
        raise ConfigurationError("covariance_matrix_experiment needs at least 2 targets")
    kind, statistic, target = _statistic_and_target(list(targets), energy, ppw, K)

    def one(rep: int) -> Dict[str, Any]:
        values = statistic(sample_field(energy, n_waves, seed, rep))
        return {str(i): v for i, v in enumerate(values)}

    rows = run_replications(one, n_reps, threads)
    samples = np.array([[row[str(i)] for i in range(len(targets))] for row in rows])
    return CovarianceExperiment(kind=kind, comparison=compare_covariance(samples, target, bias_band),
                                samples=samples)
