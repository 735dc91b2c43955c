"""
berrylab initialization.

Random plane-wave simulation and verification lab: sampling of Berry's random
wave, nodal-set extraction, second-chaos statistics, exact covariance theory
and Monte Carlo acceptance experiments.
"""

from .config import ExperimentConfig, load_config
from .experiments import get_registry, ExperimentRegistry, AcceptanceReport
from .field import PlaneWaveField, sample_field
from .geometry import OrientedSegment, PolygonalChain, RectDomain
from .montecarlo import run_experiment
from .orchestrator import ExperimentPipeline
from .state import ExperimentKind, ExperimentState

__version__ = "0.1.0"
__all__ = [
    "ExperimentConfig",
    "load_config",
    "get_registry",
    "ExperimentRegistry",
    "AcceptanceReport",
    "PlaneWaveField",
    "sample_field",
    "OrientedSegment",
    "PolygonalChain",
    "RectDomain",
    "run_experiment",
    "ExperimentPipeline",
    "ExperimentKind",
    "ExperimentState",
]
