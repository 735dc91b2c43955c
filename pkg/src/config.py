"""
Experiment configuration.

A config is resolved from three layers, later ones winning: a JSON file, the
THREADS environment variable and explicit overrides (CLI flags). The merged
model is what summary.json echoes.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .bumps import TestFunction, parse_bump
from .errors import ConfigurationError
from .geometry import PolygonalChain, RectDomain, parse_chain
from .state import ExperimentKind


# Load environment variables
dotenv.load_dotenv()

logger = logging.getLogger(__name__)

MIN_ENERGY = 10.0
DEFAULT_OUT_DIR = "results"


class ExperimentConfig(BaseModel):
    """Validated configuration of one experiment run."""
    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind
    energies: Optional[List[float]] = None
    n_waves: Optional[int] = Field(default=None, ge=2)
    ppw: int = Field(default=10, ge=4)
    K: Optional[int] = Field(default=None, ge=1)
    n_reps: int = Field(default=200, ge=2)
    seed: int = Field(default=0, ge=0)
    chains: List[Any] = Field(default_factory=list)
    rects: List[List[float]] = Field(default_factory=list)
    points: List[List[float]] = Field(default_factory=list)
    bumps: List[Dict[str, Any]] = Field(default_factory=list)
    radii: List[float] = Field(default_factory=list)
    lags: List[float] = Field(default_factory=list)
    z_values: List[float] = Field(default_factory=list)
    segments: List[List[float]] = Field(default_factory=list)
    out_dir: str = DEFAULT_OUT_DIR
    threads: int = Field(default=1, ge=1)
    slow: bool = False

    @field_validator("energies")
    @classmethod
    def _check_energies(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is None:
            return v
        if not v:
            raise ValueError("at least one energy is required")
        for e in v:
            if not e >= MIN_ENERGY:
                raise ValueError(f"energies must be >= {MIN_ENERGY:g}, got {e}")
        return v

    @field_validator("chains")
    @classmethod
    def _check_chains(cls, v: List[Any]) -> List[Any]:
        for literal in v:
            parse_chain(literal)
        return v

    @field_validator("rects", "points")
    @classmethod
    def _check_unit_points(cls, v: List[List[float]]) -> List[List[float]]:
        for p in v:
            if len(p) != 2:
                raise ValueError(f"expected a pair [t1, t2], got {p}")
            RectDomain.anchored(p[0], p[1])
        return v

    @field_validator("bumps")
    @classmethod
    def _check_bumps(cls, v: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        for literal in v:
            parse_bump(literal).require_inside_unit_square()
        return v

    @field_validator("radii")
    @classmethod
    def _check_radii(cls, v: List[float]) -> List[float]:
        if any(not r > 0 for r in v):
            raise ValueError("radii must be positive")
        return v

    @field_validator("segments")
    @classmethod
    def _check_segments(cls, v: List[List[float]]) -> List[List[float]]:
        for row in v:
            if len(row) != 4 or row[0] <= 0 or row[1] <= 0 or row[3] < 0:
                raise ValueError(f"segment configs are [lambda1 > 0, lambda2 > 0, theta, gap >= 0], got {row}")
        return v

    @model_validator(mode="after")
    def _check_sorted_energies(self) -> "ExperimentConfig":
        if self.kind == ExperimentKind.SUP_MOMENT and self.energies is not None:
            if len(self.energies) < 4:
                raise ValueError("sup-moment needs at least 4 energies")
            if sorted(self.energies) != list(self.energies):
                raise ValueError("sup-moment energies must be sorted")
        return self

    def chain_objects(self) -> List[PolygonalChain]:
        return [parse_chain(c) for c in self.chains]

    def rect_domains(self) -> List[RectDomain]:
        return [RectDomain.anchored(t1, t2) for t1, t2 in self.rects]

    def point_tuples(self) -> List[tuple]:
        return [(float(t1), float(t2)) for t1, t2 in self.points]

    def test_functions(self) -> List[TestFunction]:
        return [parse_bump(b) for b in self.bumps]

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy of the resolved config."""
        return self.model_dump(mode="json")


def _read_file(path: Union[str, Path]) -> Dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"Config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file {p} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {p} must hold a JSON object")
    return data


def _env_layer() -> Dict[str, Any]:
    layer: Dict[str, Any] = {}
    threads = os.getenv("THREADS")
    if threads:
        try:
            layer["threads"] = int(threads)
        except ValueError as e:
            raise ConfigurationError(f"THREADS must be an integer, got '{threads}'") from e
    out = os.getenv("BERRYLAB_OUT")
    if out:
        layer["out_dir"] = out
    return layer


def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Resolve an ExperimentConfig from file, environment and overrides.

    Args:
        path: Optional JSON config file
        overrides: Values that win over everything else; None entries are ignored

    Returns:
        The validated config

    Raises:
        ConfigurationError: If the file is missing or malformed, or validation fails
    """
    merged: Dict[str, Any] = {}
    if path is not None:
        merged.update(_read_file(path))
    merged.update(_env_layer())
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        cfg = ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid experiment config: {e}") from e
    logger.info("Resolved %s config: energies=%s, n_reps=%d, threads=%d",
                cfg.kind.value, cfg.energies, cfg.n_reps, cfg.threads)
    return cfg
