"""
State management for berrylab.

Defines the experiment kinds and the state passed through the experiment pipeline.
"""

from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field
from enum import Enum
from datetime import datetime


class ExperimentKind(str, Enum):
    """Enumeration of experiment suites."""
    NODAL_LENGTH = "nodal-length"
    VARIANCE_SCAN = "variance-scan"
    SHEET_COV = "sheet-cov"
    CHAOS2_VAR = "chaos2-var"
    CHAOS2_COV = "chaos2-cov"
    DISORDER = "disorder"
    COV_TABLE = "cov-table"
    SUP_DISCRETIZED = "sup-discretized"
    WHITENOISE = "whitenoise"
    SUP_MOMENT = "sup-moment"
    FIELD_COV = "field-cov"
    RESCALING = "rescaling"
    INCREMENT_SCALING = "increment-scaling"


class WorkflowStatus(str, Enum):
    """Pipeline progress markers."""
    INITIALIZED = "initialized"
    VALIDATED = "validated"
    PLANNED = "planned"
    REPLICATED = "replicated"
    SUMMARIZED = "summarized"
    EVALUATED = "evaluated"
    COMPLETE = "complete"
    FAILED = "failed"


@dataclass
class RunMetadata:
    """Metadata about the current run."""
    run_id: str = ""
    started_at: datetime = field(default_factory=datetime.now)
    threads: int = 1
    wall_time: float = 0.0
    git_describe: str = "unknown"


@dataclass
class ExperimentState:
    """
    State object passed through the LangGraph experiment pipeline.

    Tracks the resolved config, the plan, raw replication rows, the summary,
    the acceptance report and the files written.
    """
    experiment_config: Any = None
    run_info: RunMetadata = field(default_factory=RunMetadata)
    dry_run: bool = False
    plan: List[str] = field(default_factory=list)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Optional[Dict[str, Any]] = None
    report: Optional[Dict[str, Any]] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    workflow_status: WorkflowStatus = WorkflowStatus.INITIALIZED
    error_messages: List[str] = field(default_factory=list)

    def add_error(self, error: str) -> None:
        """Add an error message to the state."""
        self.error_messages.append(error)
        self.workflow_status = WorkflowStatus.FAILED

    @property
    def failed(self) -> bool:
        return self.workflow_status == WorkflowStatus.FAILED
