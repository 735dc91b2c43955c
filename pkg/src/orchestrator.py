"""
Experiment pipeline for berrylab.

Runs one experiment as a LangGraph workflow: validate the config against its
suite, plan, replicate, summarize, evaluate and persist. A dry run stops after
the plan.
"""

import logging
import time
from typing import Any, Dict

from langgraph.graph import END, StateGraph

from .config import ExperimentConfig
from .errors import BerryLabError
from .estimators import summarize
from .experiments import get_registry
from .montecarlo import run_replications
from .persistence import write_rows_csv, write_summary
from .state import ExperimentState, RunMetadata, WorkflowStatus
from .utils import generate_run_id, git_describe, resolve_threads, run_directory


logger = logging.getLogger(__name__)


class ExperimentPipeline:
    """
    Pipeline that takes a resolved config to raw rows, a summary and an acceptance report.

    This class implements:
    - Suite lookup and default resolution
    - Replication over a bounded thread pool with index-ordered collection
    - Summary statistics and acceptance evaluation
    - CSV and summary.json persistence
    """

    def __init__(self):
        self.registry = get_registry()
        self.workflow = self._build_workflow()

    def _build_workflow(self):
        """
        Build the LangGraph workflow.

        Returns:
            Compiled StateGraph
        """
        workflow = StateGraph(ExperimentState)

        workflow.add_node("validate", self.validate_node)
        workflow.add_node("plan", self.plan_node)
        workflow.add_node("replicate", self.replicate_node)
        workflow.add_node("summarize", self.summarize_node)
        workflow.add_node("evaluate", self.evaluate_node)
        workflow.add_node("persist", self.persist_node)

        workflow.set_entry_point("validate")
        workflow.add_conditional_edges("validate", self._after_validate, {"continue": "plan", "stop": END})
        workflow.add_conditional_edges("plan", self._after_plan, {"continue": "replicate", "stop": END})
        workflow.add_conditional_edges("replicate", self._after_step, {"continue": "summarize", "stop": END})
        workflow.add_edge("summarize", "evaluate")
        workflow.add_conditional_edges("evaluate", self._after_step, {"continue": "persist", "stop": END})
        workflow.add_edge("persist", END)

        return workflow.compile()

    @staticmethod
    def _after_validate(state: ExperimentState) -> str:
        return "stop" if state.failed else "continue"

    @staticmethod
    def _after_plan(state: ExperimentState) -> str:
        return "stop" if state.failed or state.dry_run else "continue"

    @staticmethod
    def _after_step(state: ExperimentState) -> str:
        return "stop" if state.failed else "continue"

    def validate_node(self, state: ExperimentState) -> ExperimentState:
        """Resolve suite defaults and the thread budget."""
        try:
            suite = self.registry.get_suite(state.experiment_config.kind)
            state.experiment_config = suite.resolve(state.experiment_config)
            state.run_info.threads = resolve_threads(state.experiment_config.threads)
            state.run_info.run_id = generate_run_id(state.experiment_config.kind.value, state.experiment_config.seed)
            state.workflow_status = WorkflowStatus.VALIDATED
        except (BerryLabError, ValueError) as e:
            state.add_error(f"Validation failed: {e}")
        return state

    def plan_node(self, state: ExperimentState) -> ExperimentState:
        suite = self.registry.get_suite(state.experiment_config.kind)
        state.plan = suite.plan(state.experiment_config)
        state.workflow_status = WorkflowStatus.PLANNED
        return state

    def replicate_node(self, state: ExperimentState) -> ExperimentState:
        """Compute every work item; rows carry their index as 'rep'."""
        cfg = state.experiment_config
        suite = self.registry.get_suite(cfg.kind)
        n = suite.work_items(cfg)
        logger.info("Starting %s: %d work items on %d thread(s)", cfg.kind.value, n, state.run_info.threads)
        start = time.perf_counter()

        def item(i: int) -> Dict[str, Any]:
            row = suite.run(cfg, i)
            return {"rep": i, **row} if suite.replicated else row

        try:
            state.rows = run_replications(item, n, state.run_info.threads)
            state.workflow_status = WorkflowStatus.REPLICATED
        except BerryLabError as e:
            state.add_error(f"Replication failed: {e}")
        state.run_info.wall_time = time.perf_counter() - start
        logger.info("Finished %s in %.2fs", cfg.kind.value, state.run_info.wall_time)
        return state

    def summarize_node(self, state: ExperimentState) -> ExperimentState:
        suite = self.registry.get_suite(state.experiment_config.kind)
        if suite.replicated and state.rows:
            columns = [c for c in state.rows[0] if c != "rep"]
            data = [[row[c] for c in columns] for row in state.rows]
            state.summary = summarize(data, columns=columns, jackknife=len(data) >= 3).to_dict()
        state.workflow_status = WorkflowStatus.SUMMARIZED
        return state

    def evaluate_node(self, state: ExperimentState) -> ExperimentState:
        suite = self.registry.get_suite(state.experiment_config.kind)
        try:
            state.report = suite.evaluate(state.experiment_config, state.rows).to_dict()
            state.workflow_status = WorkflowStatus.EVALUATED
        except BerryLabError as e:
            state.add_error(f"Evaluation failed: {e}")
        return state

    def persist_node(self, state: ExperimentState) -> ExperimentState:
        """Write rows.csv and summary.json under out_dir/<kind>-seed<seed>/."""
        cfg = state.experiment_config
        directory = run_directory(cfg.out_dir, cfg.kind.value, cfg.seed)
        try:
            rows_path = write_rows_csv(directory / "rows.csv", state.rows)
            state.run_info.git_describe = git_describe()
            summary_path = write_summary(directory / "summary.json", {
                "config": cfg.echo(),
                "seed": cfg.seed,
                "run_id": state.run_info.run_id,
                "threads": state.run_info.threads,
                "git_describe": state.run_info.git_describe,
                "wall_time_seconds": state.run_info.wall_time,
                "statistics": state.summary,
                "acceptance": state.report,
            })
            state.outputs = {"rows": str(rows_path), "summary": str(summary_path)}
            state.workflow_status = WorkflowStatus.COMPLETE
        except OSError as e:
            state.add_error(f"Persisting results failed: {e}")
        return state

    def run(self, cfg: ExperimentConfig, dry_run: bool = False) -> Dict[str, Any]:
        """
        Run the workflow for one config.

        Args:
            cfg: Validated experiment config
            dry_run: Stop after planning

        Returns:
            Final state as a dict
        """
        initial_state = ExperimentState(experiment_config=cfg, run_info=RunMetadata(), dry_run=dry_run)
        final_state = self.workflow.invoke(initial_state)

        if isinstance(final_state, dict):
            return final_state
        return {
            "experiment_config": final_state.experiment_config,
            "run_info": final_state.run_info,
            "dry_run": final_state.dry_run,
            "plan": final_state.plan,
            "rows": final_state.rows,
            "summary": final_state.summary,
            "report": final_state.report,
            "outputs": final_state.outputs,
            "workflow_status": final_state.workflow_status,
            "error_messages": final_state.error_messages,
        }
