"""Scenario runner: load a scenario file and drive its jobs through a LangGraph loop"""

from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Literal, Optional, TypedDict

import numpy as np
import scipy
import yaml
from langgraph.graph import END, START, StateGraph
from pydantic import ValidationError

from src.agents.jobs import JOB_HANDLERS, JobContext, JobOutcome, build_family
from src.models.schemas import BudgetSpec, JobReport, JobSpec, Scenario
from src.tools.functions import TestFunction, function_from_spec
from src.tools.weights import WeightFamily
from src.utils.config import settings
from src.utils.errors import ConfigError, ToolkitError
from src.utils.logger import logger
from src.utils.report_generator import RunReportWriter

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

# kinds that cannot run without a family / a function
NEEDS_FAMILY = {
    "condition", "conjugate_curve", "lemma1", "corollary1", "remark1", "lemma2", "lemma3",
    "family_gap", "lemma5", "ineq7", "ineq16", "dilation",
    "theorem1", "theorem2", "theorem3", "theorem4", "prop_h", "lemma4", "embeddings",
}
NEEDS_FUNCTION = {
    "cauchy", "taylor", "fourier",
    "theorem1", "theorem2", "theorem3", "theorem4", "prop_h", "lemma4", "embeddings",
}


# ============================================================
# SCENARIO LOADING
# ============================================================

def _loc(loc: tuple) -> str:
    parts = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file; every problem surfaces as ConfigError"""
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = yaml.safe_load(file.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid YAML ({e})") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        scenario = Scenario.model_validate(raw)
    except ValidationError as e:
        messages = [f"{_loc(err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()]
        raise ConfigError(f"{path}: " + "; ".join(messages)) from e

    for i, job in enumerate(scenario.jobs):
        if job.kind in NEEDS_FAMILY and job.family is None:
            raise ConfigError(f"{path}: jobs[{i}].family: job '{job.id}' ({job.kind}) needs a family")
        if job.kind in NEEDS_FUNCTION and job.function is None:
            raise ConfigError(f"{path}: jobs[{i}].function: job '{job.id}' ({job.kind}) needs a function")
    return scenario


def build_functions(scenario: Scenario) -> dict[str, TestFunction]:
    return {name: function_from_spec(spec) for name, spec in scenario.functions.items()}


def build_families(scenario: Scenario) -> dict[str, WeightFamily]:
    eps = scenario.tolerances.eps_check
    return {name: build_family(spec, eps) for name, spec in scenario.families.items()}


def list_jobs(scenario: Scenario) -> list[str]:
    return [
        f"{job.id}\t{job.kind}\t{job.family or '-'}\t{job.function or '-'}"
        for job in scenario.jobs
    ]


# ============================================================
# SINGLE JOB
# ============================================================

def make_context(scenario: Scenario, functions: dict[str, TestFunction], index: int,
                 seed: int, budgets: BudgetSpec) -> JobContext:
    """Fresh family per job, so memo caches never cross jobs"""
    job = scenario.jobs[index]
    eps = scenario.tolerances.eps_check
    family = build_family(scenario.families[job.family], eps) if job.family else None
    return JobContext(
        job=job,
        index=index,
        family=family,
        function=functions.get(job.function) if job.function else None,
        budgets=budgets,
        rng=np.random.default_rng([seed, index]),
        eps_check=eps,
    )


def _failed(job: JobSpec, message: str, error: str) -> JobOutcome:
    return JobOutcome(JobReport(
        job_id=job.id,
        kind=job.kind,
        family=job.family,
        function=job.function,
        params=job.params,
        passed=False,
        message=message,
        details={"error": error},
    ))


def execute_job(ctx: JobContext) -> JobOutcome:
    """Run one job; errors become a failed report naming the job"""
    job = ctx.job
    try:
        outcome = JOB_HANDLERS[job.kind](ctx)
    except ToolkitError as e:
        logger.warning(f"Job {job.id} ({job.kind}) failed: {type(e).__name__}: {e}")
        return _failed(job, f"{job.id} ({job.kind}): {e}", type(e).__name__)
    except Exception as e:
        logger.error(f"Job {job.id} ({job.kind}) crashed: {e}", exc_info=True)
        return _failed(job, f"{job.id} ({job.kind}): unexpected {type(e).__name__}: {e}", type(e).__name__)

    status = "pass" if outcome.report.passed else "FAIL"
    logger.info(f"Job {job.id} ({job.kind}): {status} | {outcome.report.message}")
    return outcome


# ============================================================
# STATE
# ============================================================

class RunState(TypedDict):
    """State of a scenario run"""
    name: str
    scenario: Scenario
    functions: dict
    seed: int
    budgets: BudgetSpec
    workers: int
    writer: RunReportWriter
    next_index: int
    batch: list[int]
    outcomes: list[JobOutcome]
    reports: list[JobReport]


# ============================================================
# NODES
# ============================================================

def fetch_next_node(state: RunState) -> dict:
    """Take the next batch of up to `workers` jobs"""
    start = state["next_index"]
    stop = min(start + state["workers"], len(state["scenario"].jobs))
    batch = list(range(start, stop))
    logger.info(f"Jobs {start + 1}-{stop} of {len(state['scenario'].jobs)}")
    return {"batch": batch, "next_index": stop}


def execute_node(state: RunState) -> dict:
    """Run the batch in parallel; outcomes keep job order"""
    contexts = [
        make_context(state["scenario"], state["functions"], i, state["seed"], state["budgets"])
        for i in state["batch"]
    ]
    if state["workers"] == 1:
        outcomes = [execute_job(ctx) for ctx in contexts]
    else:
        with ThreadPoolExecutor(max_workers=state["workers"]) as pool:
            outcomes = list(pool.map(execute_job, contexts))
    return {"outcomes": outcomes}


def record_node(state: RunState) -> dict:
    """Write reports and plot data serially"""
    writer = state["writer"]
    for outcome in state["outcomes"]:
        writer.write_job_report(outcome.report)
        for name, frame in outcome.plots.items():
            writer.write_plot(name, frame)
    return {"reports": state["reports"] + [o.report for o in state["outcomes"]], "outcomes": []}


def summarize_node(state: RunState) -> dict:
    writer = state["writer"]
    reports = state["reports"]
    writer.write_summary(reports)
    writer.write_digest(state["name"], reports)
    passed = sum(r.passed for r in reports)
    logger.info(f"Summary: {passed}/{len(reports)} jobs passed")
    return {"outcomes": []}


def should_continue_run(state: RunState) -> Literal["continue", "end"]:
    if state["next_index"] < len(state["scenario"].jobs):
        return "continue"
    return "end"


# ============================================================
# GRAPH
# ============================================================

def create_scenario_graph():
    """Build the run loop: fetch -> execute -> record -> (fetch | summarize)"""

    workflow = StateGraph(RunState)

    workflow.add_node("fetch_next", fetch_next_node)
    workflow.add_node("execute", execute_node)
    workflow.add_node("record", record_node)
    workflow.add_node("summarize", summarize_node)

    workflow.add_edge(START, "fetch_next")
    workflow.add_edge("fetch_next", "execute")
    workflow.add_edge("execute", "record")
    workflow.add_conditional_edges(
        "record",
        should_continue_run,
        {
            "continue": "fetch_next",
            "end": "summarize",
        },
    )
    workflow.add_edge("summarize", END)

    return workflow.compile()


# ============================================================
# ENTRY POINT
# ============================================================

def exit_code(reports: list[JobReport]) -> int:
    if any(r.details.get("error") == "ConfigError" for r in reports):
        return EXIT_CONFIG
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def run_scenario(path: str, jobs: int = 1, seed: Optional[int] = None, out: Optional[str] = None,
                 budget_scale: float = 1.0) -> int:
    """
    Run every job of a scenario file and write the artifacts

    Returns 0 when all jobs pass, 1 when any fails, 2 on a config error.
    """
    started = datetime.now()
    seed = settings.default_seed if seed is None else seed

    logger.info("=" * 60)
    logger.info(f"SCENARIO RUN: {path}")
    logger.info("=" * 60)

    try:
        if jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {jobs}")
        if budget_scale <= 0:
            raise ConfigError(f"--budget-scale must be > 0, got {budget_scale}")
        scenario = load_scenario(path)
        functions = build_functions(scenario)
        build_families(scenario)
        budgets = scenario.budgets.scaled(budget_scale)
    except ToolkitError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG

    writer = RunReportWriter(out or scenario.output_dir or settings.output_dir)
    writer.prepare()

    initial_state: RunState = {
        "name": Path(path).stem,
        "scenario": scenario,
        "functions": functions,
        "seed": seed,
        "budgets": budgets,
        "workers": jobs,
        "writer": writer,
        "next_index": 0,
        "batch": [],
        "outcomes": [],
        "reports": [],
    }
    batches = -(-len(scenario.jobs) // jobs)
    app = create_scenario_graph()

    try:
        final = app.invoke(initial_state, {"recursion_limit": 10 + 4 * batches})
    except KeyboardInterrupt:
        logger.info("Run stopped by user")
        return EXIT_FAILED

    reports = final["reports"]
    writer.write_meta(
        {
            "scenario": str(path),
            "seed": seed,
            "jobs": jobs,
            "budget_scale": budget_scale,
            "budgets": budgets.model_dump(),
            "eps_check": scenario.tolerances.eps_check,
            "job_count": len(reports),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        started,
    )
    code = exit_code(reports)
    logger.info("=" * 60)
    logger.info(f"RUN COMPLETE: exit {code} | results in {writer.out_dir}")
    logger.info("=" * 60)
    return code
