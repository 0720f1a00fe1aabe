"""Experiment harness: single runs, seed sweeps and lowered-depth reports, with their artifacts."""

import csv
import io
import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import structlog
from pydantic import BaseModel, ConfigDict, Field

from tridiag_vqls.circuits import depth, gate_count
from tridiag_vqls.config import ConfigError, ExperimentConfig, dump_config
from tridiag_vqls.decomposition import Scheme, TridiagonalSpec
from tridiag_vqls.estimators import hadamard_test_circuit
from tridiag_vqls.gateways import ArtifactGateway
from tridiag_vqls.lowering import lower_to_basis
from tridiag_vqls.vqls import (
    AnsatzSpec,
    IterationListener,
    OptimizationTrace,
    OptimizerAbortError,
    Params,
    build_problem,
    cost_circuits,
    optimize,
)

logger = structlog.get_logger()

TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.txt"
TIMING_FILE = "timing.json"
AGGREGATE_FILE = "aggregate.csv"
AGGREGATE_HEADER = ("seed", "final_cost", "final_fidelity", "best_fidelity", "evaluations")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


class DepthReport(BaseModel):
    """Lowered Hadamard-test circuit sizes for one decomposition scheme."""
    model_config = ConfigDict(frozen=True)

    scheme: Scheme = Field(..., description="Decomposition scheme")
    terms: int = Field(..., ge=0, description="Unitary terms in the decomposition")
    circuits: int = Field(..., ge=0, description="Hadamard-test circuits one cost evaluation needs")
    max_depth: int = Field(..., ge=0, description="Deepest lowered Hadamard-test circuit")
    total_gates: int = Field(..., ge=0, description="Basis gates over all lowered circuits")
    max_term_depth: int = Field(..., ge=0, description="Deepest lowered bare A_l^dagger A_l' product")

    def line(self) -> str:
        return (f"{self.scheme} terms={self.terms} circuits={self.circuits} max_depth={self.max_depth} "
                f"total_gates={self.total_gates} max_term_depth={self.max_term_depth}")


def depth_report(spec: TridiagonalSpec, scheme: Scheme, ansatz: Optional[AnsatzSpec] = None) -> DepthReport:
    """Lower every real-part Hadamard test of the cost to single-qubit gates and CNOT and measure it.

    Depths do not depend on the angle values, so the ansatz is taken at zero angles.

    Args:
        spec (TridiagonalSpec): The matrix whose cost circuits are measured.
        scheme (Scheme): Decomposition scheme.
        ansatz (AnsatzSpec, optional): Ansatz inside the circuits. Defaults to the product ansatz.

    Returns:
        DepthReport: Term and circuit counts with the largest lowered depth.
    """
    ansatz = ansatz or AnsatzSpec(n=spec.n)
    prob = build_problem(spec, scheme)
    params = Params(theta=(0.0,) * ansatz.parameter_count)

    max_depth = total_gates = max_term_depth = 0
    circuits = cost_circuits(prob, ansatz, params)
    for circuit in circuits:
        lowered = lower_to_basis(hadamard_test_circuit(circuit.prep, circuit.unitary))
        max_depth = max(max_depth, depth(lowered))
        total_gates += gate_count(lowered)
        if circuit.kind == "pair":
            max_term_depth = max(max_term_depth, depth(lower_to_basis(circuit.unitary)))

    report = DepthReport(
        scheme=scheme,
        terms=len(prob.decomposition),
        circuits=len(circuits),
        max_depth=max_depth,
        total_gates=total_gates,
        max_term_depth=max_term_depth,
    )
    logger.info("Depth report built", scheme=scheme, n=spec.n, max_depth=max_depth, total_gates=total_gates)
    return report


class RunSummary(BaseModel):
    """Outcome of one run as written to ``summary.json``; wall time goes to ``timing.json``."""
    model_config = ConfigDict(frozen=True)

    final_cost: float
    final_fidelity: float
    best_fidelity: float
    iterations: int = Field(..., ge=1, description="Recorded iterates")
    evaluations: int = Field(..., ge=1, description="Cost evaluations")
    term_count: int = Field(..., ge=0, description="Unitary terms in the decomposition")
    max_depth: int = Field(..., ge=0, description="Deepest lowered Hadamard-test circuit")
    scheme: Scheme
    cost: str
    mode: str
    seed: int
    max_evals: int
    tol: float
    converged: bool


def summarize(config: ExperimentConfig, trace: OptimizationTrace, report: DepthReport) -> RunSummary:
    """Collect the reported values of one run.

    Args:
        config (ExperimentConfig): The effective configuration of the run.
        trace (OptimizationTrace): The full trace, or the partial trace of an aborted run.
        report (DepthReport): Depth report of the run's scheme.

    Returns:
        RunSummary: Everything ``summary.json`` holds.
    """
    return RunSummary(
        final_cost=trace.final_cost,
        final_fidelity=trace.final_fidelity,
        best_fidelity=trace.best_fidelity,
        iterations=len(trace.iterations),
        evaluations=trace.evaluations,
        term_count=report.terms,
        max_depth=report.max_depth,
        scheme=config.scheme,
        cost=config.cost,
        mode=config.mode,
        seed=config.seed,
        max_evals=config.max_evals,
        tol=config.tol,
        converged=trace.converged,
    )


def trace_csv(trace: OptimizationTrace) -> str:
    """``iter,cost,fidelity,theta_0,...`` with one row per recorded iterate."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    width = len(trace.iterations[0].params.theta)
    writer.writerow(["iter", "cost", "fidelity"] + [f"theta_{k}" for k in range(width)])
    for entry in trace.iterations:
        writer.writerow([entry.iteration, _fmt(entry.cost), _fmt(entry.fidelity)] + [_fmt(t) for t in entry.params.theta])
    return buffer.getvalue()


def summary_json(summary: RunSummary) -> str:
    """``summary.json`` text: sorted keys, two-space indent and a trailing newline.

    Args:
        summary (RunSummary): The run summary.

    Returns:
        str: The JSON document.
    """
    return json.dumps(summary.model_dump(), indent=2, sort_keys=True) + "\n"


def _write_run_artifacts(
    gateway: ArtifactGateway,
    config: ExperimentConfig,
    trace: OptimizationTrace,
    report: DepthReport,
    wall_time: float,
) -> RunSummary:
    out = Path(config.output)
    summary = summarize(config, trace, report)
    gateway.write_text(out / TRACE_FILE, trace_csv(trace))
    gateway.write_text(out / SUMMARY_FILE, summary_json(summary))
    gateway.write_text(out / TIMING_FILE, json.dumps({"wall_time_s": wall_time}, indent=2) + "\n")
    logger.info("Run artifacts written", output=str(out), iterations=summary.iterations)
    return summary


def run_experiment(
    config: ExperimentConfig,
    gateway: Optional[ArtifactGateway] = None,
    listener: Optional[IterationListener] = None,
) -> RunSummary:
    """Optimize one configuration and write ``trace.csv``, ``summary.json``, ``config.txt`` and ``timing.json``.

    Args:
        config (ExperimentConfig): The run; artifacts go to ``config.output``.
        gateway (ArtifactGateway, optional): Artifact gateway. Defaults to a filesystem gateway.
        listener (IterationListener, optional): Called with every recorded iterate.

    Returns:
        RunSummary: The values written to ``summary.json``.

    Raises:
        OptimizerAbortError: After the partial artifacts have been written.
        OSError: If the output directory cannot be written.
    """
    gateway = gateway or ArtifactGateway()
    out = Path(config.output)
    gateway.ensure_directory(out)
    gateway.write_text(out / CONFIG_FILE, dump_config(config))

    spec = config.tridiagonal_spec()
    ansatz = config.ansatz_spec()
    report = depth_report(spec, config.scheme, ansatz)
    prob = build_problem(spec, config.scheme)

    started = time.perf_counter()
    try:
        trace = optimize(prob, ansatz, config.cost, config.eval_mode(), config.optimizer_settings(), listener)
    except OptimizerAbortError as e:
        if e.trace is not None:
            _write_run_artifacts(gateway, config, e.trace, report, time.perf_counter() - started)
        raise
    return _write_run_artifacts(gateway, config, trace, report, time.perf_counter() - started)


def seed_config(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    """The configuration of one sweep member, writing under ``<output>/seed-<seed>``."""
    return config.model_copy(update={"seed": seed, "output": str(Path(config.output) / f"seed-{seed}")})


def aggregate_csv(summaries: Sequence[RunSummary]) -> str:
    """Per-seed final values in seed order, then a ``median`` row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(AGGREGATE_HEADER)
    for s in summaries:
        writer.writerow([s.seed, _fmt(s.final_cost), _fmt(s.final_fidelity), _fmt(s.best_fidelity), s.evaluations])
    writer.writerow([
        "median",
        _fmt(statistics.median(s.final_cost for s in summaries)),
        _fmt(statistics.median(s.final_fidelity for s in summaries)),
        _fmt(statistics.median(s.best_fidelity for s in summaries)),
        _fmt(statistics.median(s.evaluations for s in summaries)),
    ])
    return buffer.getvalue()


class SweepAbortError(OptimizerAbortError):
    """Raised after a sweep in which some members aborted; the others ran and were aggregated."""

    def __init__(self, aborted: Sequence[int], summaries: Sequence[RunSummary]):
        self.aborted = list(aborted)
        self.summaries = list(summaries)
        super().__init__(f"{len(self.aborted)} sweep run(s) aborted, seeds {self.aborted}")


def run_sweep(
    config: ExperimentConfig,
    seeds: Sequence[int],
    gateway: Optional[ArtifactGateway] = None,
    jobs: int = 1,
) -> List[RunSummary]:
    """Run one experiment per seed and write ``aggregate.csv`` to the sweep's output directory.

    Runs may execute concurrently; the aggregate is assembled in the order of ``seeds``. A member
    whose optimizer aborts keeps its partial artifacts and is left out of the aggregate while the
    remaining seeds still run.

    Args:
        config (ExperimentConfig): The shared configuration; each member gets its own seed and
            ``seed-<s>`` directory.
        seeds (Sequence[int]): Seeds to run, in aggregate order.
        gateway (ArtifactGateway, optional): Artifact gateway. Defaults to a filesystem gateway.
        jobs (int, optional): Members run concurrently when greater than one. Defaults to 1.

    Returns:
        List[RunSummary]: The summaries of every member, in the order of ``seeds``.

    Raises:
        ConfigError: If ``seeds`` is empty.
        SweepAbortError: After the aggregate of the completed members has been written.
    """
    if not seeds:
        raise ConfigError("A sweep needs at least one seed")
    gateway = gateway or ArtifactGateway()
    out = Path(config.output)
    gateway.ensure_directory(out)
    members = [seed_config(config, seed) for seed in seeds]
    logger.info("Sweep started", seeds=list(seeds), jobs=jobs, output=str(out))

    def run_member(member: ExperimentConfig) -> Optional[RunSummary]:
        try:
            return run_experiment(member, gateway)
        except OptimizerAbortError as e:
            logger.warning("Sweep run aborted", seed=member.seed, reason=str(e))
            return None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_member, members))
    else:
        outcomes = [run_member(member) for member in members]

    summaries = [s for s in outcomes if s is not None]
    aborted = [member.seed for member, s in zip(members, outcomes) if s is None]
    if summaries:
        gateway.write_text(out / AGGREGATE_FILE, aggregate_csv(summaries))
    logger.info("Sweep finished", runs=len(summaries), aborted=aborted, output=str(out))
    if aborted:
        raise SweepAbortError(aborted, summaries)
    return summaries
