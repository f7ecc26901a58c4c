"""Run execution, artifact files, parallel sweeps, and curvature reports.

A run produces two files in its output directory: ``trace.csv`` with the
pinned header ``iteration,best_energy,abs_error,evaluations,wall_ms`` and
``run.json`` with the config snapshot and outcome summary.  Floats in CSV
artifacts are printed with 15 significant digits, which round-trips the
recorded (pre-quantized) values exactly.

``wall_ms`` is the only nondeterministic trace column; comparisons between
repeated runs should go through :func:`trace_without_wall_ms`.
"""

from __future__ import annotations

import datetime
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hive_vqe.ansatz import HvaCircuit
from hive_vqe.config import (
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    config_mapping,
    with_overrides,
)
from hive_vqe.diagnostics import hessian, qfim, spectrum_report
from hive_vqe.hamiltonian import TfimSpec, build_tfim, exact_ground_energy
from hive_vqe.loss import VqeObjective
from hive_vqe.optimizers import (
    ConvergenceTrace,
    DivergenceError,
    TraceRecord,
    run_optimization,
)

TRACE_HEADER = "iteration,best_energy,abs_error,evaluations,wall_ms"

THREADS_ENV_VAR = "HIVE_VQE_THREADS"


def _fmt(value: float) -> str:
    return f"{float(value):.15g}"


def _derived_seed(seed: int, index: int) -> int:
    """Deterministic child seed for restart ``index`` of a base seed."""
    words = np.random.SeedSequence([seed, index]).generate_state(2)
    return int(words[0]) | (int(words[1]) << 32)


@dataclass(frozen=True)
class RestartSummary:
    """Outcome of one gradient-descent restart inside a best-of-k run."""

    index: int
    seed: int
    reached_target: bool
    diverged: bool
    iterations: int
    final_abs_error: float


@dataclass
class RunArtifact:
    """Everything a single optimization run produced."""

    config: ExperimentConfig
    optimizer: str
    seed: int
    ground_energy: float
    trace: ConvergenceTrace
    restarts: tuple[RestartSummary, ...] | None
    started_at: str
    duration_ms: float


def build_problem(config: ExperimentConfig) -> tuple[HvaCircuit, VqeObjective]:
    """Circuit and counted objective for a config, with the exact reference set."""
    spec = TfimSpec(n=config.qubits, h=config.h, boundary=config.boundary)
    circuit = HvaCircuit(n=config.qubits, layers=config.depth, boundary=config.boundary)
    hamiltonian = build_tfim(spec)
    reference = exact_ground_energy(spec)
    return circuit, VqeObjective(circuit, hamiltonian, reference=reference)


def _restart_sort_key(item: tuple[RestartSummary, ConvergenceTrace]) -> tuple:
    summary = item[0]
    if summary.diverged:
        return (2, float("inf"), summary.index)
    if summary.reached_target:
        return (0, summary.iterations, summary.index)
    error = summary.final_abs_error
    return (1, error if np.isfinite(error) else float("inf"), summary.index)


def execute_run(config: ExperimentConfig) -> RunArtifact:
    """Run the configured optimizer on the configured chain.

    The swarm runs once with the config seed.  Gradient descent runs
    ``adam_restarts`` times from independent uniform starts (restart ``r``
    seeds its stream from the pair ``(seed, r)``) and keeps the best run:
    fastest to reach the target, else lowest final error.  If every restart
    diverges the last divergence is re-raised.
    """
    started_at = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    start = time.perf_counter()
    spec = TfimSpec(n=config.qubits, h=config.h, boundary=config.boundary)
    ground = exact_ground_energy(spec)

    if config.optimizer == "boa":
        _, objective = build_problem(config)
        trace = run_optimization(
            objective, config.boa, config.seed,
            max_iterations=config.max_iterations, target=config.target,
        )
        restarts = None
        seed = config.seed
    elif config.optimizer == "adam":
        completed: list[tuple[RestartSummary, ConvergenceTrace]] = []
        last_divergence: DivergenceError | None = None
        for index in range(config.adam_restarts):
            restart_seed = _derived_seed(config.seed, index)
            _, objective = build_problem(config)
            try:
                trace = run_optimization(
                    objective, config.adam, restart_seed,
                    max_iterations=config.max_iterations, target=config.target,
                )
                diverged = False
            except DivergenceError as exc:
                trace = exc.trace
                diverged = True
                last_divergence = exc
            completed.append((
                RestartSummary(
                    index=index,
                    seed=restart_seed,
                    reached_target=trace.reached_target,
                    diverged=diverged,
                    iterations=trace.iterations,
                    final_abs_error=trace.final_abs_error,
                ),
                trace,
            ))
        if all(summary.diverged for summary, _ in completed):
            assert last_divergence is not None
            raise last_divergence
        best_summary, trace = min(completed, key=_restart_sort_key)
        restarts = tuple(summary for summary, _ in completed)
        seed = best_summary.seed
    else:
        raise ConfigError(f"optimizer: unsupported optimizer {config.optimizer!r}")

    return RunArtifact(
        config=config,
        optimizer=config.optimizer,
        seed=seed,
        ground_energy=ground,
        trace=trace,
        restarts=restarts,
        started_at=started_at,
        duration_ms=(time.perf_counter() - start) * 1e3,
    )


def write_trace_csv(records: list[TraceRecord], path: str | Path) -> None:
    """Write trace rows with the pinned header and 15-significant-digit floats."""
    lines = [TRACE_HEADER]
    for r in records:
        lines.append(
            f"{r.iteration},{_fmt(r.best_energy)},{_fmt(r.abs_error)},"
            f"{r.evaluations},{_fmt(r.wall_ms)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace_csv(path: str | Path) -> list[TraceRecord]:
    """Parse a trace file back into records, validating the exact header."""
    text = Path(path).read_text()
    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: expected header {TRACE_HEADER!r}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        records.append(
            TraceRecord(
                iteration=int(parts[0]),
                best_energy=float(parts[1]),
                abs_error=float(parts[2]),
                evaluations=int(parts[3]),
                wall_ms=float(parts[4]),
            )
        )
    return records


def trace_without_wall_ms(text: str) -> str:
    """Trace CSV text with the timing column removed, for determinism checks."""
    kept = []
    for line in text.splitlines():
        if line:
            kept.append(line.rsplit(",", 1)[0])
    return "\n".join(kept) + "\n"


def save_run(artifact: RunArtifact, out_dir: str | Path) -> dict[str, Path]:
    """Write trace.csv and run.json into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.csv"
    json_path = out_dir / "run.json"
    write_trace_csv(artifact.trace.records, trace_path)

    records = artifact.trace.records
    best = artifact.trace.best_parameters
    payload = {
        "schema_version": SCHEMA_VERSION,
        "optimizer": artifact.optimizer,
        "seed": artifact.seed,
        "config": config_mapping(artifact.config),
        "ground_energy": artifact.ground_energy,
        "terminated_by": artifact.trace.terminated_by.value,
        "reached_target": artifact.trace.reached_target,
        "iterations": artifact.trace.iterations,
        "final_energy": records[-1].best_energy if records else None,
        "final_abs_error": artifact.trace.final_abs_error,
        "evaluations": records[-1].evaluations if records else 0,
        "best_parameters": None if best is None else [float(x) for x in best],
        "started_at": artifact.started_at,
        "duration_ms": artifact.duration_ms,
        "restarts": None if artifact.restarts is None else [
            {
                "index": s.index,
                "seed": s.seed,
                "reached_target": s.reached_target,
                "diverged": s.diverged,
                "iterations": s.iterations,
                "final_abs_error": s.final_abs_error,
            }
            for s in artifact.restarts
        ],
    }
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return {"trace": trace_path, "run": json_path}


def cell_name(qubits: int, depth: int, optimizer: str, seed: int) -> str:
    return f"n{qubits}_L{depth}_{optimizer}_seed{seed}"


def worker_count(jobs: int) -> int:
    """Pool size for sweeps: CPU count capped by the threads env var."""
    limit = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(
                f"{THREADS_ENV_VAR}: expected a positive integer, got {raw!r}"
            ) from None
        if value < 1:
            raise ConfigError(f"{THREADS_ENV_VAR}: expected a positive integer, got {value}")
        limit = min(limit, value)
    return max(1, min(limit, jobs))


def _sweep_job(args: tuple[ExperimentConfig, int, int, str, int, str]) -> dict[str, object]:
    base, qubits, depth, optimizer, seed, out_root = args
    name = cell_name(qubits, depth, optimizer, seed)
    row: dict[str, object] = {
        "cell": name, "qubits": qubits, "depth": depth,
        "optimizer": optimizer, "seed": seed,
        "reached_target": False, "iterations": 0,
        "final_abs_error": float("nan"), "error": "",
    }
    cell_dir = Path(out_root) / name
    try:
        cfg = with_overrides(base, seed=seed, qubits=qubits, depth=depth, optimizer=optimizer)
        artifact = execute_run(cfg)
        save_run(artifact, cell_dir)
        row["reached_target"] = artifact.trace.reached_target
        row["iterations"] = artifact.trace.iterations
        row["final_abs_error"] = artifact.trace.final_abs_error
    except Exception as exc:  # noqa: BLE001  record the failure, keep sweeping
        cell_dir.mkdir(parents=True, exist_ok=True)
        message = f"{type(exc).__name__}: {exc}"
        (cell_dir / "error.txt").write_text(message + "\n")
        row["error"] = message
    return row


SUMMARY_HEADER = (
    "qubits,depth,optimizer,runs,successes,success_rate,"
    "median_iterations_to_target,median_final_abs_error,errors"
)


@dataclass
class SweepResult:
    """Per-run rows plus the aggregated summary table."""

    rows: list[dict[str, object]]
    summary_rows: list[dict[str, object]]
    summary_path: Path
    error_count: int


def run_sweep(config: ExperimentConfig, out_dir: str | Path) -> SweepResult:
    """Run the configured grid x optimizer x seed product and aggregate.

    Jobs are independent processes (pool size capped by HIVE_VQE_THREADS);
    each writes its own artifact directory, so per-run outputs are identical
    for any pool size.  A failed run leaves error.txt in its cell directory
    and an ``error`` entry in its summary row; the sweep continues.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (config, qubits, depth, optimizer, seed, str(out_dir))
        for qubits, depth in config.sweep_grid
        for optimizer in config.sweep_optimizers
        for seed in config.sweep_seeds
    ]
    workers = worker_count(len(jobs))
    if workers == 1:
        rows = [_sweep_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_job, jobs, chunksize=1))

    summary_rows = []
    for qubits, depth in config.sweep_grid:
        for optimizer in config.sweep_optimizers:
            group = [
                row for row in rows
                if row["qubits"] == qubits and row["depth"] == depth
                and row["optimizer"] == optimizer
            ]
            completed = [row for row in group if not row["error"]]
            successes = [row for row in completed if row["reached_target"]]
            summary_rows.append({
                "qubits": qubits,
                "depth": depth,
                "optimizer": optimizer,
                "runs": len(group),
                "successes": len(successes),
                "success_rate": len(successes) / len(group) if group else 0.0,
                "median_iterations_to_target": (
                    statistics.median(row["iterations"] for row in successes)
                    if successes else None
                ),
                "median_final_abs_error": (
                    statistics.median(row["final_abs_error"] for row in completed)
                    if completed else None
                ),
                "errors": len(group) - len(completed),
            })

    lines = [SUMMARY_HEADER]
    for row in summary_rows:
        med_iters = row["median_iterations_to_target"]
        med_err = row["median_final_abs_error"]
        lines.append(
            f"{row['qubits']},{row['depth']},{row['optimizer']},{row['runs']},"
            f"{row['successes']},{_fmt(row['success_rate'])},"
            f"{'' if med_iters is None else _fmt(med_iters)},"
            f"{'' if med_err is None else _fmt(med_err)},{row['errors']}"
        )
    summary_path = out_dir / "summary.csv"
    summary_path.write_text("\n".join(lines) + "\n")
    error_count = sum(1 for row in rows if row["error"])
    return SweepResult(rows, summary_rows, summary_path, error_count)


def resolve_theta(config: ExperimentConfig, source: str) -> tuple[np.ndarray, str]:
    """Parameter vector for diagnostics: ``zeros``, ``best``, or a file path.

    ``zeros`` probes the uniform-superposition point.  ``best`` runs the
    configured optimizer and takes the lowest-energy parameters it found.
    Anything else is read as a text file of whitespace-separated floats.
    """
    dim = 2 * config.depth
    if source == "zeros":
        return np.zeros(dim), "zeros"
    if source == "best":
        artifact = execute_run(config)
        theta = artifact.trace.best_parameters
        if theta is None:
            raise ConfigError("theta: optimizer run produced no parameters")
        return np.asarray(theta, dtype=np.float64), f"best-of-run (seed {artifact.seed})"
    path = Path(source)
    try:
        tokens = path.read_text().split()
    except OSError as exc:
        raise ConfigError(f"theta: cannot read {path}: {exc}") from None
    try:
        values = [float(tok) for tok in tokens]
    except ValueError:
        raise ConfigError(f"theta: {path} must contain only numbers") from None
    if len(values) != dim:
        raise ConfigError(f"theta: expected {dim} values for depth {config.depth}, got {len(values)}")
    if not all(np.isfinite(v) for v in values):
        raise ConfigError(f"theta: {path} contains non-finite values")
    return np.asarray(values, dtype=np.float64), f"file {path}"


def write_matrix_csv(matrix: np.ndarray, path: str | Path) -> None:
    """Write a dense matrix as bare comma-separated rows, 15 digits."""
    matrix = np.asarray(matrix, dtype=np.float64)
    lines = [",".join(_fmt(x) for x in row) for row in matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def run_diagnose(config: ExperimentConfig, theta_source: str, out_dir: str | Path) -> dict[str, object]:
    """Write qfim.csv, hessian.csv, theta.txt, and spectrum.txt for one point."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    theta, origin = resolve_theta(config, theta_source)
    circuit = HvaCircuit(n=config.qubits, layers=config.depth, boundary=config.boundary)
    hamiltonian = build_tfim(TfimSpec(n=config.qubits, h=config.h, boundary=config.boundary))

    info = qfim(circuit, theta)
    curvature = hessian(circuit, theta, hamiltonian)
    info_report = spectrum_report(info)
    curvature_report = spectrum_report(curvature)

    write_matrix_csv(info.entries, out_dir / "qfim.csv")
    write_matrix_csv(curvature.entries, out_dir / "hessian.csv")
    (out_dir / "theta.txt").write_text(
        "\n".join(f"{x:.17g}" for x in theta) + "\n"
    )

    lines = [
        f"theta_source: {origin}",
        f"qubits: {config.qubits}",
        f"depth: {config.depth}",
        f"boundary: {config.boundary.value}",
        f"h: {_fmt(config.h)}",
    ]
    for name, report in (("qfim", info_report), ("hessian", curvature_report)):
        lines.append("")
        lines.append(f"[{name}]")
        lines.append(f"rank: {report.rank}")
        lines.append(f"zero_count: {report.zero_count}")
        lines.append(f"threshold: {_fmt(report.threshold)}")
        lines.append("eigenvalues:")
        for value in report.eigenvalues:
            lines.append(f"  {_fmt(value)}")
    (out_dir / "spectrum.txt").write_text("\n".join(lines) + "\n")

    return {
        "theta_source": origin,
        "qfim_rank": info_report.rank,
        "qfim_zero_count": info_report.zero_count,
        "hessian_rank": curvature_report.rank,
        "out_dir": out_dir,
    }
