"""Benchmark suite runner and report generation.

Runs a set of algorithms over the problem registry, collects one result
row per (algorithm, problem) pair, and renders csv/json/markdown
reports.  Runs are independent and may execute on a thread pool; rows
are always gathered in (algorithm, problem-id) order so serial and
parallel execution produce identical reports.  Wall time is recorded
per run but kept out of the csv so reports are byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .oracle import get_problem, OracleError
from .solvers import (
    Algorithm, BetaMode, SolverConfig, SolverError, run,
)


class BenchError(Exception):
    pass


_FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class SuiteConfig:
    """One suite invocation: which runs to do and how to report them."""

    algorithms: tuple[Algorithm, ...] = tuple(Algorithm)
    problems: tuple[int, ...] = tuple(range(1, 16))
    beta_mode: BetaMode = BetaMode.ZERO
    mu0: float = 1.0
    kappa: float = 0.8
    sigma: float = 0.5
    f_inf_overrides: dict[int, float] = field(default_factory=dict)
    max_steps: int = 500
    gap_tol: float = 1e-6
    delta_tol: float = 1e-6
    output_format: str = "csv"
    trace_dir: str | None = None
    parallelism: int = 1

    def __post_init__(self):
        if not self.algorithms:
            raise BenchError("no algorithms selected")
        if not self.problems:
            raise BenchError("no problems selected")
        for pid in self.problems:
            try:
                get_problem(int(pid))
            except OracleError as exc:
                raise BenchError(str(exc)) from exc
        if self.output_format not in _FORMATS:
            raise BenchError(f"unknown report format {self.output_format!r}")
        if self.parallelism < 1:
            raise BenchError("parallelism must be at least 1")


@dataclass(frozen=True)
class ResultRow:
    problem_id: int
    problem_name: str
    algorithm: str
    k_steps: int                 # descent steps for cpba, oracle steps else
    oracle_calls: int
    final_gap: float
    termination: str
    wall_time: float
    error: str = ""


def _solver_config(config: SuiteConfig, pid: int,
                   algorithm: Algorithm) -> SolverConfig:
    problem = get_problem(pid)
    f_inf = config.f_inf_overrides.get(pid, problem.f_inf_default)
    return SolverConfig(
        algorithm=algorithm, beta_mode=config.beta_mode, mu0=config.mu0,
        kappa=config.kappa, sigma=config.sigma, f_inf=f_inf,
        max_steps=config.max_steps, gap_tol=config.gap_tol,
        delta_tol=config.delta_tol, known_fstar=problem.optimal_value)


def _run_one(config: SuiteConfig, algorithm: Algorithm, pid: int) -> ResultRow:
    problem = get_problem(pid)
    solver_config = _solver_config(config, pid, algorithm)
    start = time.perf_counter()
    try:
        result = run(solver_config, problem)
    except (SolverError, OracleError) as exc:
        return ResultRow(
            problem_id=pid, problem_name=problem.name,
            algorithm=algorithm.value, k_steps=0, oracle_calls=0,
            final_gap=math.nan, termination="Error",
            wall_time=time.perf_counter() - start, error=str(exc))
    elapsed = time.perf_counter() - start
    if config.trace_dir is not None:
        import pathlib
        out = pathlib.Path(config.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{algorithm.value}_{pid:02d}_{problem.name}.jsonl"
        path.write_text(result.trace_jsonl(solver_config, problem))
    return ResultRow(
        problem_id=pid, problem_name=problem.name,
        algorithm=algorithm.value, k_steps=result.state.k,
        oracle_calls=result.oracle_calls,
        final_gap=result.state.f_best - problem.optimal_value,
        termination=result.termination.value, wall_time=elapsed)


def run_suite(config: SuiteConfig) -> list[ResultRow]:
    """All requested runs, rows in (algorithm, problem-id) order."""
    jobs = [(alg, int(pid)) for alg in config.algorithms
            for pid in config.problems]
    if config.parallelism == 1:
        rows = [_run_one(config, alg, pid) for alg, pid in jobs]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [pool.submit(_run_one, config, alg, pid)
                       for alg, pid in jobs]
            rows = [f.result() for f in futures]
    return rows


_CSV_COLUMNS = ("problem_id", "problem_name", "algorithm", "k_steps",
                "oracle_calls", "final_gap", "termination", "error")


def _format_gap(gap: float) -> str:
    # 17 significant digits so parse(render(rows)) restores the exact float
    return "nan" if math.isnan(gap) else f"{gap:.16e}"


def render_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.problem_id, r.problem_name, r.algorithm,
                         r.k_steps, r.oracle_calls, _format_gap(r.final_gap),
                         r.termination, r.error])
    return buf.getvalue()


def parse_csv(text: str) -> list[ResultRow]:
    """Inverse of render_csv up to the wall-time field (not serialized)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != _CSV_COLUMNS:
        raise BenchError("unexpected csv header")
    rows = []
    for rec in reader:
        rows.append(ResultRow(
            problem_id=int(rec[0]), problem_name=rec[1], algorithm=rec[2],
            k_steps=int(rec[3]), oracle_calls=int(rec[4]),
            final_gap=float(rec[5]), termination=rec[6], wall_time=0.0,
            error=rec[7]))
    return rows


def render_json(rows: list[ResultRow]) -> str:
    payload = [
        {
            "problem_id": r.problem_id,
            "problem_name": r.problem_name,
            "algorithm": r.algorithm,
            "k_steps": r.k_steps,
            "oracle_calls": r.oracle_calls,
            "final_gap": None if math.isnan(r.final_gap) else r.final_gap,
            "termination": r.termination,
            "wall_time": r.wall_time,
            "error": r.error,
        }
        for r in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def render_markdown(rows: list[ResultRow]) -> str:
    """One table per algorithm with the call counts and final gaps."""
    out = []
    for alg in sorted({r.algorithm for r in rows}):
        out.append(f"## {alg}")
        out.append("")
        out.append("| id | problem | #k | #fg | gap | termination |")
        out.append("|---:|:--------|---:|----:|:----|:------------|")
        for r in rows:
            if r.algorithm != alg:
                continue
            out.append(
                f"| {r.problem_id} | {r.problem_name} | {r.k_steps} "
                f"| {r.oracle_calls} | {_format_gap(r.final_gap)} "
                f"| {r.termination} |")
        out.append("")
    return "\n".join(out)


def emit_report(rows: list[ResultRow], output_format: str,
                path: str | None = None) -> str:
    """Render `rows`; write to `path` when given.  Returns the text."""
    if not rows:
        raise BenchError("no result rows to report")
    if output_format == "csv":
        text = render_csv(rows)
    elif output_format == "json":
        text = render_json(rows)
    elif output_format == "markdown":
        text = render_markdown(rows)
    else:
        raise BenchError(f"unknown report format {output_format!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise BenchError(f"cannot write report to {path}: {exc}") from exc
    return text
