"""Command line interface: benchmark runs, registry listing, self-checks."""

from __future__ import annotations

import math
import sys

import click
import numpy as np

from . import bench
from .model import BetaMode, Bundle, Cut, NesterovState, nesterov_advance
from .oracle import OracleError, evaluate, get_problem, list_problems
from .solvers import Algorithm
from . import subqp

_ALGO_CHOICES = [a.value for a in Algorithm]
_REPORT_CHOICES = {"csv": "csv", "json": "json", "md": "markdown"}


@click.group()
def main():
    """Benchmark driver for the bundle-method solvers."""


@main.command("run")
@click.option("--algo", "algos", type=click.Choice(_ALGO_CHOICES + ["all"]),
              multiple=True, default=("all",), show_default=True,
              help="Algorithm to run; repeatable.")
@click.option("--beta", type=click.Choice(["zero", "guler"]), default="zero",
              show_default=True, help="Second momentum term mode.")
@click.option("--problem", "problems", multiple=True, default=("all",),
              show_default=True, help="Problem id or name; repeatable.")
@click.option("--mu", type=float, default=1.0, show_default=True)
@click.option("--kappa", type=float, default=0.8, show_default=True)
@click.option("--sigma", type=float, default=0.5, show_default=True)
@click.option("--f-inf", type=float, default=None,
              help="Override the per-problem model floor for every run.")
@click.option("--max-steps", type=int, default=500, show_default=True)
@click.option("--gap-tol", type=float, default=1e-6, show_default=True)
@click.option("--delta-tol", type=float, default=1e-6, show_default=True)
@click.option("--report", type=click.Choice(sorted(_REPORT_CHOICES)),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Report file; stdout when omitted.")
@click.option("--trace-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for per-run JSON-lines traces.")
@click.option("--jobs", type=int, default=1, show_default=True)
def run_cmd(algos, beta, problems, mu, kappa, sigma, f_inf, max_steps,
            gap_tol, delta_tol, report, out, trace_dir, jobs):
    """Run the benchmark suite and emit a report."""
    if "all" in algos:
        selected = tuple(Algorithm)
    else:
        selected = tuple(Algorithm(a) for a in dict.fromkeys(algos))
    pids = []
    for key in problems:
        if key == "all":
            pids.extend(p.id for p in list_problems())
            continue
        try:
            pids.append(get_problem(int(key) if key.isdigit() else key).id)
        except OracleError as exc:
            raise click.BadParameter(str(exc), param_hint="--problem")
    pids = tuple(dict.fromkeys(pids))
    overrides = {}
    if f_inf is not None:
        overrides = {pid: f_inf for pid in pids}
    try:
        config = bench.SuiteConfig(
            algorithms=selected, problems=pids, beta_mode=BetaMode(beta),
            mu0=mu, kappa=kappa, sigma=sigma, f_inf_overrides=overrides,
            max_steps=max_steps, gap_tol=gap_tol, delta_tol=delta_tol,
            output_format=_REPORT_CHOICES[report], trace_dir=trace_dir,
            parallelism=jobs)
        rows = bench.run_suite(config)
        text = bench.emit_report(rows, config.output_format, out)
    except bench.BenchError as exc:
        raise click.ClickException(str(exc))
    if out is None:
        click.echo(text, nl=False)
    failed = [r for r in rows if r.termination == "Error"]
    for r in failed:
        click.echo(f"error: {r.algorithm} on {r.problem_name}: {r.error}",
                   err=True)
    sys.exit(1 if failed else 0)


@main.command("problems")
def problems_cmd():
    """List the problem registry."""
    click.echo(f"{'id':>3}  {'name':13}  {'n':>3}  {'f*':>12}  {'f_inf':>7}")
    for p in list_problems():
        click.echo(f"{p.id:>3}  {p.name:13}  {p.dimension:>3}  "
                   f"{p.optimal_value:>12.6f}  {p.f_inf_default:>7.1f}")


def _check(name: str, ok: bool, failures: list[str]):
    click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")
    if not ok:
        failures.append(name)


@main.command("verify")
def verify_cmd():
    """Quick self-checks of the core invariants."""
    failures: list[str] = []

    state = NesterovState()
    lams, ok = [], True
    for _ in range(1001):
        lams.append(state.lambda_k)
        state = nesterov_advance(state)
    lams = np.array(lams)
    for k in range(1, 1000):
        if abs(lams[k - 1] ** 2 - (lams[k] ** 2 - lams[k])) \
                > 1e-9 * lams[k] ** 2:
            ok = False
        if lams[k] < (k + 2) / 2.0:
            ok = False
    _check("momentum sequence identities", ok, failures)

    ok = True
    rng = np.random.default_rng(0)
    for p in list_problems():
        for _ in range(20):
            x = rng.normal(scale=2.0, size=p.dimension)
            y = rng.normal(scale=2.0, size=p.dimension)
            rx, ry = evaluate(p, x), evaluate(p, y)
            # subgradient inequality of convexity
            lower = rx.value + float(rx.subgradient @ (y - x))
            if lower > ry.value + 1e-9 * (1.0 + abs(ry.value)):
                ok = False
    _check("oracle subgradient inequality", ok, failures)

    ok = True
    for trial in range(200):
        n = int(rng.integers(1, 4))
        bundle = Bundle(n)
        for _ in range(int(rng.integers(1, 5))):
            bundle.add(Cut(rng.normal(size=n), float(rng.normal()),
                           rng.normal(size=n)))
        center = rng.normal(size=n)
        mu = float(10.0 ** rng.uniform(-1, 1))
        level = float(rng.normal())
        inputs = subqp.SubproblemInputs(bundle, center, mu=mu, level=level,
                                        r_floor=-100.0)
        sol = subqp.solve_dsqp(inputs)
        if sol.status is subqp.QPStatus.INFEASIBLE:
            continue
        if not math.isfinite(sol.kkt_residual) or sol.kkt_residual > 1e-7:
            ok = False
    _check("doubly stabilized subproblem KKT", ok, failures)

    if failures:
        raise click.ClickException(f"{len(failures)} check(s) failed")
    click.echo("all checks passed")


if __name__ == "__main__":
    main()
