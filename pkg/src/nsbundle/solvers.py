"""The four algorithm loops: accelerated proximal, level, doubly
stabilized, and the classical proximal bundle baseline.

Each accelerated step solves one stabilized subproblem, moves the
stability center with the momentum coefficients, and calls the oracle
once.  The baseline keeps a stability center updated through a descent
test with serious and null steps.  Every oracle call appends one trace
record.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .model import (
    Bundle, Cut, BetaMode, NesterovState, nesterov_advance,
    evaluation_noise, linearization_error, model_eval,
)
from .oracle import ProblemSpec, evaluate
from . import subqp
from .subqp import QPStatus, SubproblemInputs


class SolverError(Exception):
    """Aborted run; `records` carries the partial trace."""

    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []


class Algorithm(enum.Enum):
    FPCPA = "fpcpa"
    FLA = "fla"
    FDSA = "fdsa"
    CPBA = "cpba"


class Termination(enum.Enum):
    GAP_REACHED = "GapReached"
    DELTA_CLOSED = "DeltaClosed"
    ZERO_SUBGRADIENT = "ZeroSubgradient"
    MAX_STEPS = "MaxSteps"


@dataclass(frozen=True)
class SolverConfig:
    algorithm: Algorithm
    beta_mode: BetaMode = BetaMode.ZERO
    mu0: float = 1.0
    kappa: float = 0.8
    sigma: float = 0.5
    f_inf: float = -10.0
    max_steps: int = 500
    gap_tol: float = 1e-6
    delta_tol: float = 1e-6
    known_fstar: float | None = None
    # testing aid: run FLA/FDSA with the level bound switched off (l = +inf)
    infinite_level: bool = False
    max_oracle_calls: int | None = None

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError("kappa must lie in (0, 1)")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie in (0, 1)")
        if self.mu0 <= 0.0:
            raise ValueError("mu0 must be positive")


@dataclass
class IterationRecord:
    """One row per oracle call."""

    k: int
    f_y: float
    f_best: float
    f_low: float
    delta: float
    level: float
    mu_k: float
    t_k: float
    tau_k: float
    eps_k: float
    theta_k: float
    step_norm: float
    gamma_k: float
    descent_flag: bool | None = None


@dataclass
class SolverState:
    k: int
    x: np.ndarray               # stability center
    y: np.ndarray               # current iterate
    bundle: Bundle
    nesterov: NesterovState
    f_best: float
    f_low: float
    delta: float
    level: float
    mu_k: float
    gamma_prev: float
    theta: float
    eps_last: float
    oracle_calls: int
    mu_floor: float
    g_last: np.ndarray = None
    f_y: float = math.nan
    # CPBA bookkeeping
    center_hat: np.ndarray = None
    f_center: float = math.nan


@dataclass
class RunResult:
    state: SolverState
    records: list[IterationRecord]
    termination: Termination

    @property
    def oracle_calls(self) -> int:
        return self.state.oracle_calls

    def trace_jsonl(self, config: SolverConfig, problem: ProblemSpec) -> str:
        """Header object plus one JSON object per oracle call."""
        header = {
            "problem": problem.name,
            "problem_id": problem.id,
            "algorithm": config.algorithm.value,
            "beta_mode": config.beta_mode.value,
            "mu0": config.mu0,
            "kappa": config.kappa,
            "sigma": config.sigma,
            "f_inf": config.f_inf,
            "max_steps": config.max_steps,
            "gap_tol": config.gap_tol,
            "delta_tol": config.delta_tol,
            "termination": self.termination.value,
        }
        lines = [json.dumps(header)]
        for rec in self.records:
            lines.append(json.dumps(asdict(rec)))
        return "\n".join(lines) + "\n"


def update_center(y_next: np.ndarray, y_prev: np.ndarray, x_prev: np.ndarray,
                  nesterov: NesterovState) -> np.ndarray:
    """Momentum update of the stability center."""
    out = y_next + nesterov.alpha_k * (y_next - y_prev)
    if nesterov.beta_k != 0.0:
        out = out + nesterov.beta_k * (y_next - x_prev)
    return out


def accumulate_error(theta_k: float, eps_k: float, lambda_k: float) -> float:
    """One step of the weighted error accumulation recurrence."""
    return theta_k + eps_k - theta_k / lambda_k


def _oracle_call(state: SolverState, problem: ProblemSpec, x: np.ndarray):
    resp = evaluate(problem, x)
    state.oracle_calls += 1
    state.g_last = resp.subgradient
    state.f_y = resp.value
    if resp.value < state.f_best:
        state.f_best = resp.value
    return resp


def _record(state: SolverState, config: SolverConfig, *, t=math.nan,
            tau=math.nan, step_norm=math.nan, gamma=math.nan,
            descent=None) -> IterationRecord:
    return IterationRecord(
        k=state.k, f_y=state.f_y, f_best=state.f_best, f_low=state.f_low,
        delta=state.delta, level=state.level, mu_k=state.mu_k, t_k=t,
        tau_k=tau, eps_k=state.eps_last, theta_k=state.theta,
        step_norm=step_norm, gamma_k=gamma, descent_flag=descent)


def _refresh_lower_bound(state: SolverState, config: SolverConfig):
    lb = subqp.compute_lower_bound(state.bundle, config.f_inf)
    # the LP over a grown bundle never regresses; the max guards round-off
    state.f_low = max(state.f_low, lb)
    state.delta = state.f_best - state.f_low
    state.level = state.f_best - config.kappa * state.delta


def _accelerated_post_step(state: SolverState, config: SolverConfig,
                           problem: ProblemSpec, sol) -> IterationRecord:
    """Shared tail of one accelerated step: momentum, oracle, errors."""
    y_next = sol.x
    x_next = update_center(y_next, state.y, state.x, state.nesterov)
    step_norm = float(np.linalg.norm(state.x - y_next))
    lambda_k = state.nesterov.lambda_k
    model_y, _ = model_eval(state.bundle, y_next)
    resp = _oracle_call(state, problem, y_next)
    state.eps_last = linearization_error(
        resp.value, model_y, noise=evaluation_noise(state.bundle, y_next))
    state.theta = accumulate_error(state.theta, state.eps_last, lambda_k)
    state.nesterov = nesterov_advance(state.nesterov)
    state.bundle.add(Cut(y_next, resp.value, resp.subgradient))
    state.y = y_next
    state.x = x_next
    state.k += 1
    return _record(state, config, t=sol.t, tau=sol.tau, step_norm=step_norm,
                   gamma=sol.gamma, descent=None)


def step_fpcpa(state: SolverState, config: SolverConfig,
               problem: ProblemSpec) -> IterationRecord:
    sol = subqp.solve_prox_qp(SubproblemInputs(
        state.bundle, state.x, mu=config.mu0, r_floor=config.f_inf))
    state.mu_k = config.mu0
    return _accelerated_post_step(state, config, problem, sol)


def _raise_lower_bound_to_level(state: SolverState, config: SolverConfig):
    """An empty level set certifies model min > level; tighten f_low."""
    state.f_low = state.level
    state.delta = state.f_best - state.f_low
    state.level = state.f_best - config.kappa * state.delta


def step_fla(state: SolverState, config: SolverConfig,
             problem: ProblemSpec) -> IterationRecord:
    if config.infinite_level:
        raise SolverError("level step without a finite level")
    sol = subqp.solve_level_qp(SubproblemInputs(
        state.bundle, state.x, level=state.level, r_floor=config.f_inf))
    if sol.status is QPStatus.INFEASIBLE:
        raise SolverError(
            f"level set empty at level {state.level:.6g} despite a fresh "
            f"lower bound {state.f_low:.6g}")
    if sol.status is QPStatus.DEGENERATE:
        # center already inside the level set; log t as 1 for bookkeeping
        sol = subqp.QPSolution(
            x=sol.x, r=sol.r, cut_duals=sol.cut_duals, t=1.0, tau=sol.tau,
            kkt_residual=sol.kkt_residual, status=sol.status, gamma=1.0)
    state.mu_k = 1.0   # fixed log-only value; the projection is mu-free
    return _accelerated_post_step(state, config, problem, sol)


def step_fdsa(state: SolverState, config: SolverConfig,
              problem: ProblemSpec) -> IterationRecord:
    if state.k == 0:
        state.mu_k = config.mu0
    else:
        state.mu_k = max(state.mu_floor, state.gamma_prev)
    for _ in range(200):
        if config.infinite_level or state.delta <= config.delta_tol:
            level = math.inf
        else:
            level = state.level
        sol = subqp.solve_dsqp(SubproblemInputs(
            state.bundle, state.x, mu=state.mu_k, level=level,
            r_floor=config.f_inf), mu_k=state.mu_k,
            level_nonempty=not config.infinite_level)
        if sol.status is not QPStatus.INFEASIBLE:
            break
        _raise_lower_bound_to_level(state, config)
    else:
        raise SolverError("level set remained empty while closing delta")
    state.gamma_prev = sol.gamma
    return _accelerated_post_step(state, config, problem, sol)


def step_cpba(state: SolverState, config: SolverConfig,
              problem: ProblemSpec) -> IterationRecord:
    """One inner iteration of the baseline: one QP, one oracle call."""
    sol = subqp.solve_prox_qp(SubproblemInputs(
        state.bundle, state.center_hat, mu=config.mu0, r_floor=config.f_inf))
    z = sol.x
    model_z, _ = model_eval(state.bundle, z)
    step_norm = float(np.linalg.norm(state.center_hat - z))
    resp = _oracle_call(state, problem, z)
    state.eps_last = linearization_error(
        resp.value, model_z, noise=evaluation_noise(state.bundle, z))
    descent = resp.value <= state.f_center - config.sigma * (
        state.f_center - model_z)
    if descent:
        state.center_hat = z
        state.f_center = resp.value
        state.k += 1
    state.bundle.add(Cut(z, resp.value, resp.subgradient))
    state.y = z
    return _record(state, config, t=sol.t, tau=sol.tau, step_norm=step_norm,
                   gamma=sol.gamma, descent=descent)


_STEPPERS = {
    Algorithm.FPCPA: step_fpcpa,
    Algorithm.FLA: step_fla,
    Algorithm.FDSA: step_fdsa,
    Algorithm.CPBA: step_cpba,
}


def _gap_reached(state: SolverState, config: SolverConfig) -> bool:
    if config.known_fstar is None:
        return False
    return (state.f_best - config.known_fstar
            <= config.gap_tol * (1.0 + abs(state.f_best)))


def run(config: SolverConfig, problem: ProblemSpec) -> RunResult:
    """Full run of the configured algorithm on one registry problem."""
    x0 = problem.start_point.copy()
    bundle = Bundle(problem.dimension)
    state = SolverState(
        k=0, x=x0, y=x0.copy(), bundle=bundle,
        nesterov=NesterovState(beta_mode=config.beta_mode),
        f_best=math.inf, f_low=config.f_inf, delta=math.inf, level=math.inf,
        mu_k=config.mu0, gamma_prev=config.mu0, theta=0.0, eps_last=0.0,
        oracle_calls=0, mu_floor=0.0)
    records: list[IterationRecord] = []
    try:
        resp = _oracle_call(state, problem, x0)
        state.mu_floor = 1e-10 * float(np.linalg.norm(resp.subgradient))
        bundle.add(Cut(x0, resp.value, resp.subgradient))
        if config.algorithm is Algorithm.CPBA:
            state.center_hat = x0.copy()
            state.f_center = resp.value
        uses_level = config.algorithm in (Algorithm.FLA, Algorithm.FDSA)
        if uses_level and not config.infinite_level:
            _refresh_lower_bound(state, config)
        records.append(_record(state, config))
        stepper = _STEPPERS[config.algorithm]
        call_cap = config.max_oracle_calls
        if call_cap is None:
            call_cap = (20 * config.max_steps
                        if config.algorithm is Algorithm.CPBA
                        else config.max_steps)
        while True:
            if _gap_reached(state, config):
                return RunResult(state, records, Termination.GAP_REACHED)
            if float(np.linalg.norm(state.g_last, ord=np.inf)) == 0.0:
                return RunResult(state, records, Termination.ZERO_SUBGRADIENT)
            if uses_level and not config.infinite_level:
                if state.delta <= config.delta_tol:
                    return RunResult(state, records, Termination.DELTA_CLOSED)
            if config.algorithm is Algorithm.CPBA:
                if state.k >= config.max_steps:
                    return RunResult(state, records, Termination.MAX_STEPS)
            if state.oracle_calls >= call_cap:
                return RunResult(state, records, Termination.MAX_STEPS)
            records.append(stepper(state, config, problem))
            if uses_level and not config.infinite_level:
                _refresh_lower_bound(state, config)
                rec = records[-1]
                rec.f_low = state.f_low
                rec.delta = state.delta
                rec.level = state.level
    except SolverError as exc:
        exc.records = records
        raise
    except subqp.SubproblemError as exc:
        raise SolverError(str(exc), records) from exc
