import json
import math
from dataclasses import asdict

import numpy as np
import pytest

import nsbundle.oracle as oracle
from nsbundle.model import BetaMode, NesterovState, nesterov_advance
from nsbundle.oracle import ProblemSpec, get_problem
from nsbundle.solvers import (
    Algorithm, SolverConfig, Termination, accumulate_error, run,
    update_center,
)


def _abs_oracle(x):
    v = abs(float(x[0]))
    g = np.array([1.0 if x[0] >= 0.0 else -1.0])
    return v, g


def _const_oracle(x):
    return 5.0, np.zeros(1)


@pytest.fixture
def abs_problem(monkeypatch):
    monkeypatch.setitem(oracle._EVALUATORS, "Abs", _abs_oracle)
    return ProblemSpec(99, "Abs", 1, 0.0, np.array([2.0]), -10.0,
                       np.zeros(1))


@pytest.fixture
def const_problem(monkeypatch):
    monkeypatch.setitem(oracle._EVALUATORS, "Const", _const_oracle)
    return ProblemSpec(98, "Const", 1, 5.0, np.array([2.0]), -10.0,
                       np.zeros(1))


def test_update_center_no_momentum_at_step_zero():
    s0 = NesterovState()
    y1 = np.array([3.0, -1.0])
    out = update_center(y1, np.array([9.0, 9.0]), np.array([7.0, 7.0]), s0)
    assert np.array_equal(out, y1)


def test_update_center_first_momentum_step():
    s1 = nesterov_advance(NesterovState())
    out = update_center(np.array([1.0, 0.0]), np.zeros(2),
                        np.array([50.0, 50.0]), s1)
    # lambda_1=(1+sqrt(5))/2, lambda_2=(1+sqrt(1+4*lambda_1^2))/2=2.193527,
    # alpha_1=(lambda_1-1)/lambda_2=0.2817535
    assert out[0] == pytest.approx(1.2817535, abs=1e-6)
    assert out[1] == pytest.approx(0.0, abs=1e-12)


def test_update_center_guler_adds_second_term():
    s1 = nesterov_advance(NesterovState(beta_mode=BetaMode.GULER))
    y1 = np.array([1.0])
    out = update_center(y1, np.zeros(1), np.array([2.0]), s1)
    expect = 1.0 + s1.alpha_k * 1.0 + s1.beta_k * (1.0 - 2.0)
    assert out[0] == pytest.approx(expect, abs=1e-12)


def test_accumulate_error_hand_values():
    # theta_1 = eps_0 since lambda_0 = 1
    assert accumulate_error(0.0, 1.0, 1.0) == 1.0
    lam1 = 0.5 * (1.0 + math.sqrt(5.0))
    theta2 = accumulate_error(1.0, 0.0, lam1)
    assert theta2 == pytest.approx(0.381966, abs=1e-6)
    # closed form at k=2: lambda_1^{-2} * lambda_0^2 * eps_0 = 1/lambda_1^2
    assert theta2 == pytest.approx(1.0 / lam1 ** 2, abs=1e-12)


def test_accumulate_error_contracts_without_new_error():
    theta, lam = 3.0, 1.0
    state = NesterovState()
    for _ in range(200):
        theta = accumulate_error(theta, 0.0, state.lambda_k)
        state = nesterov_advance(state)
    assert 0.0 <= theta < 3e-2


def test_fpcpa_first_step_on_absolute_value(abs_problem):
    config = SolverConfig(algorithm=Algorithm.FPCPA, max_oracle_calls=2)
    result = run(config, abs_problem)
    assert result.termination is Termination.MAX_STEPS
    recs = result.records
    assert recs[0].f_y == 2.0
    # prox step from the single cut: y1 = 2 - g/mu = 1
    assert recs[1].f_y == pytest.approx(1.0, abs=1e-10)
    assert recs[1].step_norm == pytest.approx(1.0, abs=1e-10)
    assert recs[1].t_k == pytest.approx(1.0, abs=1e-10)


def test_fla_first_step_projects_to_level(abs_problem):
    config = SolverConfig(algorithm=Algorithm.FLA, max_oracle_calls=2)
    result = run(config, abs_problem)
    recs = result.records
    # single-slope cut cannot bound the model: f_low = floor
    assert recs[0].f_low == -10.0
    assert recs[0].delta == pytest.approx(12.0)
    assert recs[0].level == pytest.approx(-7.6)
    # halfspace projection of 2 onto {x <= -7.6}
    assert recs[1].f_y == pytest.approx(7.6, abs=1e-10)
    assert recs[1].t_k == pytest.approx(9.6, abs=1e-9)


def test_cpba_first_step_is_descent(abs_problem):
    config = SolverConfig(algorithm=Algorithm.CPBA, max_oracle_calls=2)
    result = run(config, abs_problem)
    recs = result.records
    # z = 1, model(z) = 1: f(z) = 1 <= 2 - 0.5*(2 - 1) passes the test
    assert recs[1].f_y == pytest.approx(1.0, abs=1e-10)
    assert recs[1].descent_flag is True
    assert result.state.k == 1


def test_accelerated_runs_solve_absolute_value(abs_problem):
    for algo in (Algorithm.FPCPA, Algorithm.FLA, Algorithm.FDSA):
        config = SolverConfig(algorithm=algo, known_fstar=0.0)
        result = run(config, abs_problem)
        assert result.termination in (Termination.GAP_REACHED,
                                      Termination.DELTA_CLOSED), algo
        assert result.state.f_best <= 1e-6 * 2.0
        assert result.oracle_calls < 60


def test_zero_subgradient_terminates_immediately(const_problem):
    config = SolverConfig(algorithm=Algorithm.FPCPA, known_fstar=None)
    result = run(config, const_problem)
    assert result.termination is Termination.ZERO_SUBGRADIENT
    assert result.oracle_calls == 1


def test_fdsa_with_infinite_level_matches_fpcpa():
    p = get_problem(1)
    base = dict(mu0=1.0, f_inf=p.f_inf_default, max_oracle_calls=40,
                known_fstar=None)
    a = run(SolverConfig(algorithm=Algorithm.FPCPA, **base), p)
    b = run(SolverConfig(algorithm=Algorithm.FDSA, infinite_level=True,
                         **base), p)
    fa = [r.f_y for r in a.records]
    fb = [r.f_y for r in b.records]
    assert fa == pytest.approx(fb, abs=1e-10)


def test_runs_are_deterministic():
    p = get_problem(4)
    config = SolverConfig(algorithm=Algorithm.FDSA,
                          f_inf=p.f_inf_default,
                          known_fstar=p.optimal_value)
    r1 = run(config, p)
    r2 = run(config, p)
    assert r1.termination == r2.termination
    assert [asdict(x) for x in r1.records] == [asdict(x) for x in r2.records]


def test_trace_jsonl_round_trips():
    p = get_problem(3)
    config = SolverConfig(algorithm=Algorithm.FLA,
                          f_inf=p.f_inf_default,
                          known_fstar=p.optimal_value)
    result = run(config, p)
    lines = result.trace_jsonl(config, p).splitlines()
    header = json.loads(lines[0])
    assert header["problem"] == "DEM"
    assert header["algorithm"] == "fla"
    assert header["termination"] == result.termination.value
    body = [json.loads(line) for line in lines[1:]]
    assert len(body) == len(result.records)
    assert body[0]["k"] == 0
    assert body[-1]["f_best"] == result.state.f_best


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(algorithm=Algorithm.FLA, kappa=1.0)
    with pytest.raises(ValueError):
        SolverConfig(algorithm=Algorithm.CPBA, sigma=0.0)
    with pytest.raises(ValueError):
        SolverConfig(algorithm=Algorithm.FPCPA, mu0=-1.0)


def test_cpba_counts_descent_steps_only():
    p = get_problem(1)
    config = SolverConfig(algorithm=Algorithm.CPBA,
                          f_inf=p.f_inf_default,
                          known_fstar=p.optimal_value)
    result = run(config, p)
    descents = sum(1 for r in result.records if r.descent_flag)
    assert result.state.k == descents
    assert result.oracle_calls == len(result.records)
