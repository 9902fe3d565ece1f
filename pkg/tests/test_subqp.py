import math
from dataclasses import replace

import numpy as np
import pytest

from nsbundle.model import Bundle, Cut
from nsbundle.subqp import (
    QPStatus, SubproblemError, SubproblemInputs, compute_lower_bound,
    solve_dsqp, solve_level_qp, solve_nonneg_qp, solve_prox_qp, verify_kkt,
)


def _bundle_1d(*cuts):
    """1-D bundle from (anchor, value, slope) triples."""
    b = Bundle(1)
    for y, f, g in cuts:
        b.add(Cut(np.array([float(y)]), float(f), np.array([float(g)])))
    return b


def _abs_bundle():
    # cuts x and -x: the model of f(x)=|x| built at +-1
    return _bundle_1d((1.0, 1.0, 1.0), (-1.0, 1.0, -1.0))


# ---------------------------------------------------------------------------
# active-set engine
# ---------------------------------------------------------------------------

def test_nonneg_qp_unconstrained_interior():
    Q = np.array([[2.0, 0.0], [0.0, 4.0]])
    b = np.array([2.0, 4.0])
    w, _ = solve_nonneg_qp(Q, b)
    assert np.allclose(w, [1.0, 1.0], atol=1e-12)


def test_nonneg_qp_active_bound():
    Q = np.eye(2)
    b = np.array([-1.0, 3.0])
    w, _ = solve_nonneg_qp(Q, b)
    assert np.allclose(w, [0.0, 3.0], atol=1e-12)


def test_nonneg_qp_simplex_equality():
    # symmetric instance: equality sum(w)=1 splits evenly
    Q = np.eye(3)
    b = np.zeros(3)
    w, _ = solve_nonneg_qp(Q, b, a=np.ones(3), e=1.0)
    assert np.allclose(w, np.full(3, 1.0 / 3.0), atol=1e-10)
    assert np.isclose(w.sum(), 1.0)


def test_nonneg_qp_random_against_kkt():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(1, 7))
        A = rng.normal(size=(m, m))
        Q = A @ A.T + 1e-3 * np.eye(m)
        b = rng.normal(size=m)
        w, _ = solve_nonneg_qp(Q, b)
        g = Q @ w - b
        scale = 1.0 + float(np.abs(b).max())
        assert w.min() >= -1e-12
        assert g.min() >= -1e-7 * scale          # dual feasibility
        assert abs(float(w @ g)) <= 1e-7 * scale  # complementarity


# ---------------------------------------------------------------------------
# proximal subproblem
# ---------------------------------------------------------------------------

def test_prox_single_cut_closed_form():
    b = _bundle_1d((0.0, 0.0, 1.0))
    b2 = Bundle(2)
    b2.add(Cut(np.zeros(2), 0.0, np.array([1.0, 0.0])))
    sol = solve_prox_qp(SubproblemInputs(b2, np.zeros(2), mu=1.0,
                                         r_floor=-10.0))
    assert np.allclose(sol.x, [-1.0, 0.0], atol=1e-10)
    assert sol.r == pytest.approx(-1.0, abs=1e-10)
    assert np.allclose(sol.cut_duals, [1.0], atol=1e-10)
    assert sol.t == pytest.approx(1.0, abs=1e-10)
    assert sol.kkt_residual <= 1e-10


def test_prox_zero_subgradient_cut():
    b = _bundle_1d((3.0, 7.0, 0.0))
    sol = solve_prox_qp(SubproblemInputs(b, np.array([2.0]), mu=1.0,
                                         r_floor=-10.0))
    assert sol.x[0] == pytest.approx(2.0, abs=1e-12)
    assert sol.r == pytest.approx(7.0, abs=1e-12)


def test_prox_symmetric_pair_midpoint():
    sol = solve_prox_qp(SubproblemInputs(_abs_bundle(), np.array([0.0]),
                                         mu=1.0, r_floor=-10.0))
    assert sol.x[0] == pytest.approx(0.0, abs=1e-10)
    assert sol.r == pytest.approx(0.0, abs=1e-10)
    assert np.allclose(sol.cut_duals, [0.5, 0.5], atol=1e-10)


def test_prox_floor_active_flags_degenerate():
    # single slope-1 cut and a floor just below center value
    b = _bundle_1d((0.0, 0.0, 1.0))
    sol = solve_prox_qp(SubproblemInputs(b, np.array([0.0]), mu=1.0,
                                         r_floor=-0.25))
    assert sol.status is QPStatus.DEGENERATE
    assert sol.r == pytest.approx(-0.25, abs=1e-10)


def test_prox_duals_sum_to_one_when_floor_inactive():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(1, 4))
        bundle = Bundle(n)
        for _ in range(int(rng.integers(1, 5))):
            bundle.add(Cut(rng.normal(size=n), float(rng.normal()),
                           rng.normal(size=n)))
        inputs = SubproblemInputs(bundle, rng.normal(size=n), mu=1.0,
                                  r_floor=-1e6)
        sol = solve_prox_qp(inputs)
        assert sol.t == pytest.approx(1.0, abs=1e-9)
        assert sol.kkt_residual <= 1e-8
        # aggregate subgradient equals mu * (center - x)
        agg = sol.cut_duals @ bundle.subgradients
        assert np.allclose(agg, inputs.center - sol.x, atol=1e-7)


def test_prox_solution_invariant_under_cut_permutation():
    rng = np.random.default_rng(2)
    cuts = [Cut(rng.normal(size=2), float(rng.normal()),
                rng.normal(size=2)) for _ in range(5)]
    center = rng.normal(size=2)
    sols = []
    for order in (cuts, cuts[::-1]):
        bundle = Bundle(2)
        for c in order:
            bundle.add(c)
        sols.append(solve_prox_qp(SubproblemInputs(bundle, center, mu=2.0,
                                                   r_floor=-1e6)))
    assert np.allclose(sols[0].x, sols[1].x, atol=1e-10)
    assert sols[0].r == pytest.approx(sols[1].r, abs=1e-10)


# ---------------------------------------------------------------------------
# level projection
# ---------------------------------------------------------------------------

def test_level_halfspace_projection():
    b = _bundle_1d((0.0, 0.0, 1.0))
    sol = solve_level_qp(SubproblemInputs(b, np.array([2.0]), level=0.5,
                                          r_floor=-10.0))
    assert sol.x[0] == pytest.approx(0.5, abs=1e-10)
    assert sol.t == pytest.approx(1.5, abs=1e-10)


def test_level_interval_projection():
    sol = solve_level_qp(SubproblemInputs(_abs_bundle(), np.array([2.0]),
                                          level=0.5, r_floor=-10.0))
    assert sol.x[0] == pytest.approx(0.5, abs=1e-10)
    assert sol.t == pytest.approx(1.5, abs=1e-10)
    assert np.allclose(sol.cut_duals, [1.5, 0.0], atol=1e-10)


def test_level_degenerate_when_center_feasible():
    sol = solve_level_qp(SubproblemInputs(_abs_bundle(), np.array([0.25]),
                                          level=0.5, r_floor=-10.0))
    assert sol.status is QPStatus.DEGENERATE
    assert sol.x[0] == pytest.approx(0.25)
    assert sol.t == 0.0


def test_level_infeasible_when_set_empty():
    # model(x) = |x| never goes below 0, so level -1 cuts an empty set
    sol = solve_level_qp(SubproblemInputs(_abs_bundle(), np.array([2.0]),
                                          level=-1.0, r_floor=-10.0))
    assert sol.status is QPStatus.INFEASIBLE


# ---------------------------------------------------------------------------
# doubly stabilized subproblem
# ---------------------------------------------------------------------------

def test_dsqp_level_binds_hand_example():
    sol = solve_dsqp(SubproblemInputs(_abs_bundle(), np.array([2.0]), mu=1.0,
                                      level=0.5, r_floor=-10.0))
    assert sol.x[0] == pytest.approx(0.5, abs=1e-10)
    assert sol.r == pytest.approx(0.5, abs=1e-10)
    assert sol.t == pytest.approx(1.5, abs=1e-10)
    assert sol.tau == pytest.approx(0.5, abs=1e-10)
    assert sol.gamma == pytest.approx(1.0 / 1.5, abs=1e-10)
    assert sol.kkt_residual <= 1e-10


def test_dsqp_infinite_level_matches_prox():
    rng = np.random.default_rng(9)
    for _ in range(25):
        n = int(rng.integers(1, 4))
        bundle = Bundle(n)
        for _ in range(int(rng.integers(1, 5))):
            bundle.add(Cut(rng.normal(size=n), float(rng.normal()),
                           rng.normal(size=n)))
        center = rng.normal(size=n)
        mu = float(10.0 ** rng.uniform(-1, 1))
        prox = solve_prox_qp(SubproblemInputs(bundle, center, mu=mu,
                                              r_floor=-1e6))
        ds = solve_dsqp(SubproblemInputs(bundle, center, mu=mu,
                                         level=math.inf, r_floor=-1e6))
        assert np.allclose(ds.x, prox.x, atol=1e-9)
        assert ds.r == pytest.approx(prox.r, abs=1e-9)
        assert ds.t == 1.0
        assert ds.tau == 0.0


def test_dsqp_infeasible_cases():
    b = _abs_bundle()
    # level below the floor: no feasible r at all
    sol = solve_dsqp(SubproblemInputs(b, np.array([2.0]), mu=1.0,
                                      level=-11.0, r_floor=-10.0))
    assert sol.status is QPStatus.INFEASIBLE
    # level above the floor but below the model minimum: empty level set
    sol = solve_dsqp(SubproblemInputs(b, np.array([2.0]), mu=1.0,
                                      level=-9.0, r_floor=-10.0))
    assert sol.status is QPStatus.INFEASIBLE
    # level above the model minimum: feasible
    ok = solve_dsqp(SubproblemInputs(b, np.array([2.0]), mu=1.0,
                                     level=0.25, r_floor=-10.0))
    assert ok.status is not QPStatus.INFEASIBLE


def test_dsqp_t_equals_one_plus_tau():
    rng = np.random.default_rng(21)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        bundle = Bundle(n)
        for _ in range(int(rng.integers(1, 5))):
            bundle.add(Cut(rng.normal(size=n), float(rng.normal()),
                           rng.normal(size=n)))
        inputs = SubproblemInputs(bundle, rng.normal(size=n), mu=1.0,
                                  level=float(rng.normal()), r_floor=-100.0)
        sol = solve_dsqp(inputs)
        if sol.status is QPStatus.INFEASIBLE:
            continue
        assert sol.t == pytest.approx(1.0 + sol.tau, abs=1e-9)
        assert sol.t == pytest.approx(float(sol.cut_duals.sum()), abs=1e-9)


# ---------------------------------------------------------------------------
# lower-bound LP
# ---------------------------------------------------------------------------

def test_lower_bound_single_cut_hits_floor():
    b = _bundle_1d((0.0, 0.0, 1.0))
    assert compute_lower_bound(b, -10.0) == pytest.approx(-10.0)


def test_lower_bound_vee_model():
    assert compute_lower_bound(_abs_bundle(), -10.0) == pytest.approx(
        0.0, abs=1e-10)


def test_lower_bound_shifted_vee():
    # cuts 1+x and 1-x meet at (0, 1)
    b = _bundle_1d((0.0, 1.0, 1.0), (0.0, 1.0, -1.0))
    assert compute_lower_bound(b, -10.0) == pytest.approx(1.0, abs=1e-10)


def test_lower_bound_monotone_in_cuts():
    rng = np.random.default_rng(13)
    for _ in range(10):
        b = Bundle(2)
        prev = -math.inf
        for _ in range(6):
            b.add(Cut(rng.normal(size=2), float(rng.normal()),
                      rng.normal(size=2)))
            val = compute_lower_bound(b, -50.0)
            assert val >= prev - 1e-9
            assert val >= -50.0
            prev = val


# ---------------------------------------------------------------------------
# independent KKT check
# ---------------------------------------------------------------------------

def test_verify_kkt_zero_on_closed_form():
    b2 = Bundle(2)
    b2.add(Cut(np.zeros(2), 0.0, np.array([1.0, 0.0])))
    inputs = SubproblemInputs(b2, np.zeros(2), mu=1.0, r_floor=-10.0)
    sol = solve_prox_qp(inputs)
    assert verify_kkt(inputs, sol) <= 1e-12


def test_verify_kkt_detects_dual_perturbation():
    b2 = Bundle(2)
    b2.add(Cut(np.zeros(2), 0.0, np.array([1.0, 0.0])))
    inputs = SubproblemInputs(b2, np.zeros(2), mu=1.0, r_floor=-10.0)
    sol = solve_prox_qp(inputs)
    bad = replace(sol, cut_duals=sol.cut_duals + 1e-3,
                  t=sol.t + 1e-3)
    res = verify_kkt(inputs, bad)
    # residuals are scaled by 1 + max|g| + |r| = 3 for this instance
    assert res == pytest.approx(1e-3 / 3.0, rel=1e-6)


def test_verify_kkt_on_dsqp_hand_example():
    inputs = SubproblemInputs(_abs_bundle(), np.array([2.0]), mu=1.0,
                              level=0.5, r_floor=-10.0)
    sol = solve_dsqp(inputs)
    assert verify_kkt(inputs, sol) <= 1e-10


def test_inputs_validation():
    with pytest.raises(SubproblemError):
        SubproblemInputs(_abs_bundle(), np.zeros(2))
    with pytest.raises(SubproblemError):
        SubproblemInputs(_abs_bundle(), np.zeros(1), mu=0.0)
