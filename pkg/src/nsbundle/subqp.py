"""Dense convex QP/LP engine for the stabilized subproblems.

All three subproblems are solved through their duals, which are small
nonnegativity-constrained QPs over the cut multipliers (plus slack
variables for the epigraph floor and the level bound).  The engine is a
primal active-set method on the sign constraints with an optional single
equality; each working-set solve is a dense KKT system.  The lower-bound
LP is solved by a separate two-phase simplex on its dual, never as a
small-curvature limit of the QPs.

`verify_kkt` recomputes stationarity, feasibility and complementarity
from scratch and is independent of the solve path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import Bundle, model_eval


class SubproblemError(Exception):
    pass


class QPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class QPSolution:
    """Primal/dual solution of one stabilized subproblem."""

    x: np.ndarray
    r: float
    cut_duals: np.ndarray
    t: float                    # sum of cut multipliers
    tau: float                  # level-constraint multiplier (0 if no level)
    kkt_residual: float
    status: QPStatus
    gamma: float = math.nan     # mu / t, reported for the proximity rule
    floor_dual: float = 0.0     # multiplier of r >= r_floor


@dataclass(frozen=True)
class SubproblemInputs:
    """One subproblem instance: bundle, center and stabilization data."""

    bundle: Bundle
    center: np.ndarray
    mu: float | None = None
    level: float = math.inf
    r_floor: float = -math.inf

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.shape != (self.bundle.dimension,):
            raise SubproblemError("center dimension does not match bundle")
        object.__setattr__(self, "center", center)
        if self.mu is not None and not self.mu > 0.0:
            raise SubproblemError("mu must be positive")


# ---------------------------------------------------------------------------
# Active-set engine:  minimize (1/2) w'Qw - b'w  s.t.  w >= 0 [, a'w = e]
# ---------------------------------------------------------------------------

def _step_direction(Q, g, a, F, gtol, noise=0.0):
    """Equality-constrained descent step from the current point.

    Works in an orthonormal basis Z of {p : a_F'p = 0} (all of R^nf
    without the equality) and eigendecomposes Z'Q_FF Z, so the reduced
    gradient splits cleanly into a range part (Newton step to the face
    minimizer) and a null part (direction of linear descent).  Gradient
    components below max(gtol, noise), the round-off floor of forming
    g itself, are treated as converged: near-singular eigenvalues
    otherwise amplify that round-off into endless fictional descent.
    Returns (p, stationary); p is zero when no component is live.
    """
    nf = len(F)
    if a is None:
        Z = np.eye(nf)
    else:
        u = a[F] / float(np.linalg.norm(a[F]))
        v = u.copy()
        v[0] += 1.0 if u[0] >= 0.0 else -1.0
        v /= np.linalg.norm(v)
        Z = (np.eye(nf) - 2.0 * np.outer(v, v))[:, 1:]
    if Z.shape[1] == 0:
        return np.zeros(nf), True
    gz = Z.T @ g[F]
    B = Z.T @ Q[np.ix_(F, F)] @ Z
    S, V = np.linalg.eigh(B)
    tol_s = max(float(S[-1]), 0.0) * 1e-12
    c = V.T @ gz
    floor = max(gtol, noise)
    live = np.abs(c) > floor
    null = S <= tol_s
    cn = c[null & live]
    if cn.size:
        # the face objective decreases linearly along this direction
        return Z @ (-(V[:, null & live] @ cn)), False
    rng = ~null & live
    cr = c[rng]
    if cr.size == 0:
        return np.zeros(nf), True
    return Z @ (-(V[:, rng] @ (cr / S[rng]))), False


def solve_nonneg_qp(Q: np.ndarray, b: np.ndarray,
                    a: np.ndarray | None = None, e: float = 1.0,
                    max_iter: int | None = None) -> tuple[np.ndarray, float]:
    """Active-set solve of min (1/2)w'Qw - b'w, w >= 0 [, a'w = e].

    Q must be symmetric positive semidefinite; here it is a Gram matrix,
    so rank-deficient faces are the norm and the method works with step
    directions from the current iterate (exact line step capped by a
    ratio test) rather than absolute face minimizers.  Returns the
    minimizer and the equality multiplier (0.0 without an equality).
    """
    m = len(b)
    if max_iter is None:
        max_iter = 300 + 30 * m
    w = np.zeros(m)
    if a is None:
        free: list[int] = []
    else:
        pos = np.flatnonzero(a > 0)
        if pos.size == 0:
            raise SubproblemError("equality a'w = e has no nonnegative solution")
        j = int(pos[np.argmax(b[pos] / a[pos])])
        w[j] = e / a[j]
        free = [j]
    bmax = float(np.max(np.abs(b))) if m else 0.0
    gtol = 1e-11 * (1.0 + bmax)
    zero_steps = 0
    # variables shed at a degenerate vertex may not re-enter until the
    # point actually moves, else enter/drop pairs can cycle forever
    banned: set[int] = set()
    Qabs = np.abs(Q)
    y = 0.0
    for _ in range(max_iter):
        # w is supported on the free set, so all products go through it
        if free:
            wf_sup = w[free]
            g = Q[:, free] @ wf_sup - b
            qa = Qabs[:, free] @ wf_sup       # row magnitudes of |Q| w
            bfmax = float(np.max(np.abs(b[free])))
            gnoise = (4.0 * m * np.finfo(float).eps
                      * (float(np.max(qa[free])) + bfmax))
            gtol = 1e-11 * (1.0 + bfmax)
            p, stationary = _step_direction(Q, g, a, free, gtol, gnoise)
        else:
            g = -b
            qa = np.zeros(m)
            p, stationary = np.zeros(0), True
        if not stationary:
            descent = -float(g[free] @ p)
            curv = float(p @ (Q[np.ix_(free, free)] @ p))
            t_star = descent / curv if curv > 0.0 else math.inf
            wf = w[free]
            blocking = np.flatnonzero(p < 0.0)
            if blocking.size:
                ratios = wf[blocking] / -p[blocking]
                alpha = float(np.min(ratios))
            else:
                ratios = None
                alpha = math.inf
            if math.isinf(t_star) and math.isinf(alpha):
                raise SubproblemError("unbounded direction in a bounded dual")
            if alpha == 0.0:
                # degenerate vertex: shed the blockers sitting at zero
                zero_steps += 1
                if zero_steps > 200:
                    raise SubproblemError("active-set iteration limit exceeded")
                drop = blocking[ratios <= 1e-300]
                keep = np.ones(len(free), dtype=bool)
                keep[drop] = False
                if a is not None and not keep.any():
                    keep[int(np.argmax(wf))] = True
                banned.update(idx for i, idx in enumerate(free) if not keep[i])
                new_free = [idx for i, idx in enumerate(free) if keep[i]]
                w = np.zeros(m)
                w[new_free] = wf[keep]
                free[:] = new_free
                continue
            t = min(t_star, alpha)
            if descent <= 0.0 or (t_star <= alpha
                                  and t * descent - 0.5 * t * t * curv
                                  <= 1e-15 * (1.0 + abs(float(b @ w)))):
                # an unblocked full step that cannot improve the objective
                # beyond round-off: the face is at its numerical floor
                stationary = True
        if stationary:
            if a is not None and free:
                af = a[free]
                y = -float(g[free] @ af) / float(af @ af)
            else:
                y = 0.0
            red = g + (y * a if a is not None else 0.0)
            mask = np.ones(m, dtype=bool)
            mask[free] = False
            mask[list(banned)] = False
            cand = np.flatnonzero(mask)
            if cand.size:
                # entering violations below the round-off floor of Q @ w
                # are noise and would only be dropped again at ratio zero
                noise = (16.0 * m * np.finfo(float).eps
                         * (qa[cand] + np.abs(b[cand])))
                # scale per candidate row: a global 1 + max|b| would let
                # wildly inactive cuts drown out genuine small violations
                score = red[cand] + np.maximum(
                    1e-10 * (1.0 + np.abs(b[cand])), noise)
                jrel = int(np.argmin(score))
                if score[jrel] < 0.0:
                    free.append(int(cand[jrel]))
                    continue
            # done; undo the drift that clipping leaves in the equality
            if a is not None:
                s = float(a @ w)
                if s > 0.0:
                    w = w * (e / s)
            return w, y
        zero_steps = 0
        banned.clear()
        wf = wf + t * p
        if t == alpha and ratios is not None:
            drop = blocking[ratios <= alpha * (1.0 + 1e-10)]
            wf[drop] = 0.0
            keep = np.ones(len(free), dtype=bool)
            keep[drop] = False
            if a is not None and not keep.any():
                keep[int(np.argmax(wf))] = True
            new_free = [idx for i, idx in enumerate(free) if keep[i]]
            w = np.zeros(m)
            w[new_free] = np.clip(wf[keep], 0.0, None)
            free[:] = new_free
        else:
            w = np.zeros(m)
            w[free] = np.clip(wf, 0.0, None)
    raise SubproblemError("active-set iteration limit exceeded")


# ---------------------------------------------------------------------------
# Two-phase dense simplex for the lower-bound LP
# ---------------------------------------------------------------------------

def _simplex_standard(c: np.ndarray, A: np.ndarray, b: np.ndarray,
                      max_iter: int = 20000) -> float:
    """min c'x s.t. Ax = b, x >= 0 via a two-phase dense tableau.

    Dantzig pricing with a Bland fallback after a stall budget.  Returns
    the optimal value; raises on infeasibility or unboundedness (neither
    occurs for the lower-bound LP, which is guarded by its floor).
    """
    m, n = A.shape
    sign = np.where(b < 0.0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    # phase-1 tableau with artificial basis
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    scale = 1.0 + float(np.max(np.abs(A))) + float(np.max(np.abs(b)))
    tol = 1e-11 * scale

    def pivot(T, basis, ncols, bland, max_pivots):
        for it in range(max_pivots):
            row_costs = T[-1, :ncols]
            if bland or it > max_pivots // 2:
                neg = np.flatnonzero(row_costs < -tol)
                if neg.size == 0:
                    return True
                j = int(neg[0])
            else:
                j = int(np.argmin(row_costs))
                if row_costs[j] >= -tol:
                    return True
            col = T[:-1, j]
            pos = np.flatnonzero(col > tol)
            if pos.size == 0:
                raise SubproblemError("LP unbounded")
            ratios = T[pos, -1] / col[pos]
            i = int(pos[np.argmin(ratios)])
            T[i] /= T[i, j]
            elim = T[:, j].copy()
            elim[i] = 0.0
            T -= elim[:, None] * T[i][None, :]
            basis[i] = j
        raise SubproblemError("simplex iteration limit exceeded")

    pivot(T, basis, n + m, bland=False, max_pivots=max_iter)
    if T[-1, -1] < -1e-7 * scale:
        raise SubproblemError("LP infeasible")
    # drive any artificial variables out of the basis if possible
    for i, bi in enumerate(basis):
        if bi >= n:
            row = T[i, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > tol:
                T[i] /= T[i, j]
                elim = T[:, j].copy()
                elim[i] = 0.0
                T -= elim[:, None] * T[i][None, :]
                basis[i] = j
    # phase 2: swap in the real objective
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[m, :n] = c
    for i, bi in enumerate(basis):
        if bi < n:
            T2[m] -= c[bi] * T2[i]
    pivot(T2, basis, n, bland=False, max_pivots=max_iter)
    return -float(T2[-1, -1])


def compute_lower_bound(bundle: Bundle, r_floor: float) -> float:
    """Minimum of the cutting-plane model, clipped below at `r_floor`.

    Solved as the dual LP   max c'lam + r_floor * nu
    s.t. G'lam = 0, 1'lam + nu = 1, lam, nu >= 0,
    whose value equals min {r : cuts(x) <= r, r >= r_floor}.
    """
    if len(bundle) == 0:
        raise SubproblemError("lower bound of an empty bundle")
    if not math.isfinite(r_floor):
        raise SubproblemError("r_floor must be finite")
    m, n = len(bundle), bundle.dimension
    # anchor cut values at the origin of the model's affine pieces
    c = bundle.values - (bundle.subgradients * bundle.points).sum(axis=1)
    A = np.zeros((n + 1, m + 1))
    A[:n, :m] = bundle.subgradients.T
    A[n, :] = 1.0
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    obj = -np.concatenate([c, [r_floor]])
    val = -_simplex_standard(obj, A, rhs)
    return max(val, r_floor)


# ---------------------------------------------------------------------------
# The three stabilized subproblems
# ---------------------------------------------------------------------------

def _cut_values_at_center(inputs: SubproblemInputs) -> np.ndarray:
    return inputs.bundle.values_at(inputs.center)


def solve_prox_qp(inputs: SubproblemInputs) -> QPSolution:
    """min r + (mu/2)||x - center||^2  s.t.  cuts(x) <= r, r >= r_floor."""
    if inputs.mu is None:
        raise SubproblemError("prox subproblem requires mu")
    return _solve_stabilized(inputs, inputs.mu, level=math.inf)


def solve_dsqp(inputs: SubproblemInputs, mu_k: float | None = None,
               level_nonempty: bool = False) -> QPSolution:
    """Doubly stabilized subproblem: prox term plus the level bound r <= l.

    `level_nonempty` lets a caller that refreshed the lower bound this
    step (so level >= model minimum by construction) skip the LP
    feasibility probe inside the level projection.
    """
    mu = mu_k if mu_k is not None else inputs.mu
    if mu is None or not mu > 0.0:
        raise SubproblemError("doubly stabilized subproblem requires mu > 0")
    if inputs.level < inputs.r_floor:
        return QPSolution(
            x=inputs.center.copy(), r=math.nan,
            cut_duals=np.zeros(len(inputs.bundle)), t=0.0, tau=0.0,
            kkt_residual=math.inf, status=QPStatus.INFEASIBLE, gamma=math.nan)
    return _solve_stabilized(inputs, mu, level=inputs.level,
                             level_nonempty=level_nonempty)


def _polish_projection(bundle: Bundle, center: np.ndarray, bound: float,
                       lam: np.ndarray):
    """Refine a projection through its active-set KKT system.

    The active-set dual solve leaves O(gtol) noise in lam that the
    recovery x = center - G'lam inherits; one dense solve of the
    stationarity system on the active cuts removes it.  Returns
    (lam, x) or None when the active-set guess does not verify.
    """
    act = np.flatnonzero(lam > 1e-8 * float(lam.max()))
    q = act.size
    n = bundle.dimension
    G_a = bundle.subgradients[act]
    v_a = bundle.values_at(center)[act]
    K = np.zeros((n + q, n + q))
    K[:n, :n] = np.eye(n)
    K[:n, n:] = G_a.T
    K[n:, :n] = G_a
    rhs = np.concatenate([np.zeros(n), bound - v_a])
    try:
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    except np.linalg.LinAlgError:
        return None
    d, lam_a = sol[:n], sol[n:]
    if lam_a.min() < -1e-9:
        return None
    x = center + d
    vscale = 1.0 + float(np.max(np.abs(bundle.values_at(x)))) + abs(bound)
    if float(bundle.values_at(x).max()) > bound + 1e-10 * vscale:
        return None
    out = np.zeros(len(lam))
    out[act] = np.clip(lam_a, 0.0, None)
    return out, x


def _projection_duals(bundle: Bundle, center: np.ndarray, bound: float,
                      known_nonempty: bool = False):
    """Duals of min (1/2)||x - center||^2 s.t. cuts(x) <= bound.

    Returns (lam, x); lam is all-zero with x = center when the center is
    already inside the set, and None when the set is empty.  Callers
    that can certify {model <= bound} is nonempty set `known_nonempty`
    to skip the LP feasibility probe.
    """
    model_c, _ = model_eval(bundle, center)
    if model_c <= bound:
        return np.zeros(len(bundle)), center.copy()

    def set_is_empty():
        if known_nonempty:
            return False
        # feasibility probe through the lower-bound LP
        probe_floor = bound - max(1.0, abs(bound))
        min_model = compute_lower_bound(bundle, probe_floor)
        return min_model > bound + 1e-9 * (1.0 + abs(bound))

    try:
        lam, _ = solve_nonneg_qp(bundle.gram(),
                                 bundle.values_at(center) - bound, a=None)
    except SubproblemError:
        # the dual of a projection onto a nonempty set is bounded, so an
        # unbounded (or stalled) dual certifies the set is numerically
        # empty
        return None
    x = center - bundle.subgradients.T @ lam
    polished = _polish_projection(bundle, center, bound, lam)
    if polished is not None:
        lam, x = polished
    elif set_is_empty():
        # the dual came back finite but does not verify; trust the LP
        return None
    return lam, x


def _infeasible_solution(m: int, center: np.ndarray) -> QPSolution:
    return QPSolution(x=center.copy(), r=math.nan, cut_duals=np.zeros(m),
                      t=0.0, tau=0.0, kkt_residual=math.inf,
                      status=QPStatus.INFEASIBLE, gamma=math.nan)


def _polish_interior(bundle: Bundle, center: np.ndarray, mu: float,
                     lam: np.ndarray):
    """Refine the prox point by solving the active-set KKT system directly.

    Recovering x as center - G'lam/mu divides the dual-solve error by mu,
    which caps the attainable accuracy when mu is small.  Solving the
    primal stationarity system on the active cuts in one dense solve has
    no such amplification.  Returns (x, r, lam) or None when the guess
    of the active set does not verify.
    """
    act = np.flatnonzero(lam > 1e-8 * float(lam.max()))
    q = act.size
    n = bundle.dimension
    G_a = bundle.subgradients[act]
    v_a = bundle.values_at(center)[act]
    K = np.zeros((n + q + 1, n + q + 1))
    K[:n, :n] = mu * np.eye(n)
    K[:n, n:n + q] = G_a.T
    K[n:n + q, :n] = G_a
    K[n:n + q, n + q] = -1.0
    K[n + q, n:n + q] = 1.0
    rhs = np.concatenate([np.zeros(n), -v_a, [1.0]])
    try:
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    except np.linalg.LinAlgError:
        return None
    d, lam_a, r = sol[:n], sol[n:n + q], float(sol[n + q])
    vscale = 1.0 + float(np.max(np.abs(v_a)))
    if lam_a.min() < -1e-9 or not math.isfinite(r):
        return None
    x = center + d
    vals = bundle.values_at(x)
    if float(vals.max()) > r + 1e-8 * vscale:
        return None
    out = np.zeros(len(lam))
    out[act] = np.clip(lam_a, 0.0, None)
    s = out.sum()
    if s > 0.0:
        out /= s
    return x, r, out


def _solve_stabilized(inputs: SubproblemInputs, mu: float, level: float,
                      level_nonempty: bool = False) -> QPSolution:
    """Prox subproblem with optional level bound r <= l and floor r >= fl.

    Parametrized by the scalar r, the problem minimizes
    r + (mu/2) dist^2(center, {model <= r}); its derivative in r is
    1 - mu * s(r) with s(r) the multiplier sum of the projection onto
    {model <= r}, decreasing in r.  The unconstrained prox step (whose
    dual lives on the simplex, so it is always bounded and well scaled)
    is solved first; the value of r it lands on tells which bound, if
    any, is active, and the matching projection is solved only then.
    """
    bundle, center = inputs.bundle, inputs.center
    if len(bundle) == 0:
        raise SubproblemError("subproblem with an empty bundle")
    m = len(bundle)
    has_level = math.isfinite(level)
    has_floor = math.isfinite(inputs.r_floor)
    lam, _ = solve_nonneg_qp(bundle.gram(),
                             mu * bundle.values_at(center),
                             a=np.ones(m), e=1.0)
    x = center - (bundle.subgradients.T @ lam) / mu
    r, _ = model_eval(bundle, x)
    polished = _polish_interior(bundle, center, mu, lam)
    if polished is not None:
        x, r, lam = polished
    if has_level and r > level:
        proj = _projection_duals(bundle, center, level,
                                 known_nonempty=level_nonempty)
        if proj is None:
            return _infeasible_solution(m, center)
        lam_p, x_p = proj
        tau = max(mu * float(lam_p.sum()) - 1.0, 0.0)
        sol = QPSolution(x=x_p, r=float(level), cut_duals=mu * lam_p,
                         t=1.0 + tau, tau=tau, kkt_residual=0.0,
                         status=QPStatus.OPTIMAL, gamma=mu / (1.0 + tau))
        return replace(sol,
                       kkt_residual=verify_kkt(inputs, sol, mu_override=mu))
    if has_floor and r < inputs.r_floor:
        # {model <= r_floor} contains {model <= r}, which is nonempty, so
        # a failed floor projection is round-off; keep the prox step then
        proj = _projection_duals(bundle, center, inputs.r_floor,
                                 known_nonempty=True)
        if proj is not None:
            lam_p, x_p = proj
            nu = max(1.0 - mu * float(lam_p.sum()), 0.0)
            status = QPStatus.DEGENERATE if nu > 1e-11 else QPStatus.OPTIMAL
            sol = QPSolution(x=x_p, r=float(inputs.r_floor),
                             cut_duals=mu * lam_p, t=1.0, tau=0.0,
                             kkt_residual=0.0, status=status, gamma=mu,
                             floor_dual=nu)
            return replace(
                sol, kkt_residual=verify_kkt(inputs, sol, mu_override=mu))
    # neither bound on r is active, the plain prox step stands
    sol = QPSolution(x=x, r=float(r), cut_duals=lam, t=1.0, tau=0.0,
                     kkt_residual=0.0, status=QPStatus.OPTIMAL, gamma=mu)
    return replace(sol, kkt_residual=verify_kkt(inputs, sol, mu_override=mu))


def solve_level_qp(inputs: SubproblemInputs) -> QPSolution:
    """Euclidean projection of the center onto {x : model(x) <= level}."""
    bundle, center, level = inputs.bundle, inputs.center, inputs.level
    if len(bundle) == 0:
        raise SubproblemError("subproblem with an empty bundle")
    if not math.isfinite(level):
        raise SubproblemError("level projection requires a finite level")
    m = len(bundle)
    proj = _projection_duals(bundle, center, level)
    if proj is None:
        return _infeasible_solution(m, center)
    lam, x = proj
    if not lam.any():
        sol = QPSolution(x=x, r=float(level), cut_duals=lam, t=0.0, tau=0.0,
                         kkt_residual=0.0, status=QPStatus.DEGENERATE)
        return replace(sol, kkt_residual=verify_kkt(inputs, sol))
    sol = QPSolution(x=x, r=float(level), cut_duals=lam, t=float(lam.sum()),
                     tau=0.0, kkt_residual=0.0, status=QPStatus.OPTIMAL)
    return replace(sol, kkt_residual=verify_kkt(inputs, sol))


def verify_kkt(inputs: SubproblemInputs, sol: QPSolution,
               mu_override: float | None = None) -> float:
    """Recompute all KKT residuals from scratch; returns the max, scaled.

    Residuals are scaled by (1 + max ||g||_inf + |r|) so the value is
    comparable across problems.  This check shares no state with the
    solve path beyond the solution itself.
    """
    if sol.status is QPStatus.INFEASIBLE:
        return math.inf
    bundle, center = inputs.bundle, inputs.center
    lam = np.asarray(sol.cut_duals, dtype=float)
    x = sol.x
    gmax = float(np.max(np.abs(bundle.subgradients))) if len(bundle) else 0.0
    rref = 0.0 if math.isnan(sol.r) else abs(sol.r)
    scale = 1.0 + gmax + rref
    cut_at_x = bundle.values_at(x)
    agg = bundle.subgradients.T @ lam
    res = [float(np.max(-lam, initial=0.0))]          # dual feasibility
    is_level_only = inputs.mu is None and mu_override is None
    if is_level_only:
        # pure projection: stationarity (x - center) + sum lam_i g_i = 0
        res.append(float(np.max(np.abs((x - center) + agg))))
        res.append(float(np.max(cut_at_x - inputs.level, initial=0.0)))   # primal
        res.append(float(np.max(np.abs(lam * (cut_at_x - inputs.level)))
                   if len(lam) else 0.0))                                 # compl.
        res.append(max(-sol.tau, 0.0))
    else:
        mu = mu_override if mu_override is not None else inputs.mu
        r = sol.r
        res.append(float(np.max(np.abs(mu * (x - center) + agg))))        # x-stat.
        nu = sol.floor_dual
        res.append(abs(1.0 - lam.sum() - nu + sol.tau))                   # r-stat.
        res.append(float(np.max(cut_at_x - r, initial=0.0)))              # primal
        if math.isfinite(inputs.level):
            res.append(max(r - inputs.level, 0.0))
            res.append(abs(sol.tau * (r - inputs.level)))
            res.append(max(-sol.tau, 0.0))
        if math.isfinite(inputs.r_floor):
            res.append(max(inputs.r_floor - r, 0.0))
            res.append(abs(nu * (r - inputs.r_floor)))
            res.append(max(-nu, 0.0))
        res.append(float(np.max(np.abs(lam * (cut_at_x - r)))
                   if len(lam) else 0.0))                                 # compl.
    return max(res) / scale
