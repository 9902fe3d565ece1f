"""First-order oracles for the 15 standard nonsmooth test problems.

Each problem returns the exact function value and one subgradient.  At
kinks the subgradient of the lowest-index active piece is returned, which
keeps every trace deterministic.  Formulas and starting points follow the
classical academic test set (Charalambous-Bandler, Demyanov-Malozemov,
Lemarechal, Shor, ...); the registry also carries a high-accuracy
minimizer per problem, computed once with the solvers in this package and
frozen as a derived asset for the complexity-bound monitors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class OracleResponse:
    value: float
    subgradient: np.ndarray


@dataclass(frozen=True)
class ProblemSpec:
    id: int
    name: str
    dimension: int
    optimal_value: float
    start_point: np.ndarray
    f_inf_default: float
    # derived asset: best point found by a high-accuracy run, not reference data
    minimizer: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        x0 = np.asarray(self.start_point, dtype=float)
        x0.setflags(write=False)
        object.__setattr__(self, "start_point", x0)
        if self.minimizer is not None:
            xs = np.asarray(self.minimizer, dtype=float)
            xs.setflags(write=False)
            object.__setattr__(self, "minimizer", xs)


def _max_piece(values, grads):
    """Pick the first maximal piece; returns (value, gradient, index)."""
    values = np.asarray(values, dtype=float)
    idx = int(np.argmax(values))
    return float(values[idx]), np.asarray(grads[idx], dtype=float), idx


def _cb2(x):
    p = [x[0] ** 2 + x[1] ** 4,
         (2.0 - x[0]) ** 2 + (2.0 - x[1]) ** 2,
         2.0 * np.exp(x[1] - x[0])]
    g = [np.array([2.0 * x[0], 4.0 * x[1] ** 3]),
         np.array([-2.0 * (2.0 - x[0]), -2.0 * (2.0 - x[1])]),
         np.array([-2.0 * np.exp(x[1] - x[0]), 2.0 * np.exp(x[1] - x[0])])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _cb3(x):
    p = [x[0] ** 4 + x[1] ** 2,
         (2.0 - x[0]) ** 2 + (2.0 - x[1]) ** 2,
         2.0 * np.exp(x[1] - x[0])]
    g = [np.array([4.0 * x[0] ** 3, 2.0 * x[1]]),
         np.array([-2.0 * (2.0 - x[0]), -2.0 * (2.0 - x[1])]),
         np.array([-2.0 * np.exp(x[1] - x[0]), 2.0 * np.exp(x[1] - x[0])])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _dem(x):
    p = [5.0 * x[0] + x[1],
         -5.0 * x[0] + x[1],
         x[0] ** 2 + x[1] ** 2 + 4.0 * x[1]]
    g = [np.array([5.0, 1.0]),
         np.array([-5.0, 1.0]),
         np.array([2.0 * x[0], 2.0 * x[1] + 4.0])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _ql(x):
    base = x[0] ** 2 + x[1] ** 2
    gbase = np.array([2.0 * x[0], 2.0 * x[1]])
    p = [base,
         base + 10.0 * (-4.0 * x[0] - x[1] + 4.0),
         base + 10.0 * (-x[0] - 2.0 * x[1] + 6.0)]
    g = [gbase,
         gbase + np.array([-40.0, -10.0]),
         gbase + np.array([-10.0, -20.0])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _lq(x):
    p = [-x[0] - x[1],
         -x[0] - x[1] + x[0] ** 2 + x[1] ** 2 - 1.0]
    g = [np.array([-1.0, -1.0]),
         np.array([-1.0 + 2.0 * x[0], -1.0 + 2.0 * x[1]])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _mifflin1(x):
    s = x[0] ** 2 + x[1] ** 2 - 1.0
    p = [-x[0] + 20.0 * s, -x[0]]
    g = [np.array([-1.0 + 40.0 * x[0], 40.0 * x[1]]),
         np.array([-1.0, 0.0])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _mifflin2(x):
    s = x[0] ** 2 + x[1] ** 2 - 1.0
    # -x1 + 2 s + 1.75 |s| as a max of two smooth pieces
    p = [-x[0] + 3.75 * s, -x[0] + 0.25 * s]
    g = [np.array([-1.0 + 7.5 * x[0], 7.5 * x[1]]),
         np.array([-1.0 + 0.5 * x[0], 0.5 * x[1]])]
    v, gr, _ = _max_piece(p, g)
    return v, gr


def _rosen_suzuki(x):
    f0 = (x[0] ** 2 + x[1] ** 2 + 2.0 * x[2] ** 2 + x[3] ** 2
          - 5.0 * x[0] - 5.0 * x[1] - 21.0 * x[2] + 7.0 * x[3])
    g0 = np.array([2.0 * x[0] - 5.0, 2.0 * x[1] - 5.0,
                   4.0 * x[2] - 21.0, 2.0 * x[3] + 7.0])
    c1 = (x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2
          + x[0] - x[1] + x[2] - x[3] - 8.0)
    gc1 = np.array([2.0 * x[0] + 1.0, 2.0 * x[1] - 1.0,
                    2.0 * x[2] + 1.0, 2.0 * x[3] - 1.0])
    c2 = (x[0] ** 2 + 2.0 * x[1] ** 2 + x[2] ** 2 + 2.0 * x[3] ** 2
          - x[0] - x[3] - 10.0)
    gc2 = np.array([2.0 * x[0] - 1.0, 4.0 * x[1],
                    2.0 * x[2], 4.0 * x[3] - 1.0])
    c3 = (2.0 * x[0] ** 2 + x[1] ** 2 + x[2] ** 2
          + 2.0 * x[0] - x[1] - x[3] - 5.0)
    gc3 = np.array([4.0 * x[0] + 2.0, 2.0 * x[1] - 1.0,
                    2.0 * x[2], -1.0])
    p = [f0, f0 + 10.0 * c1, f0 + 10.0 * c2, f0 + 10.0 * c3]
    g = [g0, g0 + 10.0 * gc1, g0 + 10.0 * gc2, g0 + 10.0 * gc3]
    v, gr, _ = _max_piece(p, g)
    return v, gr


_SHOR_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [2.0, 1.0, 1.0, 1.0, 3.0],
    [1.0, 2.0, 1.0, 1.0, 2.0],
    [1.0, 4.0, 1.0, 2.0, 2.0],
    [3.0, 2.0, 1.0, 0.0, 1.0],
    [0.0, 2.0, 1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 0.0, 1.0, 2.0, 1.0],
    [0.0, 0.0, 2.0, 1.0, 0.0],
    [1.0, 1.0, 2.0, 0.0, 0.0],
])
_SHOR_B = np.array([1.0, 5.0, 10.0, 2.0, 4.0, 3.0, 1.7, 2.5, 6.0, 4.5])


def _shor(x):
    diff = x[None, :] - _SHOR_A
    vals = _SHOR_B * (diff ** 2).sum(axis=1)
    i = int(np.argmax(vals))
    return float(vals[i]), 2.0 * _SHOR_B[i] * diff[i]


def _maxquad_data():
    n, m = 10, 5
    A = np.zeros((m, n, n))
    b = np.zeros((m, n))
    for k in range(1, m + 1):
        for i in range(1, n + 1):
            b[k - 1, i - 1] = np.exp(i / k) * np.sin(i * k)
            for j in range(i + 1, n + 1):
                v = np.exp(i / j) * np.cos(i * j) * np.sin(k)
                A[k - 1, i - 1, j - 1] = v
                A[k - 1, j - 1, i - 1] = v
        for i in range(n):
            A[k - 1, i, i] = (i + 1) / 10.0 * abs(np.sin(k)) + np.abs(
                A[k - 1, i, :]).sum() - abs(A[k - 1, i, i])
    return A, b


_MAXQUAD_A, _MAXQUAD_B = _maxquad_data()


def _maxquad(x):
    vals = np.einsum("i,kij,j->k", x, _MAXQUAD_A, x) - _MAXQUAD_B @ x
    i = int(np.argmax(vals))
    return float(vals[i]), 2.0 * _MAXQUAD_A[i] @ x - _MAXQUAD_B[i]


def _maxq(x):
    i = int(np.argmax(x ** 2))
    g = np.zeros_like(x)
    g[i] = 2.0 * x[i]
    return float(x[i] ** 2), g


def _maxl(x):
    # pieces ordered (+x_1, -x_1, +x_2, -x_2, ...); first active wins
    vals = np.empty(2 * x.size)
    vals[0::2] = x
    vals[1::2] = -x
    j = int(np.argmax(vals))
    i, sign = divmod(j, 2)
    g = np.zeros_like(x)
    g[i] = 1.0 if sign == 0 else -1.0
    return float(vals[j]), g


def _goffin(x):
    i = int(np.argmax(x))
    g = np.full_like(x, -1.0)
    g[i] += 50.0
    return float(50.0 * x[i] - x.sum()), g


def _hilbert(n):
    i = np.arange(1, n + 1)
    return 1.0 / (i[:, None] + i[None, :] - 1.0)


_HILB50 = _hilbert(50)


def _mxhilb(x):
    h = _HILB50 @ x
    # pieces ordered (+h_1, -h_1, +h_2, -h_2, ...)
    vals = np.empty(2 * h.size)
    vals[0::2] = h
    vals[1::2] = -h
    j = int(np.argmax(vals))
    i, sign = divmod(j, 2)
    g = _HILB50[i] if sign == 0 else -_HILB50[i]
    return float(vals[j]), g.copy()


def _l1hilb(x):
    h = _HILB50 @ x
    s = np.where(h >= 0.0, 1.0, -1.0)   # +1 branch at the kink
    return float(np.abs(h).sum()), s @ _HILB50


_EVALUATORS = {
    "CB2": _cb2,
    "CB3": _cb3,
    "DEM": _dem,
    "QL": _ql,
    "LQ": _lq,
    "Mifflin1": _mifflin1,
    "Mifflin2": _mifflin2,
    "Rosen-Suzuki": _rosen_suzuki,
    "Shor": _shor,
    "Maxquad": _maxquad,
    "Maxq": _maxq,
    "Maxl": _maxl,
    "Goffin": _goffin,
    "MxHilb": _mxhilb,
    "L1Hilb": _l1hilb,
}

_MAXQ_START = np.concatenate([np.arange(1.0, 11.0), -np.arange(11.0, 21.0)])

# High-accuracy minimizers, frozen from 1e-10-gap runs of the solvers in
# this package (analytic where one is known).  Used only by the
# complexity-bound monitors, never by the algorithms.
_MINIMIZERS = {
    "CB2": np.array([1.1390365890437844, 0.8995607702929424]),
    "CB3": np.array([1.0, 1.0]),
    "DEM": np.array([0.0, -3.0]),
    "QL": np.array([1.2, 2.4]),
    "LQ": np.array([np.sqrt(0.5), np.sqrt(0.5)]),
    "Mifflin1": np.array([1.0, 0.0]),
    "Mifflin2": np.array([1.0, 0.0]),
    "Rosen-Suzuki": np.array([0.0, 1.0, 2.0, -1.0]),
    "Shor": np.array([1.1243509064319069, 0.9794614106324189,
                      1.4777066096386575, 0.9202336957182736,
                      1.1242913440953336]),
    "Maxquad": np.array([-0.12634374827168792, -0.03437436874501826,
                         -0.00684280429954358, 0.02637607783924662,
                         0.06724607428743398, -0.27838637722557145,
                         0.07428055250718868, 0.13855584432640500,
                         0.08401488405587406, 0.03856182929647841]),
    "Maxq": np.zeros(20),
    "Maxl": np.zeros(20),
    "Goffin": np.zeros(50),
    "MxHilb": np.zeros(50),
    "L1Hilb": np.zeros(50),
}

_PROBLEMS = [
    ProblemSpec(1, "CB2", 2, 1.952224, np.array([1.5, 2.0]), -10.0,
                _MINIMIZERS["CB2"]),
    ProblemSpec(2, "CB3", 2, 2.0, np.array([2.0, 2.0]), -10.0,
                _MINIMIZERS["CB3"]),
    ProblemSpec(3, "DEM", 2, -3.0, np.array([1.0, 1.0]), -10.0,
                _MINIMIZERS["DEM"]),
    ProblemSpec(4, "QL", 2, 7.2, np.array([-1.0, 5.0]), -10.0,
                _MINIMIZERS["QL"]),
    ProblemSpec(5, "LQ", 2, -np.sqrt(2.0), np.array([-0.5, -0.5]), -10.0,
                _MINIMIZERS["LQ"]),
    ProblemSpec(6, "Mifflin1", 2, -1.0, np.array([0.8, 0.6]), -10.0,
                _MINIMIZERS["Mifflin1"]),
    ProblemSpec(7, "Mifflin2", 2, -1.0, np.array([-1.0, -1.0]), -10.0,
                _MINIMIZERS["Mifflin2"]),
    ProblemSpec(8, "Rosen-Suzuki", 4, -44.0, np.zeros(4), -100.0,
                _MINIMIZERS["Rosen-Suzuki"]),
    ProblemSpec(9, "Shor", 5, 22.600162, np.array([0.0, 0.0, 0.0, 0.0, 1.0]),
                0.0, _MINIMIZERS["Shor"]),
    ProblemSpec(10, "Maxquad", 10, -0.841408, np.ones(10), -10.0,
                _MINIMIZERS["Maxquad"]),
    ProblemSpec(11, "Maxq", 20, 0.0, _MAXQ_START, -10.0, _MINIMIZERS["Maxq"]),
    ProblemSpec(12, "Maxl", 20, 0.0, _MAXQ_START, -10.0, _MINIMIZERS["Maxl"]),
    ProblemSpec(13, "Goffin", 50, 0.0, np.arange(1.0, 51.0) - 25.5, -10.0,
                _MINIMIZERS["Goffin"]),
    ProblemSpec(14, "MxHilb", 50, 0.0, np.ones(50), -10.0,
                _MINIMIZERS["MxHilb"]),
    ProblemSpec(15, "L1Hilb", 50, 0.0, np.ones(50), -10.0,
                _MINIMIZERS["L1Hilb"]),
]


def list_problems() -> list[ProblemSpec]:
    """The 15 registry entries, in table order."""
    return list(_PROBLEMS)


def get_problem(key: int | str) -> ProblemSpec:
    """Look a problem up by id or (case-insensitive) name."""
    for p in _PROBLEMS:
        if (isinstance(key, int) and p.id == key) or (
                isinstance(key, str) and p.name.lower() == key.lower()):
            return p
    raise OracleError(f"unknown problem {key!r}")


def evaluate(problem: ProblemSpec, x: np.ndarray) -> OracleResponse:
    """Exact value and one subgradient of `problem` at `x`."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dimension,):
        raise OracleError(
            f"{problem.name}: expected dimension {problem.dimension}, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise OracleError(f"{problem.name}: non-finite input point")
    value, g = _EVALUATORS[problem.name](x)
    return OracleResponse(value, g)


def registry_json() -> str:
    """Registry dump consumed by the benchmark runner."""
    rows = [
        {
            "id": p.id,
            "name": p.name,
            "dimension": p.dimension,
            "optimal_value": p.optimal_value,
            "start_point": p.start_point.tolist(),
            "f_inf_default": p.f_inf_default,
        }
        for p in _PROBLEMS
    ]
    return json.dumps(rows, indent=2)
