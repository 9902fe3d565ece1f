"""Bundle-method solvers for nonsmooth convex minimization.

Four algorithm loops (an accelerated proximal cutting-plane method, an
accelerated level method, a doubly stabilized combination of the two,
and a classical proximal bundle baseline) over a registry of 15 standard
nonsmooth test problems, plus a benchmark runner and CLI.
"""

from .model import (
    BetaMode, Bundle, Cut, ModelError, NesterovState, cut_value,
    linearization_error, model_eval, nesterov_advance,
)
from .oracle import (
    OracleError, OracleResponse, ProblemSpec, evaluate, get_problem,
    list_problems,
)
from .subqp import (
    QPSolution, QPStatus, SubproblemError, SubproblemInputs,
    compute_lower_bound, solve_dsqp, solve_level_qp, solve_prox_qp,
    verify_kkt,
)
from .solvers import (
    Algorithm, IterationRecord, RunResult, SolverConfig, SolverError,
    Termination, run,
)
from .bench import (
    BenchError, ResultRow, SuiteConfig, emit_report, run_suite,
)

__all__ = [
    "Algorithm", "BenchError", "BetaMode", "Bundle", "Cut",
    "IterationRecord", "ModelError", "NesterovState", "OracleError",
    "OracleResponse", "ProblemSpec", "QPSolution", "QPStatus",
    "ResultRow", "RunResult", "SolverConfig", "SolverError",
    "SubproblemError", "SubproblemInputs", "SuiteConfig", "Termination",
    "compute_lower_bound", "cut_value", "emit_report", "evaluate",
    "get_problem", "linearization_error", "list_problems", "model_eval",
    "nesterov_advance", "run", "run_suite", "solve_dsqp",
    "solve_level_qp", "solve_prox_qp", "verify_kkt",
]

__version__ = "0.1.0"
