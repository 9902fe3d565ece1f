"""Cutting-plane model primitives and the accelerated momentum sequence.

A cut is one linearization of the objective collected from the oracle; the
bundle is the ordered collection of cuts whose pointwise max is a
piecewise-linear lower approximation of the objective.  The momentum
sequence provides the extrapolation coefficients used to move the
stability center.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Relative slack tolerated before a negative linearization error is treated
# as a broken oracle/model pair rather than round-off.
NEG_ERROR_RTOL = 1e-9


class ModelError(Exception):
    """Raised on dimension mismatches, empty bundles or broken invariants."""


@dataclass(frozen=True)
class Cut:
    """One linearization: anchor point, function value and subgradient."""

    point: np.ndarray
    value: float
    subgradient: np.ndarray

    def __post_init__(self):
        point = np.atleast_1d(np.asarray(self.point, dtype=float))
        sub = np.atleast_1d(np.asarray(self.subgradient, dtype=float))
        if point.shape != sub.shape:
            raise ModelError(
                f"subgradient shape {sub.shape} != point shape {point.shape}"
            )
        if not (np.all(np.isfinite(point)) and np.all(np.isfinite(sub))
                and math.isfinite(self.value)):
            raise ModelError("cut entries must be finite")
        point.setflags(write=False)
        sub.setflags(write=False)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "subgradient", sub)
        object.__setattr__(self, "value", float(self.value))

    @property
    def dimension(self) -> int:
        return self.point.shape[0]


def cut_value(cut: Cut, x: np.ndarray) -> float:
    """Evaluate the affine minorant of `cut` at `x`."""
    x = np.asarray(x, dtype=float)
    if x.shape != cut.point.shape:
        raise ModelError(f"point shape {x.shape} != cut dimension {cut.point.shape}")
    return cut.value + float(cut.subgradient @ (x - cut.point))


class Bundle:
    """Ordered, append-only collection of cuts of a common dimension.

    Exact duplicates (identical anchor and subgradient) are rejected so the
    subproblem duals stay nondegenerate.  The stacked data arrays and the
    Gram matrix of the subgradients are cached incrementally because the
    quadratic subproblems query them at every step.
    """

    def __init__(self, dimension: int, max_size: int | None = None):
        if dimension < 1:
            raise ModelError("dimension must be positive")
        self.dimension = int(dimension)
        self.max_size = max_size
        self.cuts: list[Cut] = []
        self._G = np.empty((0, dimension))       # rows: subgradients
        self._P = np.empty((0, dimension))       # rows: anchor points
        self._vals = np.empty(0)
        self._gram = np.empty((0, 0))

    def __len__(self) -> int:
        return len(self.cuts)

    def add(self, cut: Cut) -> bool:
        """Append a cut; returns False if it duplicates an existing one."""
        if cut.dimension != self.dimension:
            raise ModelError("cut dimension does not match bundle")
        for other in self.cuts:
            if (np.array_equal(other.point, cut.point)
                    and np.array_equal(other.subgradient, cut.subgradient)):
                return False
        if self.max_size is not None and len(self.cuts) >= self.max_size:
            # drop the oldest cut; only reachable when a size cap is set
            self.cuts.pop(0)
            self._G = self._G[1:]
            self._P = self._P[1:]
            self._vals = self._vals[1:]
            self._gram = self._gram[1:, 1:]
        self.cuts.append(cut)
        g = cut.subgradient[None, :]
        cross = self._G @ cut.subgradient
        m = len(self._vals)
        gram = np.empty((m + 1, m + 1))
        gram[:m, :m] = self._gram
        gram[:m, m] = cross
        gram[m, :m] = cross
        gram[m, m] = cut.subgradient @ cut.subgradient
        self._gram = gram
        self._G = np.vstack([self._G, g])
        self._P = np.vstack([self._P, cut.point[None, :]])
        self._vals = np.append(self._vals, cut.value)
        return True

    @property
    def subgradients(self) -> np.ndarray:
        """(m, n) array, one subgradient per row."""
        return self._G

    @property
    def values(self) -> np.ndarray:
        return self._vals

    @property
    def points(self) -> np.ndarray:
        return self._P

    def gram(self) -> np.ndarray:
        """Gram matrix G G^T of the subgradients, (m, m)."""
        return self._gram

    def values_at(self, x: np.ndarray) -> np.ndarray:
        """All cut values at `x` as a vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ModelError("dimension mismatch in bundle evaluation")
        return self._vals + (self._G * (x[None, :] - self._P)).sum(axis=1)


def model_eval(bundle: Bundle, x: np.ndarray) -> tuple[float, int]:
    """Max of all cuts at `x` and the lowest index attaining it."""
    if len(bundle) == 0:
        raise ModelError("model evaluation on an empty bundle")
    vals = bundle.values_at(x)
    idx = int(np.argmax(vals))   # argmax returns the first maximizer
    return float(vals[idx]), idx


def evaluation_noise(bundle: Bundle, x: np.ndarray) -> float:
    """Round-off bound for values_at(x) from the cut arithmetic.

    Each cut value is v + g'(x - p); when the two terms are large and
    cancel, the absolute error grows with their magnitudes even though
    the result is small, so a guard comparing model and oracle values
    must widen with this bound.
    """
    x = np.asarray(x, dtype=float)
    mags = np.abs(bundle.values) \
        + (np.abs(bundle.subgradients)
           * np.abs(x[None, :] - bundle.points)).sum(axis=1)
    eps = float(np.finfo(float).eps)
    return 16.0 * bundle.dimension * eps * float(mags.max(initial=0.0))


def linearization_error(f_at_y: float, model_at_y: float,
                        noise: float = 0.0) -> float:
    """Oracle-minus-model gap at a fresh iterate, clamped at zero.

    Tiny negatives (round-off below the lower model, within `noise` plus
    the relative floor) are clamped; a negative beyond that means the
    model is not a lower model and aborts the run.
    """
    if not (math.isfinite(f_at_y) and math.isfinite(model_at_y)):
        raise ModelError("non-finite values in linearization error")
    eps = f_at_y - model_at_y
    if eps < 0.0:
        if eps < -(NEG_ERROR_RTOL * (1.0 + abs(f_at_y)) + noise):
            raise ModelError(
                f"model exceeds oracle value by {-eps:g}: lower-model property violated"
            )
        return 0.0
    return eps


class BetaMode(enum.Enum):
    """Second momentum term: absent, or the lambda-ratio variant."""
    ZERO = "zero"
    GULER = "guler"


def _lambda_next(lam: float) -> float:
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * lam * lam))


@dataclass(frozen=True)
class NesterovState:
    """Momentum coefficients at step k.

    lambda_k follows lambda_{k+1} = (1 + sqrt(1 + 4 lambda_k^2)) / 2 from
    lambda_0 = 1; alpha_k = (lambda_k - 1) / lambda_{k+1} and, in the
    two-term mode, beta_k = lambda_k / lambda_{k+1}.
    """

    k: int = 0
    lambda_k: float = 1.0
    lambda_next: float = field(default_factory=lambda: _lambda_next(1.0))
    beta_mode: BetaMode = BetaMode.ZERO

    @property
    def alpha_k(self) -> float:
        return (self.lambda_k - 1.0) / self.lambda_next

    @property
    def beta_k(self) -> float:
        if self.beta_mode is BetaMode.GULER:
            return self.lambda_k / self.lambda_next
        return 0.0


def nesterov_advance(state: NesterovState) -> NesterovState:
    """State at step k+1 with the lambda recurrence applied."""
    lam = state.lambda_next
    return NesterovState(
        k=state.k + 1,
        lambda_k=lam,
        lambda_next=_lambda_next(lam),
        beta_mode=state.beta_mode,
    )
