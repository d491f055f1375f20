"""Ground-truth oracles and the interval-arithmetic baseline.

World enumeration and sampling train one concrete ridge model per symbol
assignment and record the observed extremes.  These are under-approximations
of the true possible-model set (weights are rational, not affine, in the
symbols once features are uncertain, so corners need not be extremal); the
abstract learner must cover everything they produce.

The interval baseline supports label uncertainty only and deliberately
propagates per-dimension weight intervals with interval arithmetic,
discarding the correlation between dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product
from typing import Iterator, Literal, Sequence

import numpy as np

from .dataset import AbstractDataset
from .errors import BudgetExceededError, DataError

Strategy = Literal["corner", "grid", "uniform"]


def ridge_concrete(X: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Exact ridge solution ``(X'X + lam*n*I)^-1 X'y`` on concrete data.

    For ``lam == 0`` the feature matrix must have full column rank.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    gram = X.T @ X + lam * n * np.eye(d)
    if lam == 0.0 and np.linalg.cond(gram) > 1e13:
        raise np.linalg.LinAlgError("X'X is singular at lambda = 0; need full column rank")
    return np.linalg.solve(gram, X.T @ y)


def concrete_loss(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, lam: float, formula: str = "ridge"
) -> float:
    """Mean squared error, plus ``lam * w'w`` for the ridge formula."""
    resid = X @ w - y
    mse = float(resid @ resid) / X.shape[0]
    if formula == "ridge":
        return mse + lam * float(w @ w)
    if formula == "mse":
        return mse
    raise ValueError(f"unknown loss formula {formula!r}")


@dataclass(frozen=True)
class WorldAssignment:
    """One point of the symbol cube: value in [-1, 1] per data symbol."""

    values: dict[int, float]
    strategy: str

    def __post_init__(self):
        for v in self.values.values():
            if not -1.0 <= v <= 1.0:
                raise ValueError("assignments must lie in [-1, 1]")


def enumerate_worlds(
    ad: AbstractDataset,
    strategy: Strategy = "corner",
    levels: int = 3,
    budget: int = 65536,
) -> Iterator[tuple[WorldAssignment, np.ndarray, np.ndarray]]:
    """Materialize every corner (or grid point) of the uncertainty cube."""
    syms = ad.data_symbols()
    if strategy == "corner":
        points: Sequence[float] = (-1.0, 1.0)
    elif strategy == "grid":
        points = tuple(np.linspace(-1.0, 1.0, levels))
    else:
        raise ValueError(f"enumerate_worlds does not support strategy {strategy!r}")
    count = len(points) ** len(syms)
    if count > budget:
        raise BudgetExceededError(f"{count} worlds exceed budget {budget}")
    if not syms:
        yield WorldAssignment({}, strategy), ad.X_R.copy(), ad.y_R.copy()
        return
    for combo in iter_product(points, repeat=len(syms)):
        e = dict(zip(syms, (float(v) for v in combo)))
        X, y = ad.materialize(e)
        yield WorldAssignment(e, strategy), X, y


def sample_worlds(
    ad: AbstractDataset, count: int, seed: int
) -> list[tuple[WorldAssignment, np.ndarray, np.ndarray]]:
    """Seeded uniform samples from the uncertainty cube."""
    syms = ad.data_symbols()
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        e = {s: float(rng.uniform(-1.0, 1.0)) for s in syms}
        X, y = ad.materialize(e)
        out.append((WorldAssignment(e, "uniform"), X, y))
    return out


@dataclass
class WorldOracleResult:
    """Extremes observed over a set of concrete worlds (an under-approximation)."""

    weights: list[np.ndarray]
    weight_lo: np.ndarray
    weight_hi: np.ndarray
    pred_lo: np.ndarray
    pred_hi: np.ndarray
    loss_lo: float
    loss_hi: float
    n_worlds: int
    strategy: str


def oracle_ranges(
    ad: AbstractDataset,
    lam: float,
    test_X: np.ndarray,
    test_y: np.ndarray,
    strategy: Strategy = "corner",
    levels: int = 3,
    budget: int = 65536,
    samples: int = 0,
    seed: int = 0,
    formula: str = "ridge",
) -> WorldOracleResult:
    """Train one ridge model per world; record weight/prediction/loss extremes."""
    test_X = np.asarray(test_X, dtype=float)
    test_y = np.asarray(test_y, dtype=float)
    if strategy == "uniform":
        worlds = iter(sample_worlds(ad, samples, seed))
    else:
        worlds = enumerate_worlds(ad, strategy, levels=levels, budget=budget)
    weights = []
    pred_lo = pred_hi = None
    loss_lo, loss_hi = np.inf, -np.inf
    count = 0
    for _, X, y in worlds:
        w = ridge_concrete(X, y, lam)
        weights.append(w)
        preds = test_X @ w
        pred_lo = preds if pred_lo is None else np.minimum(pred_lo, preds)
        pred_hi = preds if pred_hi is None else np.maximum(pred_hi, preds)
        loss = concrete_loss(test_X, test_y, w, lam, formula)
        loss_lo, loss_hi = min(loss_lo, loss), max(loss_hi, loss)
        count += 1
    if count == 0:
        raise DataError("oracle saw no worlds")
    stack = np.vstack(weights)
    return WorldOracleResult(
        weights=weights,
        weight_lo=stack.min(axis=0),
        weight_hi=stack.max(axis=0),
        pred_lo=pred_lo,
        pred_hi=pred_hi,
        loss_lo=loss_lo,
        loss_hi=loss_hi,
        n_worlds=count,
        strategy=strategy,
    )


@dataclass
class IntervalRidgeResult:
    """Per-dimension weight intervals from the label-interval baseline."""

    weight_lo: np.ndarray
    weight_hi: np.ndarray

    def predict_interval(self, x: np.ndarray) -> tuple[float, float]:
        """Interval dot product of x with the weight intervals.

        Cross-dimension correlation is deliberately discarded; the result
        contains the true prediction range but is generally loose.
        """
        x = np.asarray(x, dtype=float)
        lo = np.where(x >= 0, x * self.weight_lo, x * self.weight_hi).sum()
        hi = np.where(x >= 0, x * self.weight_hi, x * self.weight_lo).sum()
        return float(lo), float(hi)


def interval_ridge_labels(
    X: np.ndarray, y_intervals: np.ndarray, lam: float
) -> IntervalRidgeResult:
    """Ridge with interval labels, propagated by interval arithmetic.

    ``y_intervals`` is (n, 2) with per-row [lo, hi].  The feature matrix must
    be certain.  Weight interval j sums the row intervals scaled by the
    entries of ``(X'X + lam*n*I)^-1 X'``.
    """
    X = np.asarray(X, dtype=float)
    y_intervals = np.asarray(y_intervals, dtype=float)
    n, d = X.shape
    if y_intervals.shape != (n, 2):
        raise DataError(f"y_intervals must be (n, 2), got {y_intervals.shape}")
    if np.any(y_intervals[:, 0] > y_intervals[:, 1]):
        raise DataError("label intervals must satisfy lo <= hi")
    gram = X.T @ X + lam * n * np.eye(d)
    if lam == 0.0 and np.linalg.cond(gram) > 1e13:
        raise np.linalg.LinAlgError("X'X is singular at lambda = 0; need full column rank")
    m = np.linalg.solve(gram, X.T)  # d x n
    lo = np.where(m >= 0, m * y_intervals[:, 0], m * y_intervals[:, 1]).sum(axis=1)
    hi = np.where(m >= 0, m * y_intervals[:, 1], m * y_intervals[:, 0]).sum(axis=1)
    return IntervalRidgeResult(weight_lo=lo, weight_hi=hi)
