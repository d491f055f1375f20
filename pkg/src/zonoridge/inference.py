"""Prediction ranges, robustness certificates, loss intervals, parameter bounds.

Everything here consumes the weight zonotope produced by learning.  A
prediction for a concrete point is an affine form, so its range is exact for
the zonotope; uncertain test points and losses produce higher-order forms
that are linearized before concretizing, which stays sound but can widen.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ShapeMismatchError
from .forms import PolyForm, sum_forms
from .learning import AbstractWeights
from .zonotope import ZVector, interval_of, linearize

Method = Literal["zonotope", "interval_baseline", "oracle_under"]


@dataclass(frozen=True)
class PredictionInterval:
    lo: float
    hi: float
    method: Method = "zonotope"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("prediction interval requires lo <= hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass
class RobustnessReport:
    """Per-point robustness at an absolute width threshold."""

    threshold: float
    per_point: list[tuple[PredictionInterval, bool]]
    ratio: float

    def to_csv_rows(self) -> list[dict]:
        return [
            {
                "point": i,
                "lo": interval.lo,
                "hi": interval.hi,
                "width": interval.width,
                "robust": int(robust),
            }
            for i, (interval, robust) in enumerate(self.per_point)
        ]


@dataclass(frozen=True)
class LossInterval:
    lo: float
    hi: float
    formula: str  # "ridge" | "mse"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("loss interval requires lo <= hi")


@dataclass
class ParameterIntervals:
    """Per-dimension bounds of the weight zonotope, with sign conclusiveness."""

    lo: np.ndarray
    hi: np.ndarray
    names: list[str]

    def inconclusive_direction(self, j: int) -> bool:
        """True when the interval straddles zero, so the sign is ambiguous."""
        return self.lo[j] < 0.0 < self.hi[j]

    def to_csv_rows(self) -> list[dict]:
        return [
            {
                "coefficient": self.names[j] if j < len(self.names) else f"w{j}",
                "lo": float(self.lo[j]),
                "hi": float(self.hi[j]),
                "inconclusive_direction": int(self.inconclusive_direction(j)),
            }
            for j in range(len(self.lo))
        ]


def predict_interval(x: np.ndarray, weights: AbstractWeights) -> PredictionInterval:
    """Viable prediction range for a concrete test point.

    The prediction ``x . w`` is affine in the symbols: the data part
    contributes ``sum_s |x . g_s|`` and the box part ``sum_i |x . a_i| k_i``
    where ``a_i`` are the columns of the inverse transform.  Exact for the
    weight zonotope.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (weights.dim,):
        raise ShapeMismatchError(f"test point must have dimension {weights.dim}")
    center = float(x @ weights.w_R)
    radius = 0.0
    for gen in weights.w_D_coeffs.values():
        radius += abs(float(x @ gen))
    for i in range(weights.dim):
        radius += abs(float(x @ weights.A_inv[:, i])) * weights.k[i]
    return PredictionInterval(center - radius, center + radius)


def predict_interval_uncertain(
    x_abstract: ZVector, weights: AbstractWeights
) -> PredictionInterval:
    """Prediction range for an uncertain test point.

    The product of the point's forms with the weight forms is a polynomial
    zonotope; it is linearized before taking the interval, so the result is
    a sound superset.  Sharing symbols with the training data expresses
    correlated uncertainty; fresh symbols express independence.
    """
    if len(x_abstract) != weights.dim:
        raise ShapeMismatchError(f"test point must have dimension {weights.dim}")
    w_vec = weights.as_zvector()
    prod = sum_forms(
        weights.registry, (x_abstract[j] * w_vec[j] for j in range(weights.dim))
    )
    linear = linearize(ZVector(weights.registry, [prod]))
    lo, hi = interval_of(linear[0])
    return PredictionInterval(lo, hi)


def certify_robustness(
    test_X: np.ndarray, weights: AbstractWeights, threshold: float
) -> RobustnessReport:
    """Fraction of test points whose prediction interval is narrower than
    the absolute ``threshold`` (full width; thresholds given as a fraction
    of the label range must be converted by the caller).
    """
    test_X = np.asarray(test_X, dtype=float)
    if test_X.ndim != 2 or test_X.shape[0] == 0:
        raise ShapeMismatchError("test set must be a nonempty 2-d array")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    per_point = []
    robust_count = 0
    for row in test_X:
        interval = predict_interval(row, weights)
        robust = interval.width < threshold
        robust_count += robust
        per_point.append((interval, robust))
    return RobustnessReport(
        threshold=threshold,
        per_point=per_point,
        ratio=robust_count / test_X.shape[0],
    )


def loss_interval(
    test_X: np.ndarray,
    test_y: np.ndarray,
    weights: AbstractWeights,
    lam: float,
    formula: str = "ridge",
) -> LossInterval:
    """Range of the test loss over the weight zonotope.

    Expands the quadratic loss as one polynomial form (degree <= 2 in the
    symbols), linearizes, and concretizes.  Aggregating symbolically before
    concretizing keeps the cross-point correlations that per-prediction
    interval arithmetic would lose, which tightens the upper end.  Both
    supported formulas are nonnegative combinations of squares of affine
    forms, so the lower end additionally uses each square's exact minimum
    (the squared distance of zero to the affine term's interval); the
    linearized lower bound alone would forget that squares cannot go
    negative.
    """
    test_X = np.asarray(test_X, dtype=float)
    test_y = np.asarray(test_y, dtype=float)
    if test_X.ndim != 2 or test_X.shape[1] != weights.dim:
        raise ShapeMismatchError(f"test set must be (n, {weights.dim})")
    if test_X.shape[0] != test_y.shape[0]:
        raise ShapeMismatchError("test X and y row counts differ")
    if formula not in ("ridge", "mse"):
        raise ValueError(f"unknown loss formula {formula!r}")
    reg = weights.registry
    w_vec = weights.as_zvector()
    n = test_X.shape[0]

    def square_min(f: PolyForm) -> float:
        lo, hi = interval_of(f)
        if lo <= 0.0 <= hi:
            return 0.0
        return min(lo * lo, hi * hi)

    pieces = []
    structural_lo = 0.0
    for i in range(n):
        pred = sum_forms(
            reg,
            (w_vec[j].scale(test_X[i, j]) for j in range(weights.dim) if test_X[i, j] != 0.0),
        )
        resid = pred - test_y[i]
        structural_lo += square_min(resid) / n
        pieces.append((resid * resid).scale(1.0 / n))
    if formula == "ridge" and lam > 0.0:
        for j in range(weights.dim):
            structural_lo += lam * square_min(w_vec[j])
            pieces.append((w_vec[j] * w_vec[j]).scale(lam))
    total = sum_forms(reg, pieces)
    linear = linearize(ZVector(reg, [total]))
    lo, hi = interval_of(linear[0])
    return LossInterval(lo=max(lo, structural_lo), hi=hi, formula=formula)


def parameter_intervals(
    weights: AbstractWeights, names: list[str] | None = None
) -> ParameterIntervals:
    """Componentwise bounds of the weight zonotope (exact per dimension)."""
    boxes = [interval_of(f) for f in weights.as_zvector()]
    lo = np.array([b[0] for b in boxes])
    hi = np.array([b[1] for b in boxes])
    return ParameterIntervals(lo=lo, hi=hi, names=names or [f"w{j}" for j in range(len(lo))])
