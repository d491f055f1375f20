"""Loading tabular regression data and abstracting its uncertainty.

An uncertain training set is decomposed as ``X = X_R + X_S`` and
``y = y_R + y_S``: real centers plus purely symbolic parts in which every
uncertain cell owns exactly one data symbol with a zero constant part.  The
concretization of the decomposition ranges over exactly the declared
per-cell intervals.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import product as iter_product
from collections.abc import Mapping, Sequence

import numpy as np

from .errors import DataError, EmptyDataError, SplitBudgetError
from .forms import PolyForm
from .symbols import SymbolKind, SymbolRegistry
from .zonotope import ZMatrix, ZVector

BIAS_COLUMN = "bias"
#: Marker used in provenance tuples for label cells (features use the column index).
LABEL_COL = -1
_MISSING_MARKERS = {"", "?"}


@dataclass
class Dataset:
    """Concrete tabular data: features with a constant-one bias column, labels."""

    X: np.ndarray
    y: np.ndarray
    columns: list[str]
    label_name: str = "label"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.y.ndim != 1:
            raise DataError("X must be 2-d and y 1-d")
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("X and y row counts differ")
        if self.X.shape[0] < 1 or self.X.shape[1] < 1:
            raise EmptyDataError("dataset must have at least one row and one column")
        if len(self.columns) != self.X.shape[1]:
            raise DataError("column names must match feature count")
        bias = self.X[:, 0]
        if self.columns[0] != BIAS_COLUMN or not np.all(bias[~np.isnan(bias)] == 1.0):
            raise DataError("first column must be the constant-one bias column")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def has_missing(self) -> bool:
        return bool(np.isnan(self.X).any() or np.isnan(self.y).any())


@dataclass(frozen=True)
class DomainRange:
    """Observed per-column value ranges; the bias column is excluded."""

    feature_ranges: dict[str, tuple[float, float]]
    label_range: tuple[float, float]

    def feature_width(self, name: str) -> float:
        lo, hi = self.feature_ranges[name]
        return hi - lo

    def label_width(self) -> float:
        lo, hi = self.label_range
        return hi - lo


@dataclass(frozen=True)
class UncertaintySpec:
    """How to inject uncertainty into a concrete dataset.

    ``radius`` is the full width of an uncertain cell's interval as a
    fraction of the column's domain range; the interval is centered on the
    observed value.  ``target`` selects labels, features or both; for
    features, ``columns`` restricts which ones (default: all non-bias).
    """

    target: str  # "labels" | "features" | "both"
    percentage: float
    radius: float
    seed: int
    columns: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.target not in ("labels", "features", "both"):
            raise DataError(f"unknown uncertainty target {self.target!r}")
        if not 0.0 <= self.percentage <= 1.0:
            raise DataError("percentage must be in [0, 1]")
        if self.radius < 0.0:
            raise DataError("radius must be >= 0")
        if self.columns is not None and BIAS_COLUMN in self.columns:
            raise DataError("the bias column cannot be uncertain")


@dataclass
class AbstractDataset:
    """Decomposed uncertain training set over a shared symbol registry.

    ``provenance`` maps each data symbol to the unique cell it perturbs:
    ``(row, col)`` with ``col == LABEL_COL`` for label cells.
    """

    X_R: np.ndarray
    y_R: np.ndarray
    registry: SymbolRegistry
    provenance: dict[int, tuple[int, int]]
    coefficients: dict[int, float] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    label_name: str = "label"

    def __post_init__(self):
        self.X_R = np.asarray(self.X_R, dtype=float)
        self.y_R = np.asarray(self.y_R, dtype=float)

    @property
    def n(self) -> int:
        return self.X_R.shape[0]

    @property
    def d(self) -> int:
        return self.X_R.shape[1]

    def data_symbols(self) -> list[int]:
        return sorted(self.provenance)

    def feature_symbols(self) -> list[int]:
        return sorted(s for s, (_, c) in self.provenance.items() if c != LABEL_COL)

    def label_symbols(self) -> list[int]:
        return sorted(s for s, (_, c) in self.provenance.items() if c == LABEL_COL)

    def has_feature_uncertainty(self) -> bool:
        return any(
            abs(self.coefficients.get(s, 0.0)) > 0.0 for s in self.feature_symbols()
        )

    def x_symbolic(self) -> ZMatrix:
        """X_S as a zero-centered matrix of affine forms."""
        n, d = self.X_R.shape
        rows = [[PolyForm(self.registry, 0.0) for _ in range(d)] for _ in range(n)]
        for sid, (r, c) in self.provenance.items():
            if c == LABEL_COL:
                continue
            coef = self.coefficients.get(sid, 0.0)
            rows[r][c] = PolyForm(self.registry, 0.0, {(sid,): coef})
        return ZMatrix(self.registry, rows)

    def y_symbolic(self) -> ZVector:
        """y_S as a zero-centered vector of affine forms."""
        entries = [PolyForm(self.registry, 0.0) for _ in range(self.n)]
        for sid, (r, c) in self.provenance.items():
            if c != LABEL_COL:
                continue
            coef = self.coefficients.get(sid, 0.0)
            entries[r] = PolyForm(self.registry, 0.0, {(sid,): coef})
        return ZVector(self.registry, entries)

    def cell_interval(self, sid: int) -> tuple[float, float]:
        r, c = self.provenance[sid]
        center = self.y_R[r] if c == LABEL_COL else self.X_R[r, c]
        coef = abs(self.coefficients.get(sid, 0.0))
        return (center - coef, center + coef)

    def materialize(self, assignment: Mapping[int, float]) -> tuple[np.ndarray, np.ndarray]:
        """One possible world: plug a symbol assignment into the decomposition."""
        X = self.X_R.copy()
        y = self.y_R.copy()
        for sid, (r, c) in self.provenance.items():
            delta = self.coefficients.get(sid, 0.0) * assignment[sid]
            if c == LABEL_COL:
                y[r] += delta
            else:
                X[r, c] += delta
        return X, y

    def split_symbols(self) -> list[int]:
        """Data symbols worth splitting: those with a nonzero coefficient."""
        return [s for s in self.data_symbols() if self.coefficients.get(s, 0.0) != 0.0]

    def split(self, m: int, budget: int = 65536) -> list["AbstractDataset"]:
        """Partition evenly into ``m`` parts per data symbol (``m**s`` parts).

        Each part keeps the same symbols with coefficients scaled by ``1/m``
        and centers shifted to one sub-cell; the union of the parts'
        concretizations equals this dataset's.  Zero-coefficient symbols are
        excluded from ``s``: splitting them would only clone parts.
        """
        if m < 1:
            raise ValueError("m must be >= 1")
        syms = self.split_symbols()
        if m == 1 or not syms:
            return [self]
        n_parts = m ** len(syms)
        if n_parts > budget:
            raise SplitBudgetError(f"{n_parts} parts exceed budget {budget}")
        shifts = [(2 * j + 1 - m) / m for j in range(m)]
        parts = []
        for combo in iter_product(range(m), repeat=len(syms)):
            X = self.X_R.copy()
            y = self.y_R.copy()
            coefs = dict(self.coefficients)
            for sid, j in zip(syms, combo):
                r, c = self.provenance[sid]
                coef = self.coefficients.get(sid, 0.0)
                if c == LABEL_COL:
                    y[r] += coef * shifts[j]
                else:
                    X[r, c] += coef * shifts[j]
                coefs[sid] = coef / m
            parts.append(
                AbstractDataset(
                    X_R=X,
                    y_R=y,
                    registry=self.registry,
                    provenance=dict(self.provenance),
                    coefficients=coefs,
                    columns=list(self.columns),
                    label_name=self.label_name,
                )
            )
        return parts


def load_csv(
    path: str,
    label_column: str,
    feature_columns: Sequence[str] | None = None,
) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    A constant-one bias column is prepended.  Empty fields and ``?`` mark
    missing values (stored as NaN); any other non-numeric cell is an error.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header {header}")
        if feature_columns is None:
            feature_columns = [h for h in header if h != label_column]
        missing_cols = [c for c in feature_columns if c not in header]
        if missing_cols:
            raise DataError(f"feature columns not in header: {missing_cols}")
        feat_idx = [header.index(c) for c in feature_columns]
        label_idx = header.index(label_column)

        def parse(cell: str, row_no: int, col: str) -> float:
            cell = cell.strip()
            if cell in _MISSING_MARKERS:
                return math.nan
            try:
                return float(cell)
            except ValueError:
                raise DataError(
                    f"non-numeric value {cell!r} at row {row_no}, column {col!r}"
                ) from None

        X_rows, y_vals = [], []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"row {row_no} has {len(row)} fields, expected {len(header)}")
            X_rows.append([1.0] + [parse(row[i], row_no, header[i]) for i in feat_idx])
            y_vals.append(parse(row[label_idx], row_no, label_column))
    if not X_rows:
        raise EmptyDataError(f"{path} has a header but no data rows")
    return Dataset(
        X=np.array(X_rows),
        y=np.array(y_vals),
        columns=[BIAS_COLUMN] + list(feature_columns),
        label_name=label_column,
    )


@dataclass(frozen=True)
class FeatureScaler:
    """Column-wise standardization of the non-bias features.

    Fit on training data, applied to train and test alike.  Labels are left
    in their original units so thresholds and loss values keep their
    meaning.  Constant columns are left unscaled.  Standardizing before
    abstraction preserves relative uncertainty (interval widths scale with
    their columns) and keeps the feasibility threshold of the learner in
    its intended regime on raw-scale data.
    """

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, d: Dataset) -> "FeatureScaler":
        cols = d.X[:, 1:]
        mean = np.nanmean(cols, axis=0)
        scale = np.nanstd(cols, axis=0)
        scale = np.where(scale == 0.0, 1.0, scale)
        return cls(mean=mean, scale=scale)

    def transform(self, d: Dataset) -> Dataset:
        X = d.X.copy()
        X[:, 1:] = (X[:, 1:] - self.mean) / self.scale
        return Dataset(X=X, y=d.y.copy(), columns=list(d.columns), label_name=d.label_name)


def train_test_split(d: Dataset, ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then the first ``floor(ratio * n)`` rows train."""
    if not 0.0 < ratio < 1.0:
        raise DataError("ratio must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(d.n)
    n_train = int(math.floor(ratio * d.n))
    if n_train == 0 or n_train == d.n:
        raise DataError(f"split ratio {ratio} leaves an empty side for n={d.n}")
    tr, te = perm[:n_train], perm[n_train:]
    mk = lambda idx: Dataset(d.X[idx].copy(), d.y[idx].copy(), list(d.columns), d.label_name)
    return mk(tr), mk(te)


def domain_ranges(d: Dataset) -> DomainRange:
    """Observed min/max per column, ignoring missing cells; bias excluded."""
    feat = {}
    for j, name in enumerate(d.columns):
        if name == BIAS_COLUMN:
            continue
        col = d.X[:, j]
        col = col[~np.isnan(col)]
        if col.size == 0:
            feat[name] = (0.0, 0.0)
        else:
            feat[name] = (float(col.min()), float(col.max()))
    ylab = d.y[~np.isnan(d.y)]
    label = (float(ylab.min()), float(ylab.max())) if ylab.size else (0.0, 0.0)
    return DomainRange(feature_ranges=feat, label_range=label)


def inject_uncertainty(
    d: Dataset,
    spec: UncertaintySpec,
    registry: SymbolRegistry | None = None,
) -> AbstractDataset:
    """Attach symmetric interval uncertainty to a seeded choice of rows.

    ``ceil(percentage * n)`` rows are drawn without replacement; each
    targeted cell keeps its observed center and gains one data symbol with
    coefficient ``radius * domain_range / 2``, so the cell interval width is
    ``radius * domain_range``.  Feature and label targets share the same row
    choice when both are requested.
    """
    if d.has_missing():
        raise DataError("inject_uncertainty requires fully observed data; use abstract_missing")
    reg = registry or SymbolRegistry()
    ranges = domain_ranges(d)
    rng = np.random.default_rng(spec.seed)
    n_unc = math.ceil(spec.percentage * d.n)
    rows = np.sort(rng.choice(d.n, size=n_unc, replace=False)) if n_unc else np.array([], dtype=int)

    feature_cols: list[int] = []
    if spec.target in ("features", "both"):
        names = spec.columns if spec.columns is not None else [
            c for c in d.columns if c != BIAS_COLUMN
        ]
        feature_cols = [d.columns.index(c) for c in names]

    provenance: dict[int, tuple[int, int]] = {}
    coefficients: dict[int, float] = {}
    for r in rows:
        for c in feature_cols:
            sid = reg.new_symbol(SymbolKind.DATA)
            provenance[sid] = (int(r), int(c))
            coefficients[sid] = spec.radius * ranges.feature_width(d.columns[c]) / 2.0
        if spec.target in ("labels", "both"):
            sid = reg.new_symbol(SymbolKind.DATA)
            provenance[sid] = (int(r), LABEL_COL)
            coefficients[sid] = spec.radius * ranges.label_width() / 2.0
    return AbstractDataset(
        X_R=d.X.copy(),
        y_R=d.y.copy(),
        registry=reg,
        provenance=provenance,
        coefficients=coefficients,
        columns=list(d.columns),
        label_name=d.label_name,
    )


def abstract_missing(
    d: Dataset,
    ranges: Mapping[str, tuple[float, float]],
    registry: SymbolRegistry | None = None,
) -> AbstractDataset:
    """Represent each missing cell as the declared interval for its column.

    A missing cell in column with range ``[l, u]`` becomes center
    ``l + (u - l)/2`` with one data symbol of coefficient ``(u - l)/2``.
    Supplying imputer-output ranges ``[min(a_i), max(a_i)]`` narrows the
    interval to the span of the estimates.
    """
    reg = registry or SymbolRegistry()
    X = d.X.copy()
    y = d.y.copy()
    provenance: dict[int, tuple[int, int]] = {}
    coefficients: dict[int, float] = {}

    def declared(name: str) -> tuple[float, float]:
        if name not in ranges:
            raise DataError(f"missing cell in column {name!r} but no declared range")
        lo, hi = ranges[name]
        if hi < lo:
            raise DataError(f"invalid range for {name!r}: [{lo}, {hi}]")
        return lo, hi

    for r in range(d.n):
        for c in range(d.d):
            if math.isnan(X[r, c]):
                lo, hi = declared(d.columns[c])
                sid = reg.new_symbol(SymbolKind.DATA)
                X[r, c] = lo + (hi - lo) / 2.0
                provenance[sid] = (r, c)
                coefficients[sid] = (hi - lo) / 2.0
        if math.isnan(y[r]):
            lo, hi = declared(d.label_name)
            sid = reg.new_symbol(SymbolKind.DATA)
            y[r] = lo + (hi - lo) / 2.0
            provenance[sid] = (r, LABEL_COL)
            coefficients[sid] = (hi - lo) / 2.0
    return AbstractDataset(
        X_R=X,
        y_R=y,
        registry=reg,
        provenance=provenance,
        coefficients=coefficients,
        columns=list(d.columns),
        label_name=d.label_name,
    )
