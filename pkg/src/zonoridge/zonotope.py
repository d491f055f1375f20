"""Vectors and matrices of polynomial forms, and the sound set operations.

A :class:`ZVector` over affine forms is a linear zonotope in symbolic form; a
vector or matrix over general :class:`~zonoridge.forms.PolyForm` entries is a
polynomial zonotope.  All entries of one object share a registry.

The operations here come in two families:

* exact transformers: addition, scalar and matrix multiplication --
  evaluation commutes with them;
* sound over-approximations: :func:`linearize`, :func:`interval_hull`,
  :func:`tih_reduce`, :func:`box_join` -- every point of the input's
  concretization lies in the output's concretization.

:func:`mu_split` partitions a zonotope along its data symbols; the union of
the parts' concretizations equals the input's.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from collections.abc import Mapping, Sequence

import numpy as np

from .errors import (
    DegreeError,
    IllConditionedError,
    RegistryMismatchError,
    ShapeMismatchError,
    SplitBudgetError,
)
from .forms import COEF_EPS, Monomial, PolyForm, sum_forms
from .symbols import SymbolKind, SymbolRegistry


@dataclass(frozen=True)
class IntervalBox:
    """Axis-aligned box: per-dimension [lo, hi] with lo <= hi."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape:
            raise ShapeMismatchError("lo/hi shape mismatch")
        if np.any(lo > hi + 1e-12):
            raise ValueError("interval box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        p = np.atleast_1d(np.asarray(point, dtype=float))
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))


class ZVector:
    """Dense vector of forms sharing one registry."""

    __slots__ = ("registry", "entries")

    def __init__(self, registry: SymbolRegistry, entries: Sequence[PolyForm]):
        for f in entries:
            if f.registry is not registry:
                raise RegistryMismatchError("entry from a different registry")
        self.registry = registry
        self.entries = list(entries)

    @classmethod
    def from_real(cls, registry: SymbolRegistry, values: Sequence[float]) -> "ZVector":
        return cls(registry, [PolyForm(registry, float(v)) for v in values])

    @classmethod
    def zeros(cls, registry: SymbolRegistry, dim: int) -> "ZVector":
        return cls.from_real(registry, [0.0] * dim)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> PolyForm:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __add__(self, other: "ZVector") -> "ZVector":
        if len(self) != len(other):
            raise ShapeMismatchError("vector length mismatch")
        return ZVector(self.registry, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "ZVector") -> "ZVector":
        if len(self) != len(other):
            raise ShapeMismatchError("vector length mismatch")
        return ZVector(self.registry, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, factor: float) -> "ZVector":
        return ZVector(self.registry, [f.scale(factor) for f in self.entries])

    def evaluate(self, assignment: Mapping[int, float]) -> np.ndarray:
        return np.array([f.evaluate(assignment) for f in self.entries])

    def is_affine(self) -> bool:
        return all(f.is_affine() for f in self.entries)

    def centers(self) -> np.ndarray:
        return np.array([f.center for f in self.entries])

    def symbols(self) -> set[int]:
        out: set[int] = set()
        for f in self.entries:
            out.update(f.symbols())
        return out

    def interval_box(self) -> IntervalBox:
        """Componentwise interval concretization (affine entries only)."""
        los, his = [], []
        for f in self.entries:
            lo, hi = interval_of(f)
            los.append(lo)
            his.append(hi)
        return IntervalBox(np.array(los), np.array(his))


class ZMatrix:
    """Dense matrix of forms sharing one registry."""

    __slots__ = ("registry", "rows")

    def __init__(self, registry: SymbolRegistry, rows: Sequence[Sequence[PolyForm]]):
        width = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != width:
                raise ShapeMismatchError("ragged matrix")
            for f in row:
                if f.registry is not registry:
                    raise RegistryMismatchError("entry from a different registry")
        self.registry = registry
        self.rows = [list(r) for r in rows]

    @classmethod
    def from_real(cls, registry: SymbolRegistry, values: np.ndarray) -> "ZMatrix":
        arr = np.asarray(values, dtype=float)
        return cls(
            registry,
            [[PolyForm(registry, v) for v in row] for row in arr],
        )

    @classmethod
    def zeros(cls, registry: SymbolRegistry, n: int, d: int) -> "ZMatrix":
        return cls.from_real(registry, np.zeros((n, d)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, idx: tuple[int, int]) -> PolyForm:
        return self.rows[idx[0]][idx[1]]

    def __add__(self, other: "ZMatrix") -> "ZMatrix":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shape mismatch {self.shape} vs {other.shape}")
        return ZMatrix(
            self.registry,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    def transpose(self) -> "ZMatrix":
        n, d = self.shape
        return ZMatrix(self.registry, [[self.rows[i][j] for i in range(n)] for j in range(d)])

    def evaluate(self, assignment: Mapping[int, float]) -> np.ndarray:
        return np.array([[f.evaluate(assignment) for f in row] for row in self.rows])

    def is_zero(self) -> bool:
        return all(f.is_constant() and f.center == 0.0 for row in self.rows for f in row)


def mat_mul(a: ZMatrix, b: ZMatrix) -> ZMatrix:
    """Exact matrix product via scalar form multiplication and addition."""
    if a.registry is not b.registry:
        raise RegistryMismatchError("operands belong to different registries")
    n, m = a.shape
    m2, k = b.shape
    if m != m2:
        raise ShapeMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    reg = a.registry
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            row.append(sum_forms(reg, (a.rows[i][t] * b.rows[t][j] for t in range(m))))
        out.append(row)
    return ZMatrix(reg, out)


def mat_vec(a: ZMatrix, v: ZVector) -> ZVector:
    """Exact matrix-vector product."""
    if a.registry is not v.registry:
        raise RegistryMismatchError("operands belong to different registries")
    n, m = a.shape
    if m != len(v):
        raise ShapeMismatchError(f"cannot multiply {a.shape} by vector of length {len(v)}")
    reg = a.registry
    return ZVector(
        reg,
        [sum_forms(reg, (a.rows[i][t] * v[t] for t in range(m))) for i in range(n)],
    )


def real_mat_vec(m: np.ndarray, v: ZVector) -> ZVector:
    """Apply a real matrix to a form vector (exact linear map)."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != len(v):
        raise ShapeMismatchError(f"cannot apply {arr.shape} to vector of length {len(v)}")
    reg = v.registry
    out = []
    for i in range(arr.shape[0]):
        out.append(sum_forms(reg, (v[j].scale(arr[i, j]) for j in range(len(v)) if arr[i, j] != 0.0)))
    return ZVector(reg, out)


def real_mat_mat(m: np.ndarray, z: ZMatrix) -> ZMatrix:
    arr = np.asarray(m, dtype=float)
    n, d = z.shape
    if arr.shape[1] != n:
        raise ShapeMismatchError(f"cannot apply {arr.shape} to matrix {z.shape}")
    reg = z.registry
    rows = []
    for i in range(arr.shape[0]):
        rows.append(
            [
                sum_forms(reg, (z.rows[t][j].scale(arr[i, t]) for t in range(n) if arr[i, t] != 0.0))
                for j in range(d)
            ]
        )
    return ZMatrix(reg, rows)


def mat_real(z: ZMatrix, m: np.ndarray) -> ZMatrix:
    arr = np.asarray(m, dtype=float)
    n, d = z.shape
    if arr.shape[0] != d:
        raise ShapeMismatchError(f"cannot apply matrix {z.shape} to {arr.shape}")
    reg = z.registry
    rows = []
    for i in range(n):
        rows.append(
            [
                sum_forms(reg, (z.rows[i][t].scale(arr[t, j]) for t in range(d) if arr[t, j] != 0.0))
                for j in range(arr.shape[1])
            ]
        )
    return ZMatrix(reg, rows)


def interval_of(f: PolyForm) -> tuple[float, float]:
    """Tight interval concretization of an affine form.

    Endpoints are attained at the sign-vector assignments, so this is exact
    for linear zonotopes.  Raises for higher-degree input.
    """
    if not f.is_affine():
        raise DegreeError("interval_of requires an affine form")
    radius = f.coeff_abs_sum()
    return (f.center - radius, f.center + radius)


def order(v: ZVector | ZMatrix) -> Fraction:
    """Distinct monomials across all entries, divided by the dimension."""
    if isinstance(v, ZMatrix):
        entries = [f for row in v.rows for f in row]
    else:
        entries = list(v.entries)
    monos: set[Monomial] = set()
    for f in entries:
        monos.update(f.terms)
    return Fraction(len(monos), len(entries))


def linearize(v: ZVector, registry: SymbolRegistry | None = None) -> ZVector:
    """Replace every degree->=2 monomial with a fresh error symbol.

    The same monomial appearing in several entries maps to the *same* fresh
    symbol, which preserves the generator-vector structure of the zonotope
    and keeps later interval hulls as tight as the replacement allows.
    Already-affine input is returned unchanged (no fresh symbols).
    """
    reg = registry or v.registry
    high: set[Monomial] = set()
    for f in v.entries:
        for mono in f.terms:
            if len(mono) >= 2:
                high.add(mono)
    if not high:
        return ZVector(reg, list(v.entries))
    ordered = sorted(high)
    fresh = {mono: reg.new_symbol(SymbolKind.FRESH) for mono in ordered}
    out = []
    for f in v.entries:
        terms: dict[Monomial, float] = {}
        for mono, coef in f.terms.items():
            key = mono if len(mono) == 1 else (fresh[mono],)
            terms[key] = terms.get(key, 0.0) + coef
        out.append(PolyForm(reg, f.center, terms))
    return ZVector(reg, out)


def interval_hull(v: ZVector, selected: set[int]) -> ZVector:
    """Merge the selected symbols of a linear zonotope into a box.

    Per dimension the merged generators collapse to one fresh symbol whose
    coefficient is the row-wise sum of absolute coefficients; retained
    symbols pass through unchanged.  Sound: the output's concretization
    contains the input's.
    """
    if not v.is_affine():
        raise DegreeError("interval_hull requires affine entries")
    if not selected:
        return ZVector(v.registry, list(v.entries))
    reg = v.registry
    fresh = reg.new_symbols(len(v), SymbolKind.FRESH)
    out = []
    for i, f in enumerate(v.entries):
        terms: dict[Monomial, float] = {}
        merged = 0.0
        for mono, coef in f.terms.items():
            if mono[0] in selected:
                merged += abs(coef)
            else:
                terms[mono] = coef
        if merged > COEF_EPS:
            terms[(fresh[i],)] = merged
        out.append(PolyForm(reg, f.center, terms))
    return ZVector(reg, out)


def tih_reduce(
    a: np.ndarray,
    v: ZVector,
    selected: set[int],
    cond_bound: float = 1e12,
) -> ZVector:
    """Interval hull in the space transformed by ``a``, mapped back by its inverse.

    The identity transform reduces to :func:`interval_hull`.  Matrices with
    condition number above ``cond_bound`` are rejected: the inverse map would
    amplify float error enough to endanger soundness margins.
    """
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] != len(v):
        raise ShapeMismatchError("transform must be square and match the vector dimension")
    cond = np.linalg.cond(arr)
    if not np.isfinite(cond) or cond > cond_bound:
        raise IllConditionedError(f"transform condition number {cond:.3e} exceeds {cond_bound:.1e}")
    a_inv = np.linalg.inv(arr)
    return real_mat_vec(a_inv, interval_hull(real_mat_vec(arr, v), selected))


def mu_split(v: ZVector, m: int, budget: int = 65536) -> list[ZVector]:
    """Partition a linear zonotope evenly into ``m`` parts per data symbol.

    Every data-symbol generator is scaled by ``1/m`` and the center shifted
    to one of the ``m`` sub-cells, composed across all data symbols, so the
    result has ``m**s`` parts whose concretizations union to the input's.
    Fresh symbols are left untouched.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not v.is_affine():
        raise DegreeError("mu_split requires affine entries")
    reg = v.registry
    data_syms = sorted(s for s in v.symbols() if reg.is_data(s))
    if m == 1 or not data_syms:
        return [ZVector(reg, list(v.entries))]
    n_parts = m ** len(data_syms)
    if n_parts > budget:
        raise SplitBudgetError(f"{n_parts} parts exceed budget {budget}")
    # Per-symbol center shift for sub-cell j of m: (2j + 1 - m) / m, generator
    # scaled by 1/m.
    shifts = [(2 * j + 1 - m) / m for j in range(m)]
    parts = []
    for combo in iter_product(range(m), repeat=len(data_syms)):
        assign = dict(zip(data_syms, combo))
        entries = []
        for f in v.entries:
            center = f.center
            terms: dict[Monomial, float] = {}
            for mono, coef in f.terms.items():
                sid = mono[0]
                if sid in assign:
                    center += coef * shifts[assign[sid]]
                    terms[mono] = coef / m
                else:
                    terms[mono] = coef
            entries.append(PolyForm(reg, center, terms))
        parts.append(ZVector(reg, entries))
    return parts


def box_join(parts: Sequence[ZVector]) -> ZVector:
    """Smallest axis-aligned box zonotope containing every part's box.

    Deliberately simple join: sound by construction (each part's interval is
    covered per dimension) at the cost of dropping cross-dimension shape.
    """
    if not parts:
        raise ValueError("box_join requires a nonempty list")
    dim = len(parts[0])
    reg = parts[0].registry
    for p in parts:
        if len(p) != dim:
            raise ShapeMismatchError("parts must share a dimension")
        if p.registry is not reg:
            raise RegistryMismatchError("parts belong to different registries")
    boxes = [p.interval_box() for p in parts]
    lo = np.min([b.lo for b in boxes], axis=0)
    hi = np.max([b.hi for b in boxes], axis=0)
    fresh = reg.new_symbols(dim, SymbolKind.FRESH)
    entries = []
    for i in range(dim):
        center = 0.5 * (lo[i] + hi[i])
        radius = 0.5 * (hi[i] - lo[i])
        terms = {(fresh[i],): radius} if radius > COEF_EPS else {}
        entries.append(PolyForm(reg, center, terms))
    return ZVector(reg, entries)
