"""Closed-form fixed point of abstract gradient descent for ridge regression.

The abstract weights decompose as ``w = w_R + w_D + w_ND``: a real center, an
affine part over the data symbols, and a box over fresh symbols mapped
through an invertible transform,

    w_ND = A^-1 diag(k) [eps'_1 ... eps'_d]^T,   k >= 0 componentwise.

``w_R`` is the concrete ridge solution on the centers; ``w_D`` solves its
fixed-point equation in closed form,

    w_D = (X_R'X_R + lam n I)^-1 (X_S'y_R + X_R'y_S - (X_R'X_S + X_S'X_R) w_R).

The diameters ``k`` are fixed by requiring that the transformed interval
hull of one gradient step reproduces the same box.  With

    q_ij   = entry (i,j) of  A X_R'X_R A^-1,
    c'_ij  = sum of |coefficients| of entry (i,j) of
             A (X_R'X_S + X_S'X_R + X_S'X_S) A^-1,
    h_i    = sum of |coefficients| of entry i of
             A ((X_R'X_S + X_S'X_R) w_D + X_S'X_S (w_R + w_D) - X_S'y_S),

a gradient step with learning rate eta small enough that
``1 - 2 eta lam - (2 eta / n) q_ii >= 0`` maps box diameters k to

    k'_i = (1 - 2 eta lam - (2 eta/n) q_ii) k_i
           + (2 eta/n) ( sum_{j!=i} |q_ij| k_j + sum_j c'_ij k_j + h_i ).

Setting ``k' = k`` and dividing by ``2 eta / n`` (eta cancels, so the
learning rate is not a model hyperparameter) gives the linear system solved
here:

    (lam n + q_ii - c'_ii) k_i - sum_{j!=i} (|q_ij| + c'_ij) k_j = h_i.

The constant column is stored as ``c0 = (2/n) h`` so the scalar case reads
``k = (n/2) c0 / (lam n + q - c')``.  The coefficient matrix is an M-matrix
(hence solvable with k >= 0) whenever ``lam >= beta`` where

    beta = (1/n) max_i ( sum_{j!=i} (|q_ij| + c'_ij) + c'_ii - q_ii ).

Below that threshold the dataset is mu-split until every part satisfies the
bound, per-part fixed points are computed, and the results are box-joined.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from collections.abc import Mapping

import numpy as np

from .dataset import AbstractDataset
from .errors import (
    IllConditionedError,
    LambdaTooSmall,
    ShapeMismatchError,
    SplitBudgetError,
    ZonoError,
)
from .forms import PolyForm
from .symbols import SymbolKind, SymbolRegistry
from .zonotope import (
    ZVector,
    box_join,
    interval_hull,
    linearize,
    mat_mul,
    mat_real,
    mat_vec,
    real_mat_mat,
    real_mat_vec,
)

_COND_BOUND = 1e12


@dataclass(frozen=True)
class RidgeConfig:
    """Learning configuration.

    ``transform`` selects the order-reduction space: ``"svd"`` diagonalizes
    the center covariance (the default), ``"identity"`` reduces to a plain
    interval hull, or a custom invertible matrix may be supplied.
    """

    lam: float = 0.0
    transform: str | np.ndarray = "svd"
    split_budget: int = 4096
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if isinstance(self.transform, str) and self.transform not in ("svd", "identity"):
            raise ValueError(f"unknown transform {self.transform!r}")


@dataclass
class AbstractWeights:
    """Weight zonotope ``w_R + w_D + A^-1 diag(k) eps'``.

    ``w_D_coeffs`` maps each data symbol to its generator vector; only
    nonzero generators are stored.  ``fresh_ids`` are the d fresh symbols
    carrying the box part.
    """

    w_R: np.ndarray
    w_D_coeffs: dict[int, np.ndarray]
    k: np.ndarray
    A: np.ndarray
    A_inv: np.ndarray
    fresh_ids: list[int]
    registry: SymbolRegistry
    lam: float
    provenance: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.w_R.shape[0]

    def w_D(self, assignment: Mapping[int, float]) -> np.ndarray:
        """Evaluate the data-symbol part at a concrete assignment."""
        out = np.zeros(self.dim)
        for sid, gen in self.w_D_coeffs.items():
            out += gen * assignment[sid]
        return out

    def as_zvector(self) -> ZVector:
        """The weight zonotope as a vector of affine forms."""
        entries = []
        for i in range(self.dim):
            terms = {}
            for sid, gen in self.w_D_coeffs.items():
                if gen[i] != 0.0:
                    terms[(sid,)] = gen[i]
            for j, fid in enumerate(self.fresh_ids):
                coef = self.A_inv[i, j] * self.k[j]
                if coef != 0.0:
                    terms[(fid,)] = terms.get((fid,), 0.0) + coef
            entries.append(PolyForm(self.registry, self.w_R[i], terms))
        return ZVector(self.registry, entries)

    def to_json(self, diagnostics: "FixedPointDiagnostics | None" = None) -> str:
        payload = {
            "w_R": self.w_R.tolist(),
            "w_D": [
                {
                    "symbol": sid,
                    "row": self.provenance.get(sid, (-1, -1))[0],
                    "col": self.provenance.get(sid, (-1, -1))[1],
                    "coeffs": self.w_D_coeffs[sid].tolist(),
                }
                for sid in sorted(self.w_D_coeffs)
            ],
            "k": self.k.tolist(),
            "A": self.A.tolist(),
            "A_inv": self.A_inv.tolist(),
            "fresh_ids": list(self.fresh_ids),
            "lam": self.lam,
        }
        if diagnostics is not None:
            payload["diagnostics"] = diagnostics.to_dict()
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AbstractWeights":
        data = json.loads(text)
        reg = SymbolRegistry()
        data_ids = {rec["symbol"] for rec in data["w_D"]}
        max_id = max(list(data_ids) + data["fresh_ids"], default=-1)
        # Rebuild the registry with the original ids.
        for sid in range(max_id + 1):
            reg.new_symbol(SymbolKind.DATA if sid in data_ids else SymbolKind.FRESH)
        return cls(
            w_R=np.array(data["w_R"]),
            w_D_coeffs={rec["symbol"]: np.array(rec["coeffs"]) for rec in data["w_D"]},
            k=np.array(data["k"]),
            A=np.array(data["A"]),
            A_inv=np.array(data["A_inv"]),
            fresh_ids=list(data["fresh_ids"]),
            registry=reg,
            lam=float(data["lam"]),
            provenance={rec["symbol"]: (rec["row"], rec["col"]) for rec in data["w_D"]},
        )


@dataclass
class NonDataSystem:
    """Assembled diameter system ``(lam n + q_ii - c'_ii) k_i - ... = (n/2) c0_i``."""

    Q: np.ndarray
    Cprime: np.ndarray
    c0: np.ndarray
    beta: float
    n: int

    def coefficient_matrix(self, lam: float) -> np.ndarray:
        d = self.Q.shape[0]
        m = -(np.abs(self.Q) + self.Cprime)
        for i in range(d):
            m[i, i] = lam * self.n + self.Q[i, i] - self.Cprime[i, i]
        return m

    def m_matrix_margin(self, lam: float) -> float:
        m = self.coefficient_matrix(lam)
        d = m.shape[0]
        off = np.abs(m).sum(axis=1) - np.abs(np.diag(m))
        return float(np.min(np.diag(m) - off))


@dataclass
class ResidualReport:
    """Self-consistency of one symbolic gradient step at the fixed point."""

    eta: float
    real_residual: float
    data_residual: float
    box_residual: float
    box_residual_normalized: float

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "real_residual": self.real_residual,
            "data_residual": self.data_residual,
            "box_residual": self.box_residual,
            "box_residual_normalized": self.box_residual_normalized,
        }


@dataclass
class FixedPointDiagnostics:
    beta: float
    lambda_used: float
    splits_used: int
    m_matrix_margin: float
    residual: ResidualReport | None = None
    join_lost_correlation: bool = False
    part_betas: list[float] | None = None

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "lambda_used": self.lambda_used,
            "splits_used": self.splits_used,
            "m_matrix_margin": self.m_matrix_margin,
            "residual": self.residual.to_dict() if self.residual else None,
            "join_lost_correlation": self.join_lost_correlation,
            "part_betas": self.part_betas,
        }


def ridge_closed_form_real(X_R: np.ndarray, y_R: np.ndarray, lam: float) -> np.ndarray:
    """Ridge solution on the real centers: ``(X_R'X_R + lam n I)^-1 X_R'y_R``."""
    X_R = np.asarray(X_R, dtype=float)
    y_R = np.asarray(y_R, dtype=float)
    n, d = X_R.shape
    gram = X_R.T @ X_R + lam * n * np.eye(d)
    if lam == 0.0 and np.linalg.cond(gram) > 1e13:
        raise np.linalg.LinAlgError("centers are rank-deficient at lambda = 0")
    return np.linalg.solve(gram, X_R.T @ y_R)


def closed_form_symbolic_data(
    ad: AbstractDataset, lam: float, w_R: np.ndarray
) -> dict[int, np.ndarray]:
    """Generator vectors of the data-symbol weight part.

    Solves ``(X_R'X_R + lam n I) w_D = X_S'y_R + X_R'y_S
    - (X_R'X_S + X_S'X_R) w_R`` one data symbol at a time: each symbol lives
    in exactly one cell, so its column of the right-hand side is assembled
    directly from that cell's row and coefficient.
    """
    X_R, y_R = ad.X_R, ad.y_R
    n, d = X_R.shape
    gram = X_R.T @ X_R + lam * n * np.eye(d)
    out: dict[int, np.ndarray] = {}
    for sid in ad.data_symbols():
        coef = ad.coefficients.get(sid, 0.0)
        if coef == 0.0:
            continue
        r, c = ad.provenance[sid]
        rhs = np.zeros(d)
        if c < 0:  # label cell
            rhs += coef * X_R[r, :]
        else:
            rhs[c] += coef * y_R[r]
            rhs -= coef * w_R[c] * X_R[r, :]
            rhs[c] -= coef * float(X_R[r, :] @ w_R)
        gen = np.linalg.solve(gram, rhs)
        if np.any(gen != 0.0):
            out[sid] = gen
    return out


def build_transform(X_R: np.ndarray, cfg: RidgeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Order-reduction transform and its inverse.

    The SVD choice diagonalizes ``X_R'X_R`` so the q-matrix of the diameter
    system is diagonal; identity leaves the original space.  Custom matrices
    are validated for conditioning before inverting.
    """
    d = X_R.shape[1]
    if isinstance(cfg.transform, str):
        if cfg.transform == "identity":
            return np.eye(d), np.eye(d)
        gram = X_R.T @ X_R
        _, _, vt = np.linalg.svd(gram)
        return vt, vt.T
    a = np.asarray(cfg.transform, dtype=float)
    if a.shape != (d, d):
        raise ShapeMismatchError(f"transform must be {d}x{d}, got {a.shape}")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > _COND_BOUND:
        raise IllConditionedError(f"custom transform condition number {cond:.3e}")
    return a, np.linalg.inv(a)


def _w_d_zvector(ad: AbstractDataset, w_D: dict[int, np.ndarray], d: int) -> ZVector:
    entries = []
    for i in range(d):
        terms = {(sid,): gen[i] for sid, gen in w_D.items() if gen[i] != 0.0}
        entries.append(PolyForm(ad.registry, 0.0, terms))
    return ZVector(ad.registry, entries)


def build_non_data_system(
    ad: AbstractDataset,
    lam: float,
    w_R: np.ndarray,
    w_D: dict[int, np.ndarray],
    A: np.ndarray,
    A_inv: np.ndarray,
) -> NonDataSystem:
    """Assemble the diameter system via exact polynomial-form algebra.

    The coefficient sums behind ``c'`` and ``c0`` are taken per distinct
    monomial after full expansion, so cancellations across the summands are
    honored; this matches what linearization followed by an interval hull
    produces and is never looser.
    """
    X_R = ad.X_R
    n, d = X_R.shape
    XS = ad.x_symbolic()
    yS = ad.y_symbolic()
    XSt = XS.transpose()

    Q = A @ (X_R.T @ X_R) @ A_inv

    cross = real_mat_mat(X_R.T, XS) + mat_real(XSt, X_R)  # X_R'X_S + X_S'X_R
    xss = mat_mul(XSt, XS)
    quad = cross + xss
    projected = mat_real(real_mat_mat(A, quad), A_inv)
    cprime = np.array(
        [[projected[i, j].coeff_abs_sum() for j in range(d)] for i in range(d)]
    )

    w_d_vec = _w_d_zvector(ad, w_D, d)
    w_r_vec = ZVector.from_real(ad.registry, w_R)
    const_part = (
        mat_vec(cross, w_d_vec)
        + mat_vec(xss, w_r_vec + w_d_vec)
        - mat_vec(XSt, yS)
    )
    h = np.array([f.coeff_abs_sum() for f in real_mat_vec(A, const_part)])
    c0 = (2.0 / n) * h

    off = np.abs(Q) + cprime
    np.fill_diagonal(off, 0.0)
    beta = float(np.max(off.sum(axis=1) + np.diag(cprime) - np.diag(Q)) / n)
    return NonDataSystem(Q=Q, Cprime=cprime, c0=c0, beta=beta, n=n)


def solve_non_data(sys: NonDataSystem, lam: float, tolerance: float = 1e-9) -> np.ndarray:
    """Solve the diameter system; requires ``lam >= beta`` up to tolerance.

    The homogeneous case (zero constant column, e.g. certain or label-only
    data) is solved exactly by ``k = 0`` whatever the matrix looks like, so
    it bypasses the feasibility threshold.  Otherwise M-matrix theory
    guarantees a nonnegative solution in the feasible regime; negative
    entries beyond a small clamp indicate numerical trouble and are
    rejected.
    """
    if np.all(sys.c0 == 0.0):
        return np.zeros(sys.Q.shape[0])
    if lam < sys.beta - tolerance:
        raise LambdaTooSmall(sys.beta)
    m = sys.coefficient_matrix(lam)
    rhs = (sys.n / 2.0) * sys.c0
    k = np.linalg.solve(m, rhs)
    resid = np.max(np.abs(m @ k - rhs)) if k.size else 0.0
    scale = 1.0 + float(np.max(np.abs(rhs), initial=0.0))
    if resid > 1e-8 * scale:
        raise ZonoError(f"diameter system residual {resid:.3e} too large")
    clamp = tolerance * (1.0 + float(np.max(np.abs(k), initial=0.0)))
    if np.any(k < -clamp):
        raise ZonoError(f"negative box diameter {k.min():.3e} beyond tolerance")
    return np.maximum(k, 0.0)


def determine_num_splits(
    sys: NonDataSystem, lam: float, ad: AbstractDataset
) -> int:
    """Smallest per-symbol split count predicted to bring beta under lam.

    Uses the bound ``beta(m) <= (d * c'_max / m - min_i q_ii) / n`` obtained
    from scaling the symbolic part by 1/m; the caller re-checks actual
    per-part betas after splitting, since centers shift per part.
    """
    if sys.beta <= lam:
        return 1
    cmax = float(np.max(sys.Cprime, initial=0.0))
    if cmax <= 0.0:
        return 1
    d = sys.Q.shape[0]
    min_q = float(np.min(np.diag(sys.Q)))
    denom = lam * sys.n + min_q
    if denom <= 0.0:
        raise LambdaTooSmall(sys.beta)
    return max(2, int(np.ceil(d * cmax / denom)))


def _prepare(
    ad: AbstractDataset, cfg: RidgeConfig
) -> tuple[np.ndarray, dict[int, np.ndarray], np.ndarray, np.ndarray, NonDataSystem]:
    w_R = ridge_closed_form_real(ad.X_R, ad.y_R, cfg.lam)
    w_D = closed_form_symbolic_data(ad, cfg.lam, w_R)
    A, A_inv = build_transform(ad.X_R, cfg)
    sys = build_non_data_system(ad, cfg.lam, w_R, w_D, A, A_inv)
    return w_R, w_D, A, A_inv, sys


def _assemble(
    ad: AbstractDataset,
    cfg: RidgeConfig,
    w_R: np.ndarray,
    w_D: dict[int, np.ndarray],
    A: np.ndarray,
    A_inv: np.ndarray,
    sys: NonDataSystem,
) -> AbstractWeights:
    k = solve_non_data(sys, cfg.lam, cfg.tolerance)
    fresh = ad.registry.new_symbols(ad.d, SymbolKind.FRESH)
    return AbstractWeights(
        w_R=w_R,
        w_D_coeffs=w_D,
        k=k,
        A=A,
        A_inv=A_inv,
        fresh_ids=fresh,
        registry=ad.registry,
        lam=cfg.lam,
        provenance={sid: ad.provenance[sid] for sid in w_D},
    )


def fixed_point(
    ad: AbstractDataset, cfg: RidgeConfig, verify: bool = True
) -> tuple[AbstractWeights, FixedPointDiagnostics]:
    """Compute the abstract fixed point, mu-splitting when beta exceeds lam.

    On the direct path the result shares data symbols with the dataset and
    carries the solved box diameters.  On the splitting path each part gets
    its own fixed point and the per-part weight zonotopes are box-joined;
    the join drops data-symbol correlation, which is flagged in the
    diagnostics.
    """
    w_R0, w_D0, A0, A0_inv, sys0 = _prepare(ad, cfg)
    try:
        weights = _assemble(ad, cfg, w_R0, w_D0, A0, A0_inv, sys0)
    except LambdaTooSmall:
        pass
    else:
        diag = FixedPointDiagnostics(
            beta=sys0.beta,
            lambda_used=cfg.lam,
            splits_used=1,
            m_matrix_margin=sys0.m_matrix_margin(cfg.lam),
            residual=verify_fixed_point_residual(ad, weights, cfg) if verify else None,
        )
        return weights, diag

    # Splitting path: grow m until every part is feasible (centers shift per
    # part, so the prediction must be re-checked).  An infeasible system has
    # a nonzero constant column, which requires at least one feature symbol
    # with a nonzero coefficient, so splitting makes progress.  Preparing
    # and solving a part is pure, so parts run in parallel; fresh symbols
    # are allocated afterwards in part order to keep ids deterministic.
    s = len(ad.split_symbols())
    m = determine_num_splits(sys0, cfg.lam, ad)
    while True:
        if m**s > cfg.split_budget:
            raise SplitBudgetError(
                f"{m}**{s} parts exceed split budget {cfg.split_budget}"
            )
        parts = ad.split(m, budget=cfg.split_budget)

        def solve_part(part):
            w_R, w_D, A, A_inv, part_sys = _prepare(part, cfg)
            k = solve_non_data(part_sys, cfg.lam, cfg.tolerance)
            return w_R, w_D, A, A_inv, part_sys, k

        try:
            if len(parts) > 8:
                with ThreadPoolExecutor(max_workers=4) as pool:
                    solved = list(pool.map(solve_part, parts))
            else:
                solved = [solve_part(p) for p in parts]
        except LambdaTooSmall:
            m += 1
            continue

        results = []
        part_betas = []
        margin = np.inf
        for part, (w_R, w_D, A, A_inv, part_sys, k) in zip(parts, solved):
            margin = min(margin, part_sys.m_matrix_margin(cfg.lam))
            part_betas.append(part_sys.beta)
            fresh = ad.registry.new_symbols(ad.d, SymbolKind.FRESH)
            results.append(
                AbstractWeights(
                    w_R=w_R,
                    w_D_coeffs=w_D,
                    k=k,
                    A=A,
                    A_inv=A_inv,
                    fresh_ids=fresh,
                    registry=ad.registry,
                    lam=cfg.lam,
                    provenance={sid: part.provenance[sid] for sid in w_D},
                )
            )
        break

    joined_vec = box_join([w.as_zvector() for w in results])
    d = ad.d
    w_R = joined_vec.centers()
    k = np.zeros(d)
    fresh_ids = []
    for i, f in enumerate(joined_vec.entries):
        coeffs = f.linear_coeffs()
        if coeffs:
            ((fid, coef),) = coeffs.items()
            fresh_ids.append(fid)
            k[i] = abs(coef)
        else:
            fresh_ids.append(ad.registry.new_symbol(SymbolKind.FRESH))
    weights = AbstractWeights(
        w_R=w_R,
        w_D_coeffs={},
        k=k,
        A=np.eye(d),
        A_inv=np.eye(d),
        fresh_ids=fresh_ids,
        registry=ad.registry,
        lam=cfg.lam,
        provenance={},
    )
    diag = FixedPointDiagnostics(
        beta=sys0.beta,
        lambda_used=cfg.lam,
        splits_used=len(parts),
        m_matrix_margin=float(margin),
        residual=None,
        join_lost_correlation=True,
        part_betas=part_betas,
    )
    return weights, diag


def verify_fixed_point_residual(
    ad: AbstractDataset, weights: AbstractWeights, cfg: RidgeConfig
) -> ResidualReport:
    """Apply one symbolic gradient step and measure how far it moves.

    Uses the exact form algebra end to end: the box part is rebuilt as
    affine forms, the high-order gradient component is expanded as
    polynomial forms, linearized with fresh symbols (regenerated per call),
    and the interval hull in the transformed space yields new box diameters
    ``k'``.  At a true fixed point the real and data-symbol parts are
    unchanged and ``k' = k``.  The normalized box residual divides out the
    ``2 eta / n`` step factor, making it comparable to the system's scale.
    """
    X_R, y_R = ad.X_R, ad.y_R
    n, d = X_R.shape
    lam = weights.lam
    reg = ad.registry
    gram = X_R.T @ X_R
    Q = weights.A @ gram @ weights.A_inv
    qmax = float(np.max(np.diag(Q), initial=0.0))
    denom = 2.0 * lam + (2.0 / n) * max(qmax, 0.0)
    eta = 0.5 / denom if denom > 0 else 0.1

    # Real part: one concrete gradient step.
    g_r = (2.0 / n) * (gram @ weights.w_R - X_R.T @ y_R) + 2.0 * lam * weights.w_R
    real_residual = float(np.max(np.abs(eta * g_r), initial=0.0))

    # Data-symbol part, symbolically.
    XS = ad.x_symbolic()
    yS = ad.y_symbolic()
    XSt = XS.transpose()
    w_d_vec = _w_d_zvector(ad, weights.w_D_coeffs, d)
    cross = real_mat_mat(X_R.T, XS) + mat_real(XSt, X_R)
    g_ld = (
        real_mat_vec(2.0 * lam * np.eye(d) + (2.0 / n) * gram, w_d_vec)
        + mat_vec(cross, ZVector.from_real(reg, weights.w_R)).scale(2.0 / n)
        - mat_vec(XSt, ZVector.from_real(reg, y_R)).scale(2.0 / n)
        - real_mat_vec((2.0 / n) * X_R.T, yS)
    )
    data_residual = 0.0
    for f in g_ld.entries:
        if abs(f.center) > data_residual:
            data_residual = abs(f.center)
        for coef in f.terms.values():
            data_residual = max(data_residual, abs(coef))
    data_residual *= eta

    # Box part: w_ND as affine forms over the stored fresh symbols.
    w_nd_entries = []
    for i in range(d):
        terms = {}
        for j, fid in enumerate(weights.fresh_ids):
            coef = weights.A_inv[i, j] * weights.k[j]
            if coef != 0.0:
                terms[(fid,)] = coef
        w_nd_entries.append(PolyForm(reg, 0.0, terms))
    w_nd = ZVector(reg, w_nd_entries)

    g_lnd = real_mat_vec(2.0 * lam * np.eye(d) + (2.0 / n) * gram, w_nd)
    xss = mat_mul(XSt, XS)
    w_total = ZVector.from_real(reg, weights.w_R) + w_d_vec + w_nd
    g_h = (
        mat_vec(cross, w_d_vec + w_nd)
        + mat_vec(xss, w_total)
        - mat_vec(XSt, yS)
    ).scale(2.0 / n)
    stepped = w_nd - (g_lnd + linearize(g_h)).scale(eta)
    projected = real_mat_vec(weights.A, stepped)
    hull = interval_hull(projected, projected.symbols())
    k_new = np.zeros(d)
    for i, f in enumerate(hull.entries):
        coeffs = f.linear_coeffs()
        k_new[i] = abs(next(iter(coeffs.values()))) if coeffs else 0.0
    box_residual = float(np.max(np.abs(k_new - weights.k), initial=0.0))
    return ResidualReport(
        eta=eta,
        real_residual=real_residual,
        data_residual=data_residual,
        box_residual=box_residual,
        box_residual_normalized=box_residual / (2.0 * eta / n),
    )


def contains_world_weights(
    weights: AbstractWeights,
    e_data: Mapping[int, float],
    w_star: np.ndarray,
    tol: float | None = None,
) -> bool:
    """Membership of one world's trained weights in the joint concretization.

    Checks ``A (w* - w_R - w_D(e))`` against the box diameters: dimensions
    with a positive diameter allow the full box plus tolerance, degenerate
    dimensions must match to tolerance.  Valid for the structured fixed
    point shape (unsplit, or the box produced by a join).
    """
    w_star = np.asarray(w_star, dtype=float)
    if tol is None:
        tol = 1e-7 * (1.0 + float(np.max(np.abs(w_star))))
    r = weights.A @ (w_star - weights.w_R - weights.w_D(e_data))
    for i in range(weights.dim):
        k_i = weights.k[i]
        if k_i > 0.0:
            if abs(r[i]) > k_i * (1.0 + 1e-12) + tol:
                return False
        elif abs(r[i]) > tol:
            return False
    return True
