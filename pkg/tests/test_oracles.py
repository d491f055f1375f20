import numpy as np
import pytest

from zonoridge.dataset import LABEL_COL, AbstractDataset, Dataset, UncertaintySpec, inject_uncertainty
from zonoridge.errors import BudgetExceededError
from zonoridge.learning import ridge_closed_form_real
from zonoridge.oracles import (
    concrete_loss,
    enumerate_worlds,
    interval_ridge_labels,
    oracle_ranges,
    ridge_concrete,
    sample_worlds,
)


def make_dataset(n, d_feat, seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.uniform(-1, 2, size=(n, d_feat))])
    y = X @ rng.uniform(-2, 2, size=d_feat + 1) + 0.1 * rng.standard_normal(n)
    return Dataset(X=X, y=y, columns=["bias"] + [f"f{i}" for i in range(d_feat)])


class TestRidgeConcrete:
    def test_identical_to_closed_form_real(self):
        ds = make_dataset(15, 3, seed=0)
        for lam in (0.0, 0.01, 1.0):
            np.testing.assert_array_equal(
                ridge_concrete(ds.X, ds.y, lam), ridge_closed_form_real(ds.X, ds.y, lam)
            )

    def test_norm_shrinks_with_lambda(self):
        ds = make_dataset(25, 3, seed=1)
        norms = [np.linalg.norm(ridge_concrete(ds.X, ds.y, lam)) for lam in (0.0, 0.1, 1.0, 10.0, 100.0)]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))
        assert norms[-1] < 0.1 * norms[0]

    def test_first_order_condition(self):
        ds = make_dataset(20, 2, seed=2)
        lam = 0.3
        w = ridge_concrete(ds.X, ds.y, lam)
        grad = (2 / ds.n) * (ds.X.T @ ds.X @ w - ds.X.T @ ds.y) + 2 * lam * w
        assert np.max(np.abs(grad)) < 1e-10


class TestEnumerateWorlds:
    def test_no_symbols_single_world(self):
        ds = make_dataset(5, 1, seed=3)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.0, 0.1, seed=0))
        worlds = list(enumerate_worlds(ad))
        assert len(worlds) == 1
        np.testing.assert_array_equal(worlds[0][1], ds.X)

    def test_two_symbols_four_corners(self):
        ds = make_dataset(6, 1, seed=4)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 2 / 6, 0.2, seed=1))
        assert len(ad.data_symbols()) == 2
        worlds = list(enumerate_worlds(ad))
        assert len(worlds) == 4
        seen = {tuple(sorted(w.values.values())) for w, _, _ in worlds}
        assert seen == {(-1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)}

    def test_cells_within_intervals(self):
        ds = make_dataset(8, 2, seed=5)
        ad = inject_uncertainty(ds, UncertaintySpec("both", 0.25, 0.3, seed=2))
        for wa, X, y in enumerate_worlds(ad, "grid", levels=3, budget=100_000):
            for sid in ad.data_symbols():
                lo, hi = ad.cell_interval(sid)
                r, c = ad.provenance[sid]
                val = y[r] if c == LABEL_COL else X[r, c]
                assert lo - 1e-12 <= val <= hi + 1e-12

    def test_budget(self):
        ds = make_dataset(40, 2, seed=6)
        ad = inject_uncertainty(ds, UncertaintySpec("both", 0.5, 0.2, seed=3))
        with pytest.raises(BudgetExceededError):
            list(enumerate_worlds(ad, budget=16))


class TestSampleWorlds:
    def test_count_zero(self):
        ds = make_dataset(5, 1, seed=7)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.4, 0.2, seed=4))
        assert sample_worlds(ad, 0, seed=0) == []

    def test_seed_determinism(self):
        ds = make_dataset(9, 2, seed=8)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.4, 0.2, seed=5))
        a = sample_worlds(ad, 5, seed=11)
        b = sample_worlds(ad, 5, seed=11)
        for (wa, Xa, ya), (wb, Xb, yb) in zip(a, b):
            assert wa.values == wb.values
            np.testing.assert_array_equal(ya, yb)

    def test_sampled_extremes_dominated_by_corners_label_only(self):
        # Weights are affine in the symbols for label uncertainty, so
        # predictions peak at corners; the loss is convex in the symbols, so
        # its max is at a corner too (its min may be interior).
        ds = make_dataset(10, 1, seed=9)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.3, 0.4, seed=6))
        lam = 0.05
        test_X, test_y = ds.X[:4], ds.y[:4]
        corners = oracle_ranges(ad, lam, test_X, test_y)
        sampled = oracle_ranges(ad, lam, test_X, test_y, strategy="uniform", samples=300, seed=7)
        assert sampled.loss_hi <= corners.loss_hi + 1e-9
        assert np.all(sampled.pred_lo >= corners.pred_lo - 1e-9)
        assert np.all(sampled.pred_hi <= corners.pred_hi + 1e-9)


class TestOracleRanges:
    def test_certain_data_degenerate(self):
        ds = make_dataset(10, 2, seed=10)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.0, 0.1, seed=8))
        res = oracle_ranges(ad, 0.1, ds.X[:3], ds.y[:3])
        np.testing.assert_allclose(res.weight_lo, res.weight_hi)
        assert res.loss_lo == res.loss_hi

    def test_label_only_prediction_extremes_at_corners(self):
        ds = make_dataset(12, 2, seed=11)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.25, 0.3, seed=9))
        lam = 0.02
        res = oracle_ranges(ad, lam, ds.X[:5], ds.y[:5])
        sampled = oracle_ranges(ad, lam, ds.X[:5], ds.y[:5], strategy="uniform", samples=500, seed=10)
        assert np.all(sampled.pred_lo >= res.pred_lo - 1e-9)
        assert np.all(sampled.pred_hi <= res.pred_hi + 1e-9)


class TestIntervalRidgeLabels:
    def test_degenerate_matches_concrete(self):
        ds = make_dataset(14, 2, seed=12)
        lam = 0.1
        intervals = np.column_stack([ds.y, ds.y])
        res = interval_ridge_labels(ds.X, intervals, lam)
        w = ridge_concrete(ds.X, ds.y, lam)
        np.testing.assert_allclose(res.weight_lo, w, atol=1e-12)
        np.testing.assert_allclose(res.weight_hi, w, atol=1e-12)

    def test_contains_all_corner_weights(self):
        ds = make_dataset(10, 2, seed=13)
        ad = inject_uncertainty(ds, UncertaintySpec("labels", 0.3, 0.4, seed=11))
        lam = 0.05
        intervals = np.column_stack([ds.y, ds.y])
        for sid in ad.label_symbols():
            r, _ = ad.provenance[sid]
            lo, hi = ad.cell_interval(sid)
            intervals[r] = [lo, hi]
        res = interval_ridge_labels(ds.X, intervals, lam)
        for _, X, y in enumerate_worlds(ad):
            w = ridge_concrete(X, y, lam)
            assert np.all(w >= res.weight_lo - 1e-10)
            assert np.all(w <= res.weight_hi + 1e-10)
