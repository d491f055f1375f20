"""From missing cells to guaranteed prediction ranges, end to end.

Two missing feature cells are abstracted into symbolic intervals, the
closed-form weight zonotope is computed, and new points get prediction
ranges that provably cover every completion of the data.  The last section
shows what happens when the declared ranges span the whole feature domain:
the regularization threshold is exceeded and the solver falls back to
splitting the uncertainty into parts before joining the results.
"""

import numpy as np

from zonoridge import (
    Dataset,
    RidgeConfig,
    abstract_missing,
    enumerate_worlds,
    fixed_point,
    predict_interval,
    ridge_concrete,
)


def dataset_with_holes(n=40, seed=5):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.uniform(0, 10, size=(n, 2))])
    y = 1.0 + 0.4 * X[:, 1] + 0.3 * X[:, 2] + 0.2 * rng.standard_normal(n)
    X[0, 2] = np.nan
    X[n - 1, 1] = np.nan
    return Dataset(X=X, y=y, columns=["bias", "a", "b"])


def main():
    ds = dataset_with_holes()
    lam = 0.1

    # Imputation-informed ranges: several imputers put the missing values
    # between 2 and 8, so that is the interval we declare.
    ad = abstract_missing(ds, {"a": (2.0, 8.0), "b": (2.0, 8.0)})
    print("abstracted cells (center +/- half-width):")
    for sid in ad.data_symbols():
        r, c = ad.provenance[sid]
        print(f"  cell ({r}, {ds.columns[c]}): {ad.X_R[r, c]} +/- {ad.coefficients[sid]}")

    weights, diag = fixed_point(ad, RidgeConfig(lam=lam))
    print(f"\ncenter weights: {np.round(weights.w_R, 4)}")
    print(f"box diameters k: {np.round(weights.k, 4)}  "
          f"(beta {diag.beta:.3f} <= lambda {lam}, no splitting, "
          f"step residual {diag.residual.box_residual:.1e})")

    points = [np.array([1.0, 2.0, 5.0]), np.array([1.0, 8.0, 1.0])]
    print("\nguaranteed prediction ranges:")
    for x in points:
        p = predict_interval(x, weights)
        print(f"  x = {x[1:]} -> [{p.lo:.4f}, {p.hi:.4f}]")

    print("\nbrute-force check over a grid of completions:")
    for _, Xw, yw in enumerate_worlds(ad, "grid", levels=7):
        w_star = ridge_concrete(Xw, yw, lam)
        for x in points:
            p = predict_interval(x, weights)
            assert p.lo - 1e-9 <= float(x @ w_star) <= p.hi + 1e-9
    print("  every completion's model predicts inside the ranges above.")

    # Worst-case ranges: nothing is known, both cells may be anywhere in the
    # feature domain.  The feasibility threshold exceeds lambda, so the
    # uncertainty is split into parts, solved per part, and box-joined.
    ad_wide = abstract_missing(ds, {"a": (0.0, 10.0), "b": (0.0, 10.0)})
    weights_w, diag_w = fixed_point(ad_wide, RidgeConfig(lam=lam))
    print(f"\nfull-domain ranges: beta {diag_w.beta:.3f} > lambda {lam} "
          f"-> {diag_w.splits_used} split parts, still sound:")
    for x in points:
        p = predict_interval(x, weights_w)
        print(f"  x = {x[1:]} -> [{p.lo:.4f}, {p.hi:.4f}]  (wider, as it must be)")


if __name__ == "__main__":
    main()
