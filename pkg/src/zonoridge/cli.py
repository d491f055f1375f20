"""Reproducible experiment driver.

Subcommands: ``certify``, ``loss-range``, ``lambda-sweep``, ``oracle-check``,
``params``.  Configuration comes from an INI-style file of flat key/value
sections; every key can be overridden by a command-line flag.  Experiments
repeat over seeds, grid points and seeds run as independent tasks, and
reports are written as plot-ready CSV or JSON.  Identical configurations
produce byte-identical CSV output.

Exit codes: 0 ok, 1 usage error, 2 data/config error, 3 soundness failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import (
    Dataset,
    FeatureScaler,
    UncertaintySpec,
    domain_ranges,
    inject_uncertainty,
    load_csv,
    train_test_split,
)
from .errors import BudgetExceededError, DataError, ZonoError
from .inference import certify_robustness, loss_interval, parameter_intervals, predict_interval
from .learning import RidgeConfig, contains_world_weights, fixed_point
from .oracles import (
    enumerate_worlds,
    interval_ridge_labels,
    oracle_ranges,
    ridge_concrete,
    sample_worlds,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOUNDNESS = 3


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    dataset_path: str = ""
    label_column: str = ""
    feature_columns: list[str] | None = None
    split_ratio: float = 0.8
    split_seed: int = 0
    standardize: bool = False

    target: str = "labels"
    uncertain_columns: list[str] | None = None
    percentage: float = 0.1
    radius: float = 0.05

    lam: float = 0.0
    transform: str = "svd"
    split_budget: int = 4096
    tolerance: float = 1e-9

    threshold: float = 0.05  # fraction of the label domain range

    radius_grid: list[float] = field(default_factory=list)
    percentage_grid: list[float] = field(default_factory=list)
    lambda_grid: list[float] = field(default_factory=list)

    seeds: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    out_dir: str = "out"
    fmt: str = "csv"
    jobs: int = 4

    oracle_budget: int = 4096
    oracle_samples: int = 500

    def validate(self) -> None:
        if not self.dataset_path:
            raise DataError("dataset path is required (config [data] path or --dataset)")
        if not self.label_column:
            raise DataError("label column is required (config [data] label or --label)")
        if len(set(self.seeds)) != len(self.seeds):
            raise DataError("seeds must be distinct")
        if self.fmt not in ("csv", "json"):
            raise DataError(f"unknown format {self.fmt!r}")
        if self.threshold <= 0:
            raise DataError("threshold must be positive")

    def ridge_config(self, lam: float | None = None) -> RidgeConfig:
        return RidgeConfig(
            lam=self.lam if lam is None else lam,
            transform=self.transform,
            split_budget=self.split_budget,
            tolerance=self.tolerance,
        )

    def echo(self) -> dict:
        out = dict(self.__dict__)
        out["feature_columns"] = list(self.feature_columns) if self.feature_columns else None
        out["uncertain_columns"] = list(self.uncertain_columns) if self.uncertain_columns else None
        return out


def _parse_list(text: str, cast) -> list:
    return [cast(tok) for tok in text.replace(",", " ").split()]


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise DataError(f"cannot read config file {path}")
    cfg = ExperimentConfig()

    def get(section, key, cast=str, default=None):
        if parser.has_option(section, key):
            raw = parser.get(section, key)
            if cast is bool:
                return raw.strip().lower() in ("1", "true", "yes")
            return cast(raw)
        return default

    cfg.dataset_path = get("data", "path", str, cfg.dataset_path)
    cfg.label_column = get("data", "label", str, cfg.label_column)
    feats = get("data", "features", str)
    cfg.feature_columns = _parse_list(feats, str) if feats else None
    cfg.split_ratio = get("data", "split_ratio", float, cfg.split_ratio)
    cfg.split_seed = get("data", "split_seed", int, cfg.split_seed)
    cfg.standardize = get("data", "standardize", bool, cfg.standardize)

    cfg.target = get("uncertainty", "target", str, cfg.target)
    cols = get("uncertainty", "columns", str)
    cfg.uncertain_columns = _parse_list(cols, str) if cols else None
    cfg.percentage = get("uncertainty", "percentage", float, cfg.percentage)
    cfg.radius = get("uncertainty", "radius", float, cfg.radius)

    cfg.lam = get("ridge", "lambda", float, cfg.lam)
    cfg.transform = get("ridge", "transform", str, cfg.transform)
    cfg.split_budget = get("ridge", "split_budget", int, cfg.split_budget)
    cfg.tolerance = get("ridge", "tolerance", float, cfg.tolerance)

    cfg.threshold = get("certify", "threshold", float, cfg.threshold)

    for key, attr in (("radius_grid", "radius_grid"), ("percentage_grid", "percentage_grid"),
                      ("lambda_grid", "lambda_grid")):
        raw = get("sweep", key, str)
        if raw:
            setattr(cfg, attr, _parse_list(raw, float))

    seeds = get("run", "seeds", str)
    if seeds:
        cfg.seeds = _parse_list(seeds, int)
    cfg.out_dir = get("run", "out_dir", str, cfg.out_dir)
    cfg.fmt = get("run", "format", str, cfg.fmt)
    cfg.jobs = get("run", "jobs", int, cfg.jobs)

    cfg.oracle_budget = get("oracle", "budget", int, cfg.oracle_budget)
    cfg.oracle_samples = get("oracle", "samples", int, cfg.oracle_samples)
    return cfg


def apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.dataset is not None:
        cfg.dataset_path = args.dataset
    if args.label is not None:
        cfg.label_column = args.label
    if args.features is not None:
        cfg.feature_columns = _parse_list(args.features, str)
    if args.split_ratio is not None:
        cfg.split_ratio = args.split_ratio
    if args.standardize:
        cfg.standardize = True
    if args.target is not None:
        cfg.target = args.target
    if args.columns is not None:
        cfg.uncertain_columns = _parse_list(args.columns, str)
    if args.percentage is not None:
        cfg.percentage = args.percentage
        cfg.percentage_grid = [args.percentage]
    if args.radius is not None:
        cfg.radius = args.radius
        cfg.radius_grid = [args.radius]
    if args.lam is not None:
        cfg.lam = args.lam
        cfg.lambda_grid = [args.lam]
    if args.threshold is not None:
        cfg.threshold = args.threshold
    if args.transform is not None:
        cfg.transform = args.transform
    if args.split_budget is not None:
        cfg.split_budget = args.split_budget
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if args.seeds is not None:
        cfg.seeds = _parse_list(args.seeds, int)
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.format is not None:
        cfg.fmt = args.format
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.oracle_samples is not None:
        cfg.oracle_samples = args.oracle_samples
    if args.oracle_budget is not None:
        cfg.oracle_budget = args.oracle_budget
    return cfg


@dataclass
class RunReport:
    command: str
    config: dict
    rows: list[dict]
    summary: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "config": self.config,
                "rows": self.rows,
                "summary": self.summary,
                "notes": self.notes,
            },
            sort_keys=True,
            indent=2,
        )

    def write(self, out_dir: str, fmt: str) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt == "json":
            p = out / f"{self.command}_report.json"
            p.write_text(self.to_json() + "\n", encoding="utf-8")
            written.append(p)
        else:
            for name, rows in (("results", self.rows), ("summary", self.summary)):
                p = out / f"{self.command}_{name}.csv"
                _write_csv(p, rows)
                written.append(p)
        return written


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            fh.write("")
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _stats(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def _summarize(rows: list[dict], group_keys: list[str], value_keys: list[str]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in group_keys), []).append(row)
    out = []
    for key in sorted(groups):
        bucket = groups[key]
        entry = dict(zip(group_keys, key))
        entry["runs"] = len(bucket)
        for vk in value_keys:
            mean, std = _stats([r[vk] for r in bucket])
            entry[f"{vk}_mean"] = mean
            entry[f"{vk}_std"] = std
            entry[f"{vk}_3sigma"] = 3.0 * std
        out.append(entry)
    return out


def _prepare(cfg: ExperimentConfig) -> tuple[Dataset, float]:
    data = load_csv(cfg.dataset_path, cfg.label_column, cfg.feature_columns)
    threshold_abs = cfg.threshold * domain_ranges(data).label_width()
    if threshold_abs <= 0:
        raise DataError("label domain range is zero; cannot derive a robustness threshold")
    return data, threshold_abs


def _spec(cfg: ExperimentConfig, percentage: float, radius: float, seed: int) -> UncertaintySpec:
    return UncertaintySpec(
        target=cfg.target,
        percentage=percentage,
        radius=radius,
        seed=seed,
        columns=tuple(cfg.uncertain_columns) if cfg.uncertain_columns else None,
    )


def _split(cfg: ExperimentConfig, data: Dataset, seed: int) -> tuple[Dataset, Dataset]:
    train, test = train_test_split(data, cfg.split_ratio, cfg.split_seed + seed)
    if cfg.standardize:
        scaler = FeatureScaler.fit(train)
        train, test = scaler.transform(train), scaler.transform(test)
    return train, test


def _label_intervals(ad) -> np.ndarray:
    intervals = np.column_stack([ad.y_R, ad.y_R])
    for sid in ad.label_symbols():
        r, _ = ad.provenance[sid]
        intervals[r] = ad.cell_interval(sid)
    return intervals


def _run_tasks(tasks, fn, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _diag_columns(diag) -> dict:
    res = diag.residual
    return {
        "beta": diag.beta,
        "splits": diag.splits_used,
        "m_matrix_margin": diag.m_matrix_margin,
        "residual_real": res.real_residual if res else math.nan,
        "residual_data": res.data_residual if res else math.nan,
        "residual_box": res.box_residual if res else math.nan,
    }


def cmd_certify(cfg: ExperimentConfig) -> RunReport:
    """Robustness ratios per seed and grid point, with the label-interval
    baseline alongside whenever uncertainty is label-only."""
    data, threshold_abs = _prepare(cfg)
    radii = cfg.radius_grid or [cfg.radius]
    percentages = cfg.percentage_grid or [cfg.percentage]
    tasks = [
        (seed, pct, rad)
        for seed in cfg.seeds
        for pct in percentages
        for rad in radii
    ]

    def run(task):
        seed, pct, rad = task
        train, test = _split(cfg, data, seed)
        ad = inject_uncertainty(train, _spec(cfg, pct, rad, seed))
        weights, diag = fixed_point(ad, cfg.ridge_config())
        report = certify_robustness(test.X, weights, threshold_abs)
        row = {
            "seed": seed,
            "percentage": pct,
            "radius": rad,
            "lambda": cfg.lam,
            "threshold_abs": threshold_abs,
            "n_train": train.n,
            "n_test": test.n,
            "ratio": report.ratio,
            "baseline_ratio": math.nan,
        }
        if cfg.target == "labels":
            baseline = interval_ridge_labels(train.X, _label_intervals(ad), cfg.lam)
            robust = sum(
                (lambda lh: lh[1] - lh[0] < threshold_abs)(baseline.predict_interval(x))
                for x in test.X
            )
            row["baseline_ratio"] = robust / test.n
        row.update(_diag_columns(diag))
        return row

    rows = _run_tasks(tasks, run, cfg.jobs)
    value_keys = ["ratio"] + (["baseline_ratio"] if cfg.target == "labels" else [])
    summary = _summarize(rows, ["percentage", "radius"], value_keys)
    return RunReport("certify", cfg.echo(), rows, summary)


def cmd_loss_range(cfg: ExperimentConfig) -> RunReport:
    """Zonotope loss interval vs enumerated ground truth (sampling fallback
    when enumeration exceeds the budget) across the radius grid."""
    data, _ = _prepare(cfg)
    radii = cfg.radius_grid or [cfg.radius]
    tasks = [(seed, rad) for seed in cfg.seeds for rad in radii]
    notes: list[str] = []

    def run(task):
        seed, rad = task
        train, test = _split(cfg, data, seed)
        ad = inject_uncertainty(train, _spec(cfg, cfg.percentage, rad, seed))
        weights, diag = fixed_point(ad, cfg.ridge_config())
        li = loss_interval(test.X, test.y, weights, cfg.lam)
        n_syms = len(ad.split_symbols())
        gt_mode = "corner"
        try:
            gt = oracle_ranges(ad, cfg.lam, test.X, test.y, strategy="corner",
                               budget=cfg.oracle_budget)
        except BudgetExceededError:
            gt_mode = "sampling_fallback"
            gt = oracle_ranges(ad, cfg.lam, test.X, test.y, strategy="uniform",
                               samples=cfg.oracle_samples, seed=seed)
        sampled = oracle_ranges(ad, cfg.lam, test.X, test.y, strategy="uniform",
                                samples=cfg.oracle_samples, seed=seed + 1)
        row = {
            "seed": seed,
            "radius": rad,
            "percentage": cfg.percentage,
            "lambda": cfg.lam,
            "n_symbols": n_syms,
            "zono_lo": li.lo,
            "zono_hi": li.hi,
            "gt_mode": gt_mode,
            "gt_lo": gt.loss_lo,
            "gt_hi": gt.loss_hi,
            "sample_lo": sampled.loss_lo,
            "sample_hi": sampled.loss_hi,
            "contained": int(li.lo <= gt.loss_lo + 1e-9 and gt.loss_hi <= li.hi + 1e-9),
            "gap": (li.hi - li.lo) - (gt.loss_hi - gt.loss_lo),
        }
        row.update(_diag_columns(diag))
        if gt_mode != "corner":
            notes.append(f"seed={seed} radius={rad}: enumeration over budget, sampled instead")
        return row

    rows = _run_tasks(tasks, run, cfg.jobs)
    summary = _summarize(rows, ["radius"], ["zono_lo", "zono_hi", "gt_lo", "gt_hi", "gap"])
    return RunReport("loss-range", cfg.echo(), rows, summary, notes=sorted(set(notes)))


def cmd_lambda_sweep(cfg: ExperimentConfig) -> RunReport:
    """Robustness ratio and worst-case test loss across the lambda grid."""
    data, threshold_abs = _prepare(cfg)
    lambdas = cfg.lambda_grid or [cfg.lam]
    tasks = [(seed, lam) for seed in cfg.seeds for lam in lambdas]

    def run(task):
        seed, lam = task
        train, test = _split(cfg, data, seed)
        ad = inject_uncertainty(train, _spec(cfg, cfg.percentage, cfg.radius, seed))
        weights, diag = fixed_point(ad, cfg.ridge_config(lam))
        report = certify_robustness(test.X, weights, threshold_abs)
        li = loss_interval(test.X, test.y, weights, lam)
        row = {
            "seed": seed,
            "lambda": lam,
            "percentage": cfg.percentage,
            "radius": cfg.radius,
            "threshold_abs": threshold_abs,
            "ratio": report.ratio,
            "loss_lo": li.lo,
            "loss_hi": li.hi,
        }
        row.update(_diag_columns(diag))
        return row

    rows = _run_tasks(tasks, run, cfg.jobs)
    summary = _summarize(rows, ["lambda"], ["ratio", "loss_hi"])
    if summary:
        best = min(summary, key=lambda s: s["loss_hi_mean"])
        for entry in summary:
            entry["best_worst_case_loss"] = int(entry is best)
    return RunReport("lambda-sweep", cfg.echo(), rows, summary)


def cmd_oracle_check(cfg: ExperimentConfig) -> tuple[RunReport, bool]:
    """End-to-end soundness sweep: every sampled/enumerated world's trained
    weights, predictions and loss must fall inside the abstract results."""
    data, _ = _prepare(cfg)
    tasks = list(cfg.seeds)

    def run(seed):
        train, test = _split(cfg, data, seed)
        ad = inject_uncertainty(train, _spec(cfg, cfg.percentage, cfg.radius, seed))
        weights, diag = fixed_point(ad, cfg.ridge_config())
        li = loss_interval(test.X, test.y, weights, cfg.lam)
        intervals = [predict_interval(x, weights) for x in test.X]
        worlds = list(sample_worlds(ad, cfg.oracle_samples, seed))
        n_syms = len(ad.split_symbols())
        if 2**n_syms <= cfg.oracle_budget:
            worlds.extend(enumerate_worlds(ad, "corner", budget=cfg.oracle_budget))
        weight_fail = pred_fail = loss_fail = 0
        for wa, X, y in worlds:
            w_star = ridge_concrete(X, y, cfg.lam)
            if not contains_world_weights(weights, wa.values, w_star):
                weight_fail += 1
            preds = test.X @ w_star
            for p, interval in zip(preds, intervals):
                if not (interval.lo - 1e-7 <= p <= interval.hi + 1e-7):
                    pred_fail += 1
                    break
            loss = float((test.X @ w_star - test.y) @ (test.X @ w_star - test.y)) / test.n
            loss += cfg.lam * float(w_star @ w_star)
            if not (li.lo - 1e-7 <= loss <= li.hi + 1e-7):
                loss_fail += 1
        row = {
            "seed": seed,
            "percentage": cfg.percentage,
            "radius": cfg.radius,
            "lambda": cfg.lam,
            "worlds": len(worlds),
            "weight_failures": weight_fail,
            "prediction_failures": pred_fail,
            "loss_failures": loss_fail,
        }
        row.update(_diag_columns(diag))
        return row

    rows = _run_tasks(tasks, run, cfg.jobs)
    total_fail = sum(r["weight_failures"] + r["prediction_failures"] + r["loss_failures"] for r in rows)
    summary = [
        {
            "worlds_total": sum(r["worlds"] for r in rows),
            "weight_failures": sum(r["weight_failures"] for r in rows),
            "prediction_failures": sum(r["prediction_failures"] for r in rows),
            "loss_failures": sum(r["loss_failures"] for r in rows),
            "passed": int(total_fail == 0),
        }
    ]
    return RunReport("oracle-check", cfg.echo(), rows, summary), total_fail == 0


def cmd_params(cfg: ExperimentConfig) -> RunReport:
    """Per-coefficient intervals with direction-conclusiveness flags."""
    data, _ = _prepare(cfg)
    seed = cfg.seeds[0]
    train, _ = _split(cfg, data, seed)
    ad = inject_uncertainty(train, _spec(cfg, cfg.percentage, cfg.radius, seed))
    weights, diag = fixed_point(ad, cfg.ridge_config())
    pi = parameter_intervals(weights, names=list(train.columns))
    rows = []
    for rec in pi.to_csv_rows():
        rec["seed"] = seed
        rec.update(_diag_columns(diag))
        rows.append(rec)
    return RunReport("params", cfg.echo(), rows, rows)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="zonoridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("certify", "loss-range", "lambda-sweep", "oracle-check", "params"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--dataset", default=None)
        p.add_argument("--label", default=None)
        p.add_argument("--features", default=None, help="comma-separated feature columns")
        p.add_argument("--split-ratio", type=float, default=None)
        p.add_argument("--standardize", action="store_true", default=False,
                       help="standardize non-bias features on the training split")
        p.add_argument("--target", choices=["labels", "features", "both"], default=None)
        p.add_argument("--columns", default=None, help="uncertain feature columns")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--seeds", default=None, help="comma-separated seed list")
        p.add_argument("--radius", type=float, default=None)
        p.add_argument("--percentage", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--threshold", type=float, default=None,
                       help="robustness threshold as a fraction of the label range")
        p.add_argument("--transform", choices=["svd", "identity"], default=None)
        p.add_argument("--split-budget", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--oracle-samples", type=int, default=None)
        p.add_argument("--oracle-budget", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = apply_overrides(cfg, args)
        cfg.validate()
    except (DataError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_DATA

    try:
        if args.command == "certify":
            report = cmd_certify(cfg)
            ok = True
        elif args.command == "loss-range":
            report = cmd_loss_range(cfg)
            ok = all(r["contained"] for r in report.rows)
        elif args.command == "lambda-sweep":
            report = cmd_lambda_sweep(cfg)
            ok = True
        elif args.command == "oracle-check":
            report, ok = cmd_oracle_check(cfg)
        else:
            report = cmd_params(cfg)
            ok = True
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ZonoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    written = report.write(cfg.out_dir, cfg.fmt)
    for path in written:
        print(f"wrote {path}")
    for note in report.notes:
        print(f"note: {note}")
    if args.command == "oracle-check":
        status = "PASS" if ok else "FAIL"
        print(f"oracle-check: {status} ({report.summary[0]['worlds_total']} worlds)")
        return EXIT_OK if ok else EXIT_SOUNDNESS
    if args.command == "loss-range" and not ok:
        print("loss-range: containment violated", file=sys.stderr)
        return EXIT_SOUNDNESS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
