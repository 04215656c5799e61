"""Cross-validation driver and imbalance-aware evaluation statistics.

Metric conventions:

* Sensitivity, specificity and GMean are on the percent scale (0 to 100);
  positive is class index 1.
* A metric whose denominator is zero (no test instances of that class) is
  reported as ``None`` rather than silently coerced; GMean is 0 when either
  side is 0 and ``None`` when either side is undefined.
* Aggregate sensitivity/specificity come from confusion counts pooled over
  folds, which stays defined even when single folds lack a class; the quoted
  standard error is the dispersion of the per-fold values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, stratified_kfold
from .errors import (
    ArgumentError,
    DegenerateError,
    LengthMismatchError,
    TooFewPairsError,
)
from .estimation import estimate_cpts, score_all_edges
from .hierarchy import FeatureDag
from .lazy import evaluate_hre_tan, resolve_workers
from .rng import instance_seed, mix64
from .tan import TanModel, build_mst, choose_root, classify, direct_tree


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion counts; positive = class index 1."""

    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.tn + self.fp


@dataclass(frozen=True)
class EvalReport:
    """Cross-validation outcome: pooled metrics plus per-fold dispersion."""

    folds: tuple[ConfusionCounts, ...]
    pooled: ConfusionCounts
    sensitivity: float | None
    specificity: float | None
    gmean: float | None
    se_sensitivity: float | None
    se_specificity: float | None
    degree_of_imbalance: float


@dataclass(frozen=True)
class ComparisonReport:
    """Head-to-head comparison of two classifiers across datasets.

    Statistics that their preconditions rule out (too few pairs for the
    signed-rank test, degenerate variance for correlation) are ``None``.
    """

    method_a: str
    method_b: str
    names: tuple[str, ...]
    d: tuple[float, ...]
    gmean_a: tuple[float, ...]
    gmean_b: tuple[float, ...]
    wins: int
    ties: int
    losses: int
    wilcoxon_w: float | None
    p_value: float | None
    r_a: float | None
    r_b: float | None
    slope_a: float | None
    intercept_a: float | None
    slope_b: float | None
    intercept_b: float | None
    failures: tuple[tuple[str, str], ...] = ()


def confusion(predictions, labels) -> ConfusionCounts:
    """Count binary outcomes; positive = class index 1."""
    pred = np.asarray(predictions, dtype=np.int64)
    true = np.asarray(labels, dtype=np.int64)
    if pred.shape != true.shape:
        raise LengthMismatchError(
            f"{pred.shape[0] if pred.ndim else 0} predictions vs {true.shape[0] if true.ndim else 0} labels"
        )
    return ConfusionCounts(
        tp=int(np.sum((true == 1) & (pred == 1))),
        fn=int(np.sum((true == 1) & (pred == 0))),
        tn=int(np.sum((true == 0) & (pred == 0))),
        fp=int(np.sum((true == 0) & (pred == 1))),
    )


def metrics(counts: ConfusionCounts) -> tuple[float | None, float | None, float | None]:
    """(sensitivity, specificity, gmean) in percent; ``None`` when undefined."""
    pos = counts.tp + counts.fn
    neg = counts.tn + counts.fp
    sens = 100.0 * counts.tp / pos if pos else None
    spec = 100.0 * counts.tn / neg if neg else None
    if sens is None or spec is None:
        gmean = None
    else:
        gmean = math.sqrt(sens * spec)
    return sens, spec, gmean


def degree_of_imbalance(labels) -> float:
    """D = 1 - minority/majority over binary labels; 0 when balanced."""
    lab = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(lab, minlength=2)
    if len(np.nonzero(counts)[0]) != 2:
        raise ArgumentError("degree of imbalance needs both classes present")
    return 1.0 - counts.min() / counts.max()


def _paired(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatchError(f"{x.shape[0]} xs vs {y.shape[0]} ys")
    if len(x) < 2:
        raise ArgumentError("need at least 2 points")
    return x, y


def pearson_r(xs, ys) -> float:
    """Sample Pearson correlation, clamped into [-1, 1]."""
    x, y = _paired(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def linear_fit(xs, ys) -> tuple[float, float]:
    """Ordinary least squares (slope, intercept)."""
    x, y = _paired(xs, ys)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateError("zero variance in xs")
    slope = float(dx @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


def _signed_ranks(diffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Average ranks of |diffs| and the tie-group sizes."""
    magnitude = np.abs(diffs)
    order = np.argsort(magnitude, kind="stable")
    ranks = np.empty(len(diffs), dtype=np.float64)
    sizes = []
    pos = 0
    while pos < len(order):
        end = pos
        while end < len(order) and magnitude[order[end]] == magnitude[order[pos]]:
            end += 1
        ranks[order[pos:end]] = 0.5 * (pos + 1 + end)
        sizes.append(end - pos)
        pos = end
    return ranks, np.asarray(sizes, dtype=np.int64)


def _exact_signed_rank_p(ranks: np.ndarray, w_min: float) -> float:
    """Two-tailed p by full enumeration of the 2^n sign assignments.

    Ranks are doubled to integers (averages are always multiples of 0.5) and
    the subset-sum distribution of W+ is built by dynamic programming.
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    ways = np.zeros(total + 1, dtype=np.float64)
    ways[0] = 1.0
    for d in doubled:
        ways[d:] += ways[: total + 1 - d].copy()
    threshold = int(np.rint(2.0 * w_min))
    cdf = float(ways[: threshold + 1].sum()) / 2.0 ** len(ranks)
    return min(1.0, 2.0 * cdf)


def wilcoxon_signed_rank(a, b) -> tuple[float, float, int, int, int]:
    """Two-tailed Wilcoxon signed-rank test on paired samples.

    Returns (W, p, wins, ties, losses) where wins counts a > b.  Zero
    differences are discarded; tied magnitudes share average ranks; the
    p-value is exact for up to 25 remaining pairs and uses the tie-corrected
    normal approximation with continuity correction beyond that.
    """
    x, y = _paired(a, b)
    diffs = x - y
    wins = int(np.sum(diffs > 0))
    ties = int(np.sum(diffs == 0))
    losses = int(np.sum(diffs < 0))
    nonzero = diffs[diffs != 0]
    n = len(nonzero)
    if n < 5:
        raise TooFewPairsError(f"{n} nonzero differences, need at least 5")
    ranks, tie_sizes = _signed_ranks(nonzero)
    w_plus = float(ranks[nonzero > 0].sum())
    w_minus = float(ranks[nonzero < 0].sum())
    w = min(w_plus, w_minus)
    if n <= 25:
        return w, _exact_signed_rank_p(ranks, w), wins, ties, losses
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    z = (w - mu + 0.5) / math.sqrt(var)
    p = math.erfc(-z / math.sqrt(2.0))
    return w, min(1.0, p), wins, ties, losses


def _row_subset(data: Dataset, indices: np.ndarray) -> Dataset:
    return Dataset(
        feature_names=data.feature_names,
        rows=data.rows[indices],
        labels=data.labels[indices],
        class_names=data.class_names,
    )


def _tan_fold_predictions(train: Dataset, test: Dataset, fold_seed: int,
                          smoothing: float, root_policy: str) -> list[int]:
    """Eager TAN: structure and counts are fit once on the fold's training
    split; only the tree root is re-drawn per test instance, from the same
    content-derived seed stream the lazy classifier uses.  Re-rooting never
    changes which joint distribution the tree encodes, it only moves the
    smoothing across conditionals, and it makes the two classifiers
    bit-comparable under a shared seed."""
    edges = score_all_edges(train)
    undirected = build_mst(edges, train.n_features)
    vertices = range(train.n_features)
    models: dict[int, TanModel] = {}
    out = []
    for r in range(test.n_instances):
        inst = test.instance(r)
        root = choose_root(vertices, instance_seed(fold_seed, inst.values), root_policy)
        model = models.get(root)
        if model is None:
            tree = direct_tree(undirected, root, vertices=vertices)
            model = TanModel(tree=tree, cpt=estimate_cpts(train, tree, smoothing),
                             feature_names=train.feature_names, class_names=train.class_names)
            models[root] = model
        out.append(classify(model, inst).label)
    return out


def cross_validate(data: Dataset, dag: FeatureDag, method: str, k: int, seed: int,
                   smoothing: float = 1.0, root_policy: str = "random",
                   n_jobs: int | None = None) -> EvalReport:
    """Stratified k-fold evaluation of one classifier.

    Per-fold seeds derive from the base seed and the fold index, so the
    report is a pure function of (data, dag, method, k, seed, smoothing,
    root policy).
    """
    if method not in ("tan", "hre-tan"):
        raise ArgumentError(f"unknown method {method!r}")
    d = degree_of_imbalance(data.labels)
    split = stratified_kfold(data, k, seed)
    folds = []
    fold_sens: list[float | None] = []
    fold_spec: list[float | None] = []
    for fold in range(k):
        train = _row_subset(data, split.train_indices(fold))
        test = _row_subset(data, split.test_indices(fold))
        fold_seed = mix64(seed, fold)
        if method == "tan":
            predicted = _tan_fold_predictions(train, test, fold_seed, smoothing, root_policy)
        else:
            results = evaluate_hre_tan(train, test, dag, fold_seed, smoothing,
                                       root_policy, n_jobs=resolve_workers(n_jobs))
            predicted = [r.label for r in results]
        counts = confusion(predicted, test.labels)
        folds.append(counts)
        sens, spec, _ = metrics(counts)
        fold_sens.append(sens)
        fold_spec.append(spec)
    pooled = ConfusionCounts(
        tp=sum(c.tp for c in folds), fn=sum(c.fn for c in folds),
        tn=sum(c.tn for c in folds), fp=sum(c.fp for c in folds),
    )
    sens, spec, gmean = metrics(pooled)
    return EvalReport(
        folds=tuple(folds), pooled=pooled,
        sensitivity=sens, specificity=spec, gmean=gmean,
        se_sensitivity=_fold_se(fold_sens), se_specificity=_fold_se(fold_spec),
        degree_of_imbalance=d,
    )


def _fold_se(values) -> float | None:
    """Standard error across folds; folds with an undefined metric are
    skipped, and fewer than two defined folds yield ``None``."""
    defined = [v for v in values if v is not None]
    if len(defined) < 2:
        return None
    return float(np.std(defined, ddof=1)) / math.sqrt(len(defined))


def compare_methods(method_a: str, method_b: str, names, d_values, gmean_a, gmean_b,
                    failures=()) -> ComparisonReport:
    """Assemble the head-to-head statistics for two per-dataset GMean series.

    wins/ties/losses count method A against method B on every dataset; the
    signed-rank test and the (D, GMean) correlations are filled in when their
    preconditions hold and left ``None`` otherwise.
    """
    names = tuple(names)
    d = tuple(float(v) for v in d_values)
    ga = tuple(float(v) for v in gmean_a)
    gb = tuple(float(v) for v in gmean_b)
    if not (len(names) == len(d) == len(ga) == len(gb)):
        raise LengthMismatchError("per-dataset series differ in length")
    a_arr = np.asarray(ga)
    b_arr = np.asarray(gb)
    wins = int(np.sum(a_arr > b_arr))
    ties = int(np.sum(a_arr == b_arr))
    losses = int(np.sum(a_arr < b_arr))
    try:
        w, p, wins, ties, losses = wilcoxon_signed_rank(ga, gb)
    except (TooFewPairsError, ArgumentError):
        w = p = None
    stats: dict[str, float | None] = {}
    for tag, series in (("a", ga), ("b", gb)):
        try:
            stats[f"r_{tag}"] = pearson_r(d, series)
        except (DegenerateError, ArgumentError):
            stats[f"r_{tag}"] = None
        try:
            slope, intercept = linear_fit(d, series)
        except (DegenerateError, ArgumentError):
            slope = intercept = None
        stats[f"slope_{tag}"] = slope
        stats[f"intercept_{tag}"] = intercept
    return ComparisonReport(
        method_a=method_a, method_b=method_b, names=names, d=d,
        gmean_a=ga, gmean_b=gb, wins=wins, ties=ties, losses=losses,
        wilcoxon_w=w, p_value=p,
        r_a=stats["r_a"], r_b=stats["r_b"],
        slope_a=stats["slope_a"], intercept_a=stats["intercept_a"],
        slope_b=stats["slope_b"], intercept_b=stats["intercept_b"],
        failures=tuple((str(n), str(m)) for n, m in failures),
    )


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready view of an EvalReport; undefined metrics become null."""
    fold_rows = []
    for counts in report.folds:
        sens, spec, gmean = metrics(counts)
        fold_rows.append({
            "tp": counts.tp, "fn": counts.fn, "tn": counts.tn, "fp": counts.fp,
            "sensitivity": sens, "specificity": spec, "gmean": gmean,
        })
    pooled = report.pooled
    return {
        "folds": fold_rows,
        "pooled": {"tp": pooled.tp, "fn": pooled.fn, "tn": pooled.tn, "fp": pooled.fp},
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "gmean": report.gmean,
        "se_sensitivity": report.se_sensitivity,
        "se_specificity": report.se_specificity,
        "degree_of_imbalance": report.degree_of_imbalance,
    }


def comparison_to_dict(report: ComparisonReport) -> dict:
    """JSON-ready view of a ComparisonReport."""
    return {
        "method_a": report.method_a,
        "method_b": report.method_b,
        "datasets": list(report.names),
        "d": list(report.d),
        "gmean_a": list(report.gmean_a),
        "gmean_b": list(report.gmean_b),
        "wins": report.wins,
        "ties": report.ties,
        "losses": report.losses,
        "wilcoxon_w": report.wilcoxon_w,
        "p_value": report.p_value,
        "pearson_r_a": report.r_a,
        "pearson_r_b": report.r_b,
        "regression_a": {"slope": report.slope_a, "intercept": report.intercept_a},
        "regression_b": {"slope": report.slope_b, "intercept": report.intercept_b},
        "failures": [{"dataset": n, "error": m} for n, m in report.failures],
    }


def _fmt(value: float) -> str:
    return format(float(value), ".10g")


def _column_tag(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum()) or "method"


def comparison_to_csv(report: ComparisonReport) -> str:
    """Per-dataset rows: dataset, D, then one GMean column per method
    (method B first, matching the convention of naming the baseline before
    the challenger)."""
    tag_a = _column_tag(report.method_a)
    tag_b = _column_tag(report.method_b)
    lines = [f"dataset,d,gmean_{tag_b},gmean_{tag_a}"]
    for name, d, ga, gb in zip(report.names, report.d, report.gmean_a, report.gmean_b):
        lines.append(f"{name},{_fmt(d)},{_fmt(gb)},{_fmt(ga)}")
    return "\n".join(lines) + "\n"


def comparison_to_plot_tsv(report: ComparisonReport) -> str:
    """Scatter plus fitted line per method: (method, x, y, fitted_y) rows.

    fitted_y is empty when the regression was degenerate.
    """
    lines = ["method\tx\ty\tfitted_y"]
    for method, series, slope, intercept in (
        (report.method_b, report.gmean_b, report.slope_b, report.intercept_b),
        (report.method_a, report.gmean_a, report.slope_a, report.intercept_a),
    ):
        for x, y in zip(report.d, series):
            fitted = "" if slope is None else _fmt(slope * x + intercept)
            lines.append(f"{method}\t{_fmt(x)}\t{_fmt(y)}\t{fitted}")
    return "\n".join(lines) + "\n"
