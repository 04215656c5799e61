"""Command-line interface.

Subcommands: ``validate`` (hierarchy-consistency check), ``cv``
(cross-validated evaluation of one classifier), ``compare`` (head-to-head
statistics over a manifest of datasets), ``synth`` (synthetic dataset + DAG
generator), ``bench`` (kernel backend timing).

Exit codes: 0 success, 1 usage or parse error, 2 validation findings,
3 partial failure in a multi-dataset run.  Every subcommand is
deterministic given its full flag set; HRETAN_THREADS only changes timing,
never output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from ._kernels import _treescan_py
from .dataset import parse_dataset, serialize_dataset, synthesize
from .errors import ArgumentError, HreTanError, ParseError
from .estimation import score_all_edges
from .evaluation import (
    compare_methods,
    comparison_to_csv,
    comparison_to_dict,
    comparison_to_plot_tsv,
    cross_validate,
    report_to_dict,
)
from .hierarchy import build_dag, parse_dag_edges, repair_true_path, validate_true_path
from .rng import mix64


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit 1, keeping 2 for validation findings."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _load_dag(dag_path: str | None, feature_names):
    if dag_path is None:
        return build_dag(feature_names, [])
    return parse_dag_edges(_read_text(dag_path), feature_names)


def _check_smoothing(value: float):
    if value < 0:
        raise ArgumentError("smoothing must be >= 0")


def cmd_validate(args) -> int:
    """Report upward-propagation violations, one line each; optionally write
    a repaired copy of the dataset."""
    data = parse_dataset(_read_text(args.data), args.positive_class)
    dag = _load_dag(args.dag, data.feature_names)
    violations = validate_true_path(dag, data)
    if args.repair:
        _write_text(serialize_dataset(repair_true_path(dag, data)), args.repair)
    names = data.feature_names
    for row, feature, ancestor in violations:
        print(f"row {row}: {names[feature]}=1 but ancestor {names[ancestor]}=0")
    return 2 if violations else 0


def cmd_cv(args) -> int:
    """Cross-validate one classifier and emit the JSON report."""
    _check_smoothing(args.smoothing)
    data = parse_dataset(_read_text(args.data), args.positive_class)
    dag = _load_dag(args.dag, data.feature_names)
    report = cross_validate(data, dag, args.classifier, args.folds, args.seed,
                            args.smoothing, args.root)
    _write_text(json.dumps(report_to_dict(report), indent=2) + "\n", args.output)
    return 0


def _parse_manifest(text: str, base: Path) -> list[tuple[str, Path, Path]]:
    """Manifest rows: ``name<TAB>data-path<TAB>dag-path``; ``#`` comments and
    blank lines allowed; relative paths resolve against the manifest."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) != 3 or not all(parts):
            raise ParseError("expected 'name<TAB>data-path<TAB>dag-path'", line=lineno)
        rows.append((parts[0], base / parts[1], base / parts[2]))
    if not rows:
        raise ParseError("manifest lists no datasets")
    return rows


def _parse_stub_gmeans(text: str) -> tuple[list[str], list[float], list[float], list[float]]:
    """Recorded-results CSV: ``dataset,d,gmean_tan,gmean_hretan`` (the same
    layout the csv output format emits), one row per dataset."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "dataset,d,gmean_tan,gmean_hretan":
        raise ParseError("expected header 'dataset,d,gmean_tan,gmean_hretan'", line=1)
    names, ds, g_tan, g_hre = [], [], [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 4:
            raise ParseError("expected 4 columns", line=lineno)
        try:
            d, gt, gh = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from exc
        names.append(parts[0])
        ds.append(d)
        g_tan.append(gt)
        g_hre.append(gh)
    if not names:
        raise ParseError("no recorded rows")
    return names, ds, g_tan, g_hre


def cmd_compare(args) -> int:
    """Run both classifiers across a manifest (or take recorded GMeans) and
    emit the comparison statistics."""
    _check_smoothing(args.smoothing)
    failures: list[tuple[str, str]] = []
    if args.stub_gmeans:
        names, ds, g_tan, g_hre = _parse_stub_gmeans(_read_text(args.stub_gmeans))
    else:
        names, ds, g_tan, g_hre = [], [], [], []
        for name, data_path, dag_path in _parse_manifest(_read_text(args.manifest),
                                                         Path(args.manifest).parent):
            try:
                data = parse_dataset(_read_text(str(data_path)), args.positive_class)
                dag = parse_dag_edges(_read_text(str(dag_path)), data.feature_names)
                pair = {}
                for method in ("tan", "hre-tan"):
                    report = cross_validate(data, dag, method, args.folds, args.seed,
                                            args.smoothing, args.root)
                    if report.gmean is None:
                        raise ArgumentError("pooled GMean undefined")
                    pair[method] = report
                names.append(name)
                ds.append(pair["tan"].degree_of_imbalance)
                g_tan.append(pair["tan"].gmean)
                g_hre.append(pair["hre-tan"].gmean)
            except (HreTanError, OSError) as exc:
                failures.append((name, str(exc)))
    report = compare_methods("hre-tan", "tan", names, ds, g_hre, g_tan, failures)
    if args.format == "json":
        text = json.dumps(comparison_to_dict(report), indent=2) + "\n"
    elif args.format == "csv":
        text = comparison_to_csv(report)
    else:
        text = comparison_to_plot_tsv(report)
    _write_text(text, args.output)
    return 3 if failures else 0


def _random_dag(n_features: int, n_edges: int, seed: int):
    """Random DAG via a hidden topological order: every edge points from a
    later position (child) to an earlier one (parent), so cycles are
    impossible."""
    names = tuple(f"f{i:03d}" for i in range(n_features))
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_features)
    pairs = [(a, b) for b in range(n_features) for a in range(b)]
    take = min(n_edges, len(pairs))
    edges = []
    if take:
        for pos in sorted(rng.choice(len(pairs), size=take, replace=False).tolist()):
            parent_slot, child_slot = pairs[pos]
            edges.append((names[order[child_slot]], names[order[parent_slot]]))
    return names, edges


def cmd_synth(args) -> int:
    """Write a synthetic dataset and matching DAG file, both seeded."""
    if args.features < 1:
        raise ArgumentError("need at least 1 feature")
    if args.dag_edges < 0:
        raise ArgumentError("edge count must be >= 0")
    names, edges = _random_dag(args.features, args.dag_edges, mix64(args.seed, 0))
    dag = build_dag(names, edges)
    data = synthesize(dag, args.instances, args.balance, args.dependency,
                      seed=mix64(args.seed, 1))
    dag_lines = ["# child<TAB>parent"] + [f"{child}\t{parent}" for child, parent in edges]
    _write_text("\n".join(dag_lines) + "\n", args.out_dag)
    _write_text(serialize_dataset(data), args.out_data)
    return 0


def cmd_bench(args) -> int:
    """Time the per-instance tree scan on each available backend."""
    names, edges = _random_dag(args.features, args.features * 2, mix64(args.seed, 0))
    dag = build_dag(names, edges)
    data = synthesize(dag, args.instances, 0.3, 0.4, seed=mix64(args.seed, 1))
    scored = score_all_edges(data)
    rel_flat, rel_off = dag.related_csr()
    inc_flat, inc_off = scored.incidence_csr()
    related = dag.related_matrix()
    rows = np.ascontiguousarray(data.rows)

    backends = [("python", _treescan_py.run_tree_scan)]
    try:
        from ._kernels import _treescan
        backends.append(("compiled", _treescan.run_tree_scan))
    except ImportError:
        pass

    def sweep(scan):
        return [scan(scored.edge_i, scored.edge_j, rows[r], related,
                     rel_flat, rel_off, inc_flat, inc_off, dag.n_features)
                for r in range(data.n_instances)]

    reference = sweep(backends[0][1])
    timings = []
    for name, scan in backends:
        got = sweep(scan)
        if any(not np.array_equal(a, b) for a, b in zip(reference, got)):
            print(f"error: backend {name} disagrees with python", file=sys.stderr)
            return 1
        best = min(
            _timed(sweep, scan) for _ in range(args.repeats)
        )
        timings.append((name, best))

    scale = data.n_instances
    print(f"tree scan over {scale} instances, {args.features} features, "
          f"{len(scored)} edges (best of {args.repeats})")
    base = timings[0][1]
    for name, seconds in timings:
        per = 1e6 * seconds / scale
        speedup = base / seconds
        print(f"  {name:<8} {seconds * 1e3:9.3f} ms total  {per:9.3f} us/instance  "
              f"x{speedup:.2f} vs python")
    return 0


def _timed(fn, *fn_args) -> float:
    start = time.perf_counter()
    fn(*fn_args)
    return time.perf_counter() - start


def _add_common_eval_flags(sub):
    sub.add_argument("--folds", type=int, default=10, help="cross-validation folds (default 10)")
    sub.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    sub.add_argument("--smoothing", type=float, default=1.0,
                     help="Laplace smoothing for the probability tables (default 1.0)")
    sub.add_argument("--positive-class", default=None,
                     help="class name to treat as positive (default: lexicographically last)")
    sub.add_argument("--root", choices=("random", "first"), default="random",
                     help="tree root policy: seeded draw or lowest index (default random)")
    sub.add_argument("--output", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hretan", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    validate = commands.add_parser("validate",
                                   help="check a dataset against its feature hierarchy")
    validate.add_argument("--data", required=True, help="dataset CSV path")
    validate.add_argument("--dag", default=None, help="hierarchy edge-list path")
    validate.add_argument("--positive-class", default=None)
    validate.add_argument("--repair", default=None, metavar="PATH",
                          help="also write a copy with 1s propagated to all ancestors")
    validate.set_defaults(func=cmd_validate)

    cv = commands.add_parser("cv", help="cross-validate one classifier")
    cv.add_argument("--data", required=True, help="dataset CSV path")
    cv.add_argument("--dag", default=None,
                    help="hierarchy edge-list path (omitted: flat hierarchy)")
    cv.add_argument("--classifier", choices=("tan", "hre-tan"), default="tan")
    _add_common_eval_flags(cv)
    cv.set_defaults(func=cmd_cv)

    compare = commands.add_parser("compare",
                                  help="compare hre-tan against tan across datasets")
    source = compare.add_mutually_exclusive_group(required=True)
    source.add_argument("--manifest", help="TSV of name, data path, dag path")
    source.add_argument("--stub-gmeans",
                        help="CSV of recorded per-dataset results to analyze instead of training")
    compare.add_argument("--format", choices=("json", "csv", "tsv-plot"), default="json")
    _add_common_eval_flags(compare)
    compare.set_defaults(func=cmd_compare)

    synth = commands.add_parser("synth", help="generate a seeded synthetic dataset + hierarchy")
    synth.add_argument("--out-data", required=True, help="dataset CSV to write")
    synth.add_argument("--out-dag", required=True, help="hierarchy edge list to write")
    synth.add_argument("--features", type=int, default=12)
    synth.add_argument("--dag-edges", type=int, default=14)
    synth.add_argument("--instances", type=int, default=120)
    synth.add_argument("--balance", type=float, default=0.3,
                       help="probability of the positive class (default 0.3)")
    synth.add_argument("--dependency", type=float, default=0.35,
                       help="feature coupling strength in [0, 1] (default 0.35)")
    synth.add_argument("--seed", type=int, default=0)
    synth.set_defaults(func=cmd_synth)

    bench = commands.add_parser("bench", help="time the tree-scan kernels")
    bench.add_argument("--features", type=int, default=60)
    bench.add_argument("--instances", type=int, default=200)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (HreTanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
