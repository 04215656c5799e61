"""Binary-feature classification datasets: ingest, split, project, synthesize.

File format: UTF-8 CSV, header row first, feature columns holding ``0``/``1``,
final column the class label string.  Names may not contain commas, so no
quoting is needed and round-trips are byte-exact.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DimensionError, ParseError


@dataclass
class Dataset:
    """An immutable binary feature matrix with integer class labels.

    Class index 0 is the negative class and index 1 the positive class for
    two-class data; a k-class layout is allowed internally.
    """

    feature_names: tuple[str, ...]
    rows: np.ndarray          # (n_instances, n_features) uint8 in {0, 1}
    labels: np.ndarray        # (n_instances,) int64, values < len(class_names)
    class_names: tuple[str, ...]

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        # Zero rows are allowed in memory (an evaluation split can be empty);
        # the parser still rejects instance-free files.
        if self.rows.ndim != 2 or self.rows.shape[1] < 1:
            raise ArgumentError("dataset needs at least 1 feature")
        if self.rows.shape[1] != len(self.feature_names):
            raise DimensionError("row width does not match feature names")
        if self.rows.shape[0] != len(self.labels):
            raise DimensionError("label count does not match row count")
        if self.rows.max(initial=0) > 1:
            raise ArgumentError("feature values must be 0 or 1")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise ArgumentError("label index out of range")

    @property
    def n_instances(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def instance(self, row: int) -> "Instance":
        return Instance(values=self.rows[row])


@dataclass
class Instance:
    """A single row of binary feature values, index-aligned with the columns."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.uint8)
        if self.values.ndim != 1 or self.values.max(initial=0) > 1:
            raise ArgumentError("instance values must be a flat 0/1 sequence")


@dataclass
class FoldSplit:
    """Fold id per row index, stratified so per-class counts differ by <= 1."""

    assignments: np.ndarray   # (n_instances,) int64 in [0, k)
    k: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignments == fold)[0]

    def train_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignments != fold)[0]


def parse_dataset(text, positive_class: str | None = None) -> Dataset:
    """Parse the CSV dataset format; ``text`` is a string or text stream.

    The last header column names the class; the remaining columns are
    features.  For two-class data the lexicographically first class name maps
    to index 0 unless ``positive_class`` forces that name to index 1.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    lines = text.read().splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty header", line=1)
    header = lines[0].split(",")
    if len(header) < 2:
        raise ParseError("header must name at least one feature and the class column", line=1)
    feature_names = tuple(h.strip() for h in header[:-1])
    n_feat = len(feature_names)

    rows, raw_labels = [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != n_feat + 1:
            raise ParseError(f"expected {n_feat + 1} columns, found {len(parts)}", line=lineno)
        values = []
        for col, cell in enumerate(parts[:-1]):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ParseError(
                    f"feature {feature_names[col]!r} must be 0 or 1, found {cell!r}", line=lineno
                )
            values.append(int(cell))
        label = parts[-1].strip()
        if not label:
            raise ParseError("missing class label", line=lineno)
        rows.append(values)
        raw_labels.append(label)
    if not rows:
        raise ParseError("no instances after the header", line=len(lines))

    class_names = sorted(set(raw_labels))
    if positive_class is not None:
        if positive_class not in class_names:
            raise ParseError(f"positive class {positive_class!r} not present in data")
        if len(class_names) != 2:
            raise ParseError("--positive-class requires exactly two classes")
        class_names = [c for c in class_names if c != positive_class] + [positive_class]
    index = {c: k for k, c in enumerate(class_names)}
    return Dataset(
        feature_names=feature_names,
        rows=np.asarray(rows, dtype=np.uint8),
        labels=np.asarray([index[lab] for lab in raw_labels], dtype=np.int64),
        class_names=tuple(class_names),
    )


def serialize_dataset(data: Dataset) -> str:
    """Inverse of :func:`parse_dataset`; LF line endings, no quoting."""
    out = [",".join(data.feature_names) + ",class"]
    for row, label in zip(data.rows, data.labels):
        out.append(",".join(str(int(v)) for v in row) + "," + data.class_names[label])
    return "\n".join(out) + "\n"


def stratified_kfold(data: Dataset, k: int, seed: int) -> FoldSplit:
    """Deterministic stratified fold assignment.

    Per class, row indices are shuffled with ``numpy.random.default_rng(seed)``
    and dealt round-robin into folds; each class starts dealing where the
    previous one stopped, so fold sizes stay balanced and classes with fewer
    than ``k`` members spread over distinct folds.
    """
    if k < 2 or k > data.n_instances:
        raise ArgumentError(f"k must be in [2, {data.n_instances}], got {k}")
    rng = np.random.default_rng(seed)
    assignments = np.empty(data.n_instances, dtype=np.int64)
    offset = 0
    for c in range(data.n_classes):
        members = np.nonzero(data.labels == c)[0]
        rng.shuffle(members)
        for pos, row in enumerate(members):
            assignments[row] = (offset + pos) % k
        offset = (offset + len(members)) % k
    return FoldSplit(assignments=assignments, k=k)


def project(data: Dataset, kept) -> Dataset:
    """Restrict columns to ``kept`` (a duplicate-free index sequence), in the
    given order.  Labels are untouched; the original dataset is not modified.
    """
    kept = list(kept)
    if not kept:
        raise IndexError("cannot project to zero features")
    if len(set(kept)) != len(kept):
        raise IndexError("duplicate indices in projection")
    for idx in kept:
        if not (0 <= idx < data.n_features):
            raise IndexError(f"feature index {idx} out of range")
    return Dataset(
        feature_names=tuple(data.feature_names[i] for i in kept),
        rows=data.rows[:, kept].copy(),
        labels=data.labels.copy(),
        class_names=data.class_names,
    )


def project_instance(inst: Instance, kept) -> Instance:
    kept = list(kept)
    if not kept:
        raise IndexError("cannot project to zero features")
    if len(set(kept)) != len(kept):
        raise IndexError("duplicate indices in projection")
    for idx in kept:
        if not (0 <= idx < len(inst.values)):
            raise IndexError(f"feature index {idx} out of range")
    return Instance(values=inst.values[kept].copy())


def synthesize(dag, n_instances: int, class_balance: float, dependency_strength: float,
               seed: int, class_names=("anti", "pro")) -> Dataset:
    """Generate a hierarchy-consistent dataset over the features of ``dag``.

    Labels are Bernoulli(``class_balance``) draws (probability of the
    positive class).  Each feature gets a class-conditional activation
    probability drawn once per (feature, class); activation indicators are
    sampled per instance and then propagated to all ancestors, so every row
    satisfies upward propagation by construction.  ``dependency_strength``
    couples consecutive features: with probability d a feature copies the
    previous feature's indicator instead of sampling fresh, so 0 means
    class-conditional independence of the indicators.
    """
    if n_instances < 1:
        raise ArgumentError("n_instances must be >= 1")
    if not (0.0 < class_balance < 1.0):
        raise ArgumentError("class_balance must be strictly between 0 and 1")
    if not (0.0 <= dependency_strength <= 1.0):
        raise ArgumentError("dependency_strength must be in [0, 1]")

    rng = np.random.default_rng(seed)
    n = dag.n_features
    theta = rng.uniform(0.1, 0.9, size=(n, 2))

    labels = (rng.random(n_instances) < class_balance).astype(np.int64)
    base = rng.random((n_instances, n))
    copy_mask = rng.random((n_instances, n)) < dependency_strength

    rows = np.zeros((n_instances, n), dtype=np.uint8)
    active = np.zeros((n_instances, n), dtype=np.uint8)
    for f in range(n):
        fresh = (base[:, f] < theta[f, labels]).astype(np.uint8)
        if f == 0:
            active[:, f] = fresh
        else:
            active[:, f] = np.where(copy_mask[:, f], active[:, f - 1], fresh)
    for f in range(n):
        on = active[:, f] == 1
        if not on.any():
            continue
        rows[on, f] = 1
        for a in sorted(dag.ancestor_closure[f]):
            rows[on, a] = 1

    # Guarantee both classes appear so the dataset is usable downstream.
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    return Dataset(
        feature_names=dag.feature_names,
        rows=rows,
        labels=labels,
        class_names=tuple(class_names),
    )
