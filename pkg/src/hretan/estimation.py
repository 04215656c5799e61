"""Probability estimation from binary training data.

Conventions that downstream structure learning depends on:

* Conditional mutual information uses raw (unsmoothed) relative frequencies,
  the natural logarithm, and the 0*log(0) = 0 convention; values within 1e-12
  below zero are clamped to 0.  Smoothing the counts would perturb the edge
  ranking that drives spanning-tree construction.
* Conditional probability tables use Laplace smoothing (add-``smoothing`` per
  conditional distribution) so classification tolerates unseen combinations.
* A class absent from the training stratum gets smoothed prior mass and
  uniform CPT rows, which keeps heavily imbalanced folds well-defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ArgumentError, StructureError

_CLAMP_EPS = 1e-12


@dataclass
class ScoredEdge:
    """One undirected feature pair in canonical ``i < j`` form."""

    i: int
    j: int
    cmi: float


@dataclass
class ScoredEdgeList:
    """Every unordered feature pair, sorted by descending CMI.

    Ties are broken by ascending ``(i, j)`` so the processing order, and with
    it every tree built from this list, is deterministic.  ``status`` holds
    the master Available flags (1 = available); per-instance passes work on
    scratch copies and never mutate it.
    """

    n_features: int
    edge_i: np.ndarray        # int32, descending-CMI order
    edge_j: np.ndarray        # int32
    cmi: np.ndarray           # float64
    status: np.ndarray        # uint8, all 1 on the master list

    _incidence_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.edge_i)

    def __getitem__(self, pos: int) -> ScoredEdge:
        return ScoredEdge(int(self.edge_i[pos]), int(self.edge_j[pos]), float(self.cmi[pos]))

    def incidence_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge positions incident to each node: ``(flat, offsets)``.

        Positions index this list's processing order; built once and cached
        since it only depends on the (immutable) pair layout.
        """
        cached = self._incidence_cache.get("csr")
        if cached is None:
            counts = np.zeros(self.n_features, dtype=np.int64)
            np.add.at(counts, self.edge_i, 1)
            np.add.at(counts, self.edge_j, 1)
            offsets = np.zeros(self.n_features + 1, dtype=np.int32)
            np.cumsum(counts, out=offsets[1:])
            flat = np.empty(offsets[-1], dtype=np.int32)
            cursor = offsets[:-1].copy()
            for pos in range(len(self.edge_i)):
                for node in (self.edge_i[pos], self.edge_j[pos]):
                    flat[cursor[node]] = pos
                    cursor[node] += 1
            cached = (flat, offsets)
            self._incidence_cache["csr"] = cached
        return cached


@dataclass
class Cpt:
    """Parameters of a feature tree: class prior, one marginal table for the
    root and one conditional table per non-root feature.

    ``root_table[v, c]`` is P(root = v | c); ``child_tables[x][v, u, c]`` is
    P(x = v | parent(x) = u, c).
    """

    prior: np.ndarray                     # (n_classes,)
    root: int
    root_table: np.ndarray                # (2, n_classes)
    child_tables: dict[int, np.ndarray]   # feature -> (2, 2, n_classes)


def class_prior(train: Dataset, smoothing: float) -> np.ndarray:
    """P(c) = (count(c) + smoothing) / (N + smoothing * n_classes)."""
    counts = np.bincount(train.labels, minlength=train.n_classes).astype(np.float64)
    total = counts.sum() + smoothing * train.n_classes
    if total == 0:
        return np.full(train.n_classes, 1.0 / train.n_classes)
    return (counts + smoothing) / total


def _pair_counts(train: Dataset, i: int, j: int) -> np.ndarray:
    """Joint counts n[v_i, v_j, c] as a (2, 2, n_classes) int64 array."""
    code = (train.rows[:, i].astype(np.int64) * 2 + train.rows[:, j]) * train.n_classes + train.labels
    return np.bincount(code, minlength=4 * train.n_classes).reshape(2, 2, train.n_classes)


def _cmi_from_counts(counts: np.ndarray) -> float:
    """CMI from integer joint counts; shared by the scalar and all-pairs paths
    so equal counts always produce bit-identical values."""
    total = int(counts.sum())
    n_classes = counts.shape[2]
    value = 0.0
    for c in range(n_classes):
        n_c = int(counts[:, :, c].sum())
        if n_c == 0:
            continue
        row = counts[:, :, c].sum(axis=1)   # counts of x_i = v within class c
        col = counts[:, :, c].sum(axis=0)
        for vi in range(2):
            for vj in range(2):
                n_ij = int(counts[vi, vj, c])
                if n_ij == 0:
                    continue
                # p(vi,vj,c) * log[ p(vi,vj|c) / (p(vi|c) p(vj|c)) ]
                value += (n_ij / total) * math.log(n_ij * n_c / (row[vi] * col[vj]))
    if value < 0.0:
        value = 0.0 if value > -_CLAMP_EPS else value
    return value


def conditional_mutual_information(train: Dataset, i: int, j: int) -> float:
    """I(X_i; X_j | C) from unsmoothed relative frequencies, natural log.

    Computed on the canonical ``(min, max)`` ordering so the result is
    exactly symmetric in ``(i, j)``.
    """
    n = train.n_features
    if i == j or not (0 <= i < n) or not (0 <= j < n):
        raise IndexError(f"invalid feature pair ({i}, {j}) for {n} features")
    a, b = (i, j) if i < j else (j, i)
    return _cmi_from_counts(_pair_counts(train, a, b))


def _all_pair_counts(train: Dataset) -> np.ndarray:
    """Joint counts for every pair at once: (n, n, 2, 2, n_classes) int64.

    Per class, the four cell counts come from one matrix product over the
    0/1 columns; products of 0/1 values sum exactly in float64, so the counts
    are identical to per-pair counting bit for bit.
    """
    n = train.n_features
    k = train.n_classes
    out = np.zeros((n, n, 2, 2, k), dtype=np.int64)
    x = train.rows.astype(np.float64)
    for c in range(k):
        xc = x[train.labels == c]
        n_c = xc.shape[0]
        ones = xc.T @ xc                    # n11
        col = xc.sum(axis=0)
        n10 = col[:, None] - ones           # x_i = 1, x_j = 0
        n01 = col[None, :] - ones
        n00 = n_c - ones - n10 - n01
        out[:, :, 0, 0, c] = n00.astype(np.int64)
        out[:, :, 0, 1, c] = n01.astype(np.int64)
        out[:, :, 1, 0, c] = n10.astype(np.int64)
        out[:, :, 1, 1, c] = ones.astype(np.int64)
    return out


def score_all_edges(train: Dataset) -> ScoredEdgeList:
    """CMI for all n(n-1)/2 pairs, sorted descending with (i, j) tie-break."""
    n = train.n_features
    if n < 2:
        raise ArgumentError("edge scoring needs at least 2 features")
    counts = _all_pair_counts(train)
    pairs_i, pairs_j, values = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            pairs_i.append(i)
            pairs_j.append(j)
            values.append(_cmi_from_counts(counts[i, j]))
    pairs_i = np.asarray(pairs_i, dtype=np.int32)
    pairs_j = np.asarray(pairs_j, dtype=np.int32)
    values = np.asarray(values, dtype=np.float64)
    order = np.lexsort((pairs_j, pairs_i, -values))
    return ScoredEdgeList(
        n_features=n,
        edge_i=pairs_i[order],
        edge_j=pairs_j[order],
        cmi=values[order],
        status=np.ones(len(order), dtype=np.uint8),
    )


def _smoothed_rows(counts: np.ndarray, smoothing: float) -> np.ndarray:
    """Normalize count columns (axis 0 = child value) with add-``smoothing``;
    an all-zero context becomes uniform even at smoothing 0."""
    counts = counts.astype(np.float64) + smoothing
    denom = counts.sum(axis=0, keepdims=True)
    uniform = 1.0 / counts.shape[0]
    with np.errstate(invalid="ignore", divide="ignore"):
        table = np.where(denom > 0, counts / np.where(denom > 0, denom, 1.0), uniform)
    return table


def estimate_cpts(train: Dataset, tree, smoothing: float) -> Cpt:
    """Tables for a directed feature tree: P(x_root | c) for the root and
    P(x | parent(x), c) for every other tree feature."""
    n = train.n_features
    for f in tree.features:
        if not (0 <= f < n):
            raise StructureError(f"tree references unknown feature {f}")
    k = train.n_classes
    labels = train.labels

    code = train.rows[:, tree.root].astype(np.int64) * k + labels
    root_counts = np.bincount(code, minlength=2 * k).reshape(2, k)
    root_table = _smoothed_rows(root_counts, smoothing)

    child_tables: dict[int, np.ndarray] = {}
    for child, parent in sorted(tree.parent_of.items()):
        code = (train.rows[:, child].astype(np.int64) * 2 + train.rows[:, parent]) * k + labels
        counts = np.bincount(code, minlength=4 * k).reshape(2, 2, k)
        child_tables[child] = _smoothed_rows(counts, smoothing)

    return Cpt(
        prior=class_prior(train, smoothing),
        root=tree.root,
        root_table=root_table,
        child_tables=child_tables,
    )
