"""Shared fixtures: the worked 6-node example, recorded benchmark numbers,
random generators, and independent oracles (tree enumeration, joint-table
classification)."""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hretan import ScoredEdgeList, build_dag

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


# --- Worked 6-node example -------------------------------------------------
# Hierarchy paths: F->C->B, F->A->D, E->D (edges child -> parent).  For the
# instance below, (F, C) and (A, D) are the redundant pairs; the fixture edge
# ranking admits exactly F-A, F-B, B-E.

WALK_NAMES = ("F", "C", "B", "A", "D", "E")
WALK_EDGES = [("C", "F"), ("B", "C"), ("A", "F"), ("D", "A"), ("D", "E")]
WALK_VALUES = (1, 1, 0, 0, 0, 1)

# Descending-weight edge order: (F,A) first, the nine pairs touching C or D
# in ranks 2-10, then (F,B), (B,E), (B,A), (F,E), (E,A).
WALK_RANKING = [
    (0, 3),
    (0, 1), (1, 2), (1, 3), (1, 4), (1, 5),
    (0, 4), (2, 4), (3, 4), (4, 5),
    (0, 2), (2, 5), (2, 3), (0, 5), (3, 5),
]


@pytest.fixture
def walk_dag():
    return build_dag(WALK_NAMES, WALK_EDGES)


@pytest.fixture
def walk_edges():
    return make_edge_list(6, WALK_RANKING)


@pytest.fixture
def walk_instance():
    from hretan import Instance

    return Instance(values=np.asarray(WALK_VALUES, dtype=np.uint8))


def make_edge_list(n_features: int, ordered_pairs, weights=None) -> ScoredEdgeList:
    """Edge list with an explicit processing order (descending weights)."""
    if weights is None:
        weights = np.arange(len(ordered_pairs), 0, -1, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    assert all(a < b for a, b in ordered_pairs)
    assert all(weights[k] >= weights[k + 1] for k in range(len(weights) - 1))
    return ScoredEdgeList(
        n_features=n_features,
        edge_i=np.asarray([a for a, _ in ordered_pairs], dtype=np.int32),
        edge_j=np.asarray([b for _, b in ordered_pairs], dtype=np.int32),
        cmi=weights,
        status=np.ones(len(ordered_pairs), dtype=np.uint8),
    )


def edge_list_from_matrix(weight: np.ndarray) -> ScoredEdgeList:
    """Edge list for a symmetric weight matrix, sorted per the contract."""
    n = weight.shape[0]
    pi, pj, w = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            pi.append(i)
            pj.append(j)
            w.append(float(weight[i, j]))
    pi = np.asarray(pi, dtype=np.int32)
    pj = np.asarray(pj, dtype=np.int32)
    w = np.asarray(w, dtype=np.float64)
    order = np.lexsort((pj, pi, -w))
    return ScoredEdgeList(n_features=n, edge_i=pi[order], edge_j=pj[order],
                          cmi=w[order], status=np.ones(len(w), dtype=np.uint8))


def random_dag(rng: np.random.Generator, n_features: int, edge_prob: float = 0.3):
    """Random DAG: edges point from later to earlier in a hidden shuffle, so
    the relation is acyclic by construction."""
    names = tuple(f"n{i}" for i in range(n_features))
    order = rng.permutation(n_features)
    edges = []
    for later in range(n_features):
        for earlier in range(later):
            if rng.random() < edge_prob:
                edges.append((names[order[later]], names[order[earlier]]))
    return build_dag(names, edges)


# --- Independent oracles ----------------------------------------------------

def prufer_edges(seq, n: int):
    """Decode a Prufer sequence into the labelled tree's edge list."""
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def max_tree_weight(weight: np.ndarray) -> float:
    """Brute-force maximum spanning-tree weight via Prufer enumeration."""
    n = weight.shape[0]
    if n == 2:
        return float(weight[0, 1])
    best = -math.inf
    for seq in itertools.product(range(n), repeat=n - 2):
        total = sum(float(weight[a, b]) for a, b in prufer_edges(seq, n))
        best = max(best, total)
    return best


def enumeration_posterior(model, values) -> np.ndarray:
    """Posterior from the full joint table implied by the model's
    factorization, built cell by cell in probability space."""
    cpt = model.cpt
    tree = model.tree
    n = len(tree.features)
    k = len(cpt.prior)
    position = {f: idx for idx, f in enumerate(tree.features)}
    joint = np.zeros((2,) * n + (k,), dtype=np.float64)
    for assign in itertools.product((0, 1), repeat=n):
        for c in range(k):
            p = cpt.prior[c] * cpt.root_table[assign[position[tree.root]], c]
            for child, parent in tree.parent_of.items():
                p *= cpt.child_tables[child][assign[position[child]], assign[position[parent]], c]
            joint[assign + (c,)] = p
    assert abs(joint.sum() - 1.0) < 1e-9
    cell = joint[tuple(int(values[f]) for f in tree.features)]
    total = cell.sum()
    if total == 0.0:
        return np.full(k, 1.0 / k)
    return cell / total
