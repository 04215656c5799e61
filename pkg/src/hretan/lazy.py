"""Lazy classification with hierarchical redundancy elimination.

A fresh feature tree is built for every test instance: edges are taken in
descending-CMI order and an edge is rejected when its endpoints are
redundancy partners for this instance (related in the hierarchy and carrying
the same value) or when it would close a cycle.  Whenever an edge is
accepted, every redundancy partner of either endpoint loses all of its
incident edges, so among partners the one reachable through the strongest
edge survives.

Edge scoring happens once per training set; per-instance state lives in
scratch arrays inside the kernel, so the master edge list is never mutated
and instances can be classified concurrently in any order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._kernels import run_tree_scan
from .dataset import Dataset, Instance, project, project_instance
from .errors import DimensionError, EmptyTreeSignal
from .estimation import ScoredEdgeList, class_prior, estimate_cpts, score_all_edges
from .hierarchy import FeatureDag
from .rng import instance_seed
from .tan import DirectedTree, PredictionResult, TanModel, choose_root, classify, direct_tree


def resolve_workers(n_jobs: int | None = None) -> int:
    """Worker count: explicit argument, else HRETAN_THREADS, else 1."""
    if n_jobs is not None:
        return max(1, n_jobs)
    env = os.environ.get("HRETAN_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _check_dims(dag: FeatureDag, edges: ScoredEdgeList, values: np.ndarray):
    if edges.n_features != dag.n_features:
        raise DimensionError(
            f"edge list covers {edges.n_features} features, hierarchy has {dag.n_features}"
        )
    if len(values) != dag.n_features:
        raise DimensionError(
            f"instance has {len(values)} values, hierarchy has {dag.n_features}"
        )


def hre_spanning_edges(dag: FeatureDag, edges: ScoredEdgeList, inst) -> list[tuple[int, int]]:
    """The undirected spanning edges chosen for one instance, in add order.

    ``inst`` may be an :class:`~hretan.dataset.Instance` or a plain value
    sequence.
    """
    values = np.ascontiguousarray(getattr(inst, "values", inst), dtype=np.uint8)
    _check_dims(dag, edges, values)
    rel_flat, rel_off = dag.related_csr()
    inc_flat, inc_off = edges.incidence_csr()
    chosen = run_tree_scan(
        edges.edge_i, edges.edge_j, values, dag.related_matrix(),
        rel_flat, rel_off, inc_flat, inc_off, dag.n_features,
    )
    return [(int(edges.edge_i[p]), int(edges.edge_j[p])) for p in chosen]


def hre_mst(dag: FeatureDag, edges: ScoredEdgeList, inst, root_seed: int,
            root_policy: str = "random") -> DirectedTree:
    """Redundancy-eliminated spanning tree for one instance, rooted and
    directed outward.  Raises :class:`EmptyTreeSignal` when no edge survives
    (every pair redundant for this instance); callers fall back to the class
    prior."""
    pairs = hre_spanning_edges(dag, edges, inst)
    if not pairs:
        raise EmptyTreeSignal("no admissible edge for this instance")
    vertices = set()
    for a, b in pairs:
        vertices.update((a, b))
    root = choose_root(vertices, root_seed, root_policy)
    return direct_tree(pairs, root, vertices=vertices)


def _model_for_tree(train: Dataset, tree: DirectedTree, smoothing: float,
                    cache: dict | None) -> tuple[TanModel, list[int]]:
    """Projected model for a tree expressed in original feature indices.

    Models depend only on (training set, directed tree), so identical trees
    hit the cache.
    """
    key = tree.canonical_key()
    if cache is not None and key in cache:
        return cache[key]
    kept = list(tree.features)
    position = {f: p for p, f in enumerate(kept)}
    local_tree = DirectedTree(
        features=tuple(range(len(kept))),
        root=position[tree.root],
        parent_of={position[c]: position[p] for c, p in tree.parent_of.items()},
    )
    train_p = project(train, kept)
    cpt = estimate_cpts(train_p, local_tree, smoothing)
    model = TanModel(tree=local_tree, cpt=cpt, feature_names=train_p.feature_names,
                     class_names=train_p.class_names)
    result = (model, kept)
    if cache is not None:
        cache[key] = result
    return result


def classify_lazy(train: Dataset, dag: FeatureDag, edges: ScoredEdgeList, inst,
                  root_seed: int, smoothing: float = 1.0, root_policy: str = "random",
                  cache: dict | None = None) -> tuple[PredictionResult, DirectedTree | None]:
    """Classify one instance with its own redundancy-eliminated tree.

    The training set and instance are narrowed to the tree's features before
    table estimation.  When no tree exists the posterior is the smoothed
    class prior alone and the returned tree is ``None``.
    """
    if not isinstance(inst, Instance):
        inst = Instance(values=np.asarray(inst, dtype=np.uint8))
    try:
        tree = hre_mst(dag, edges, inst, root_seed, root_policy)
    except EmptyTreeSignal:
        prior = class_prior(train, smoothing)
        return PredictionResult(label=int(np.argmax(prior)), posterior=prior), None
    model, kept = _model_for_tree(train, tree, smoothing, cache)
    inst_p = project_instance(inst, kept)
    return classify(model, inst_p), tree


def evaluate_hre_tan(train: Dataset, test: Dataset, dag: FeatureDag, seed: int,
                     smoothing: float = 1.0, root_policy: str = "random",
                     n_jobs: int | None = None) -> list[PredictionResult]:
    """Classify every test row lazily; edge scoring happens once.

    Each instance's root seed is derived from the base seed and the
    instance's content, so the output is a pure function of (train, test
    rows, dag, seed) independent of row order and worker count.
    """
    if test.n_features != train.n_features:
        raise DimensionError("train and test feature universes differ")
    if test.n_instances == 0:
        return []
    edges = score_all_edges(train)
    cache: dict = {}

    def one(row: int) -> PredictionResult:
        inst = test.instance(row)
        result, _ = classify_lazy(
            train, dag, edges, inst,
            root_seed=instance_seed(seed, inst.values),
            smoothing=smoothing, root_policy=root_policy, cache=cache,
        )
        return result

    workers = resolve_workers(n_jobs)
    rows = range(test.n_instances)
    if workers == 1:
        return [one(r) for r in rows]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, rows))
