"""The conventional tree-augmented classifier.

Structure learning is Kruskal's algorithm run over the descending-CMI edge
list with union-find cycle rejection, which yields a maximum-weight spanning
tree.  A root (random, seeded, or the lowest index) orients the tree, and
each feature's table conditions on its parent plus the class.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Instance
from .errors import ArgumentError, DimensionError, StructureError
from .estimation import Cpt, ScoredEdgeList, estimate_cpts, score_all_edges
from .rng import draw_index


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass
class DirectedTree:
    """A rooted feature tree: included features, root, and parent links."""

    features: tuple[int, ...]
    root: int
    parent_of: dict[int, int]

    def canonical_key(self):
        """Hashable identity of the directed tree; equal trees yield equal
        models, which the per-instance model cache relies on."""
        return (self.root, tuple(sorted(self.parent_of.items())))


@dataclass
class TanModel:
    tree: DirectedTree
    cpt: Cpt
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def to_dict(self) -> dict:
        """JSON-friendly dump (debugging aid, not a stable format)."""
        return {
            "root": self.tree.root,
            "edges": sorted((c, p) for c, p in self.tree.parent_of.items()),
            "features": list(self.tree.features),
            "feature_names": list(self.feature_names),
            "class_names": list(self.class_names),
            "prior": self.cpt.prior.tolist(),
            "root_table": self.cpt.root_table.tolist(),
            "child_tables": {str(f): t.tolist() for f, t in sorted(self.cpt.child_tables.items())},
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TanModel":
        tree = DirectedTree(
            features=tuple(payload["features"]),
            root=payload["root"],
            parent_of={c: p for c, p in payload["edges"]},
        )
        cpt = Cpt(
            prior=np.asarray(payload["prior"], dtype=np.float64),
            root=payload["root"],
            root_table=np.asarray(payload["root_table"], dtype=np.float64),
            child_tables={
                int(f): np.asarray(t, dtype=np.float64)
                for f, t in payload["child_tables"].items()
            },
        )
        return cls(
            tree=tree,
            cpt=cpt,
            feature_names=tuple(payload["feature_names"]),
            class_names=tuple(payload["class_names"]),
        )


@dataclass
class PredictionResult:
    """Predicted class index plus the normalized posterior."""

    label: int
    posterior: np.ndarray


def build_mst(edges: ScoredEdgeList, n_features: int) -> list[tuple[int, int]]:
    """Kruskal over the pre-sorted edge list.

    The list covers every pair, so the result always spans all
    ``n_features`` vertices with ``n_features - 1`` edges; equal-weight
    alternatives resolve to the lexicographically earliest tree because of
    the list's (i, j) tie-break.
    """
    uf = UnionFind(n_features)
    chosen: list[tuple[int, int]] = []
    for pos in range(len(edges)):
        i = int(edges.edge_i[pos])
        j = int(edges.edge_j[pos])
        if uf.union(i, j):
            chosen.append((i, j))
            if len(chosen) == n_features - 1:
                break
    return chosen


def direct_tree(edge_pairs, root: int, vertices=None) -> DirectedTree:
    """Orient an undirected tree away from ``root`` (breadth-first)."""
    if vertices is None:
        vertices = set()
        for a, b in edge_pairs:
            vertices.add(a)
            vertices.add(b)
        vertices.add(root)
    else:
        vertices = set(vertices)
    if root not in vertices:
        raise StructureError(f"root {root} is not a vertex of the tree")

    neighbors: dict[int, list[int]] = {v: [] for v in vertices}
    for a, b in edge_pairs:
        neighbors[a].append(b)
        neighbors[b].append(a)

    parent_of: dict[int, int] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for nxt in sorted(neighbors[node]):
            if nxt not in seen:
                seen.add(nxt)
                parent_of[nxt] = node
                queue.append(nxt)
    if len(seen) != len(vertices):
        raise StructureError("edge pairs do not form a connected tree")
    return DirectedTree(features=tuple(sorted(vertices)), root=root, parent_of=parent_of)


def choose_root(candidates, seed: int, policy: str = "random") -> int:
    """Pick a root from sorted candidate vertices.

    ``random`` draws via SplitMix64 from the given seed; ``first`` takes the
    lowest feature index (useful for bit-exact cross-checks).
    """
    ordered = sorted(candidates)
    if not ordered:
        raise ArgumentError("no candidate vertices for the root")
    if policy == "first":
        return ordered[0]
    if policy == "random":
        return ordered[draw_index(seed, len(ordered))]
    raise ArgumentError(f"unknown root policy {policy!r}")


def fit_tan(train: Dataset, root_seed: int, smoothing: float = 1.0,
            root_policy: str = "random") -> TanModel:
    """Score all edges, build the spanning tree, root it, estimate tables."""
    if train.n_features < 2:
        raise ArgumentError("TAN needs at least 2 features")
    edges = score_all_edges(train)
    und = build_mst(edges, train.n_features)
    root = choose_root(range(train.n_features), root_seed, root_policy)
    tree = direct_tree(und, root, vertices=range(train.n_features))
    cpt = estimate_cpts(train, tree, smoothing)
    return TanModel(tree=tree, cpt=cpt, feature_names=train.feature_names,
                    class_names=train.class_names)


def _log(p: float) -> float:
    return math.log(p) if p > 0.0 else -math.inf


def classify(model: TanModel, inst: Instance) -> PredictionResult:
    """Posterior over classes for one instance, accumulated in log space.

    posterior(c) is proportional to
    P(c) * P(x_root | c) * prod over non-root features of P(x | parent, c);
    argmax ties resolve to the lowest class index.  ``inst`` may be an
    :class:`~hretan.dataset.Instance` or a plain value sequence.
    """
    values = getattr(inst, "values", inst)
    if len(values) != len(model.feature_names):
        raise DimensionError(
            f"instance has {len(values)} values, model expects {len(model.feature_names)}"
        )
    cpt = model.cpt
    k = len(cpt.prior)
    logp = np.empty(k, dtype=np.float64)
    for c in range(k):
        logp[c] = _log(cpt.prior[c]) + _log(cpt.root_table[values[cpt.root], c])
    for child, table in cpt.child_tables.items():
        v = values[child]
        u = values[model.tree.parent_of[child]]
        for c in range(k):
            logp[c] += _log(table[v, u, c])

    top = logp.max()
    if top == -math.inf:
        posterior = np.full(k, 1.0 / k)
    else:
        unnorm = np.exp(logp - top)
        posterior = unnorm / unnorm.sum()
    return PredictionResult(label=int(np.argmax(posterior)), posterior=posterior)
