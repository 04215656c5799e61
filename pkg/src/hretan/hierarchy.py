"""Feature hierarchy: a DAG over dataset columns with precomputed closures.

Edges point child -> parent, the parent being the more generic term (the
orientation used by "is-a" style gene-function vocabularies).  Ancestor and
descendant closures are materialized at build time because redundancy queries
sit inside the per-edge loop of the lazy spanning-tree construction and must
be O(1)-ish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CycleError, DimensionError, DuplicateFeatureError, ParseError, UnknownFeatureError


@dataclass
class FeatureDag:
    """Immutable feature hierarchy with transitive closures.

    ``parent_lists[i]`` holds the direct parents of feature ``i``;
    ``ancestor_closure[i]`` / ``descendant_closure[i]`` hold all transitive
    ancestors / descendants, excluding ``i`` itself.
    """

    n_features: int
    feature_names: tuple[str, ...]
    parent_lists: tuple[frozenset[int], ...]
    ancestor_closure: tuple[frozenset[int], ...]
    descendant_closure: tuple[frozenset[int], ...]

    # Derived, kernel-friendly views built on first use.  Idempotent to
    # rebuild, so concurrent readers are safe.
    _related_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def related(self, i: int) -> frozenset[int]:
        """Ancestors and descendants of ``i`` (the redundancy partners)."""
        return self.ancestor_closure[i] | self.descendant_closure[i]

    def related_matrix(self) -> np.ndarray:
        """Boolean (n, n) matrix: entry [i, j] is 1 iff i and j are related."""
        cached = self._related_cache.get("matrix")
        if cached is None:
            n = self.n_features
            cached = np.zeros((n, n), dtype=np.uint8)
            for i in range(n):
                for a in self.ancestor_closure[i]:
                    cached[i, a] = 1
                    cached[a, i] = 1
            self._related_cache["matrix"] = cached
        return cached

    def related_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened per-node lists of related nodes: ``(flat, offsets)``.

        ``flat[offsets[i]:offsets[i + 1]]`` are the related nodes of ``i``,
        sorted ascending.
        """
        cached = self._related_cache.get("csr")
        if cached is None:
            flat: list[int] = []
            offsets = np.zeros(self.n_features + 1, dtype=np.int32)
            for i in range(self.n_features):
                rel = sorted(self.related(i))
                flat.extend(rel)
                offsets[i + 1] = len(flat)
            cached = (np.asarray(flat, dtype=np.int32), offsets)
            self._related_cache["csr"] = cached
        return cached


def build_dag(feature_names, edges) -> FeatureDag:
    """Build a :class:`FeatureDag` from ``(child_name, parent_name)`` pairs.

    Raises :class:`DuplicateFeatureError` for repeated names,
    :class:`UnknownFeatureError` for an edge name outside ``feature_names``
    and :class:`CycleError` (naming one offending cycle) if the parent
    relation is cyclic.  An empty edge list yields empty closures.
    """
    names = tuple(feature_names)
    index = {}
    for pos, name in enumerate(names):
        if name in index:
            raise DuplicateFeatureError(f"duplicate feature name {name!r}")
        index[name] = pos
    n = len(names)

    parents: list[set[int]] = [set() for _ in range(n)]
    for child, parent in edges:
        for name in (child, parent):
            if name not in index:
                raise UnknownFeatureError(f"edge references unknown feature {name!r}")
        parents[index[child]].add(index[parent])

    ancestors = _ancestor_closures(parents, names)
    descendants: list[set[int]] = [set() for _ in range(n)]
    for i, anc in enumerate(ancestors):
        for a in anc:
            descendants[a].add(i)

    return FeatureDag(
        n_features=n,
        feature_names=names,
        parent_lists=tuple(frozenset(p) for p in parents),
        ancestor_closure=tuple(frozenset(a) for a in ancestors),
        descendant_closure=tuple(frozenset(d) for d in descendants),
    )


def _ancestor_closures(parents, names) -> list[set[int]]:
    """Memoized iterative DFS over the parent relation; detects cycles."""
    n = len(parents)
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * n
    closure: list[set[int]] = [set() for _ in range(n)]

    for start in range(n):
        if color[start] == BLACK:
            continue
        # Stack entries are (node, iterator over its parents).
        stack = [(start, iter(sorted(parents[start])))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for p in it:
                if color[p] == GREY:
                    cycle = [p] + [s for s, _ in reversed(stack)]
                    cycle = cycle[: cycle.index(p, 1) + 1]
                    path = " -> ".join(names[c] for c in cycle)
                    raise CycleError(f"hierarchy contains a cycle: {path}")
                if color[p] == WHITE:
                    color[p] = GREY
                    stack.append((p, iter(sorted(parents[p]))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                color[node] = BLACK
                for p in parents[node]:
                    closure[node].add(p)
                    closure[node] |= closure[p]
    return closure


def parse_dag_edges(text: str, feature_names) -> FeatureDag:
    """Parse the tab-separated edge-list format into a :class:`FeatureDag`.

    One ``child<TAB>parent`` pair per line; ``#`` starts a comment, blank
    lines are skipped.  The feature universe is ``feature_names`` (normally
    the dataset header); any other name in the file is an error.
    """
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'child<TAB>parent'", line=lineno)
        child, parent = parts[0].strip(), parts[1].strip()
        if not child or not parent:
            raise ParseError("empty feature name in edge", line=lineno)
        edges.append((child, parent))
    return build_dag(feature_names, edges)


def is_hierarchically_redundant(dag: FeatureDag, i: int, j: int, inst) -> bool:
    """True iff ``i`` and ``j`` are related in the DAG and share the same
    value in ``inst``.

    ``inst`` may be an :class:`~hretan.dataset.Instance` or a plain value
    sequence.  Symmetric in ``(i, j)``.
    """
    n = dag.n_features
    if i == j or not (0 <= i < n) or not (0 <= j < n):
        raise IndexError(f"invalid feature pair ({i}, {j}) for {n} features")
    values = getattr(inst, "values", inst)
    if j not in dag.ancestor_closure[i] and j not in dag.descendant_closure[i]:
        return False
    return bool(values[i] == values[j])


def validate_true_path(dag: FeatureDag, data) -> list[tuple[int, int, int]]:
    """Find annotations that violate upward propagation.

    Returns every ``(row, feature, ancestor)`` where the feature is 1 but the
    ancestor is 0.  An empty list means the data is hierarchy-consistent.
    """
    if data.n_features != dag.n_features:
        raise DimensionError(
            f"dataset has {data.n_features} columns, hierarchy has {dag.n_features}"
        )
    rows = data.rows
    violations = []
    for i in range(dag.n_features):
        ancestors = sorted(dag.ancestor_closure[i])
        if not ancestors:
            continue
        on = rows[:, i] == 1
        if not on.any():
            continue
        for a in ancestors:
            bad = np.nonzero(on & (rows[:, a] == 0))[0]
            violations.extend((int(r), i, a) for r in bad)
    violations.sort()
    return violations


def repair_true_path(dag: FeatureDag, data):
    """Return a copy of ``data`` with 1s propagated up to all ancestors."""
    from .dataset import Dataset

    if data.n_features != dag.n_features:
        raise DimensionError(
            f"dataset has {data.n_features} columns, hierarchy has {dag.n_features}"
        )
    rows = data.rows.copy()
    for i in range(dag.n_features):
        ancestors = sorted(dag.ancestor_closure[i])
        if not ancestors:
            continue
        on = rows[:, i] == 1
        for a in ancestors:
            rows[on, a] = 1
    return Dataset(
        feature_names=data.feature_names,
        rows=rows,
        labels=data.labels.copy(),
        class_names=data.class_names,
    )
