"""Pure-Python twin of the compiled tree-scan kernel.

Semantics must match ``_treescan.pyx`` exactly; the parity test suite runs
both on fuzzed inputs and compares chosen edge positions element-wise.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def run_tree_scan(edge_i, edge_j, values, related, rel_flat, rel_off,
                  inc_flat, inc_off, n_nodes):
    """Greedy scan over a descending-weight edge list with redundancy pruning.

    Edges are visited in list order.  An edge enters the tree when it is
    still available, its endpoints are not redundancy partners (related in
    the hierarchy with equal instance values), and it joins two distinct
    components.  After an edge enters, every partner of either endpoint has
    all of its incident edges marked unavailable, which permanently excludes
    that partner node.

    Returns an int64 array of chosen edge positions in add order.
    """
    n_edges = len(edge_i)
    status = np.ones(n_edges, dtype=np.uint8)
    parent = list(range(n_nodes))
    rank = [0] * n_nodes
    chosen: list[int] = []

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for pos in range(n_edges):
        if not status[pos]:
            continue
        i = int(edge_i[pos])
        j = int(edge_j[pos])
        if related[i, j] and values[i] == values[j]:
            continue
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        if rank[ri] < rank[rj]:
            ri, rj = rj, ri
        parent[rj] = ri
        if rank[ri] == rank[rj]:
            rank[ri] += 1
        chosen.append(pos)
        for g in (i, j):
            for t in range(rel_off[g], rel_off[g + 1]):
                h = int(rel_flat[t])
                if values[h] == values[g]:
                    for s in range(inc_off[h], inc_off[h + 1]):
                        status[inc_flat[s]] = 0
        if len(chosen) == n_nodes - 1:
            break
    return np.asarray(chosen, dtype=np.int64)
