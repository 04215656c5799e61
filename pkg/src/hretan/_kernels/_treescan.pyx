# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree-scan kernel.

Same contract as ``_treescan_py.run_tree_scan``; this is the hot inner loop
of lazy classification (one full edge scan per test instance), so it runs as
plain C with the GIL released.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef int _find(int* parent, int x) noexcept nogil:
    cdef int root = x
    cdef int nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def run_tree_scan(int[::1] edge_i, int[::1] edge_j,
                  const unsigned char[::1] values,
                  const unsigned char[:, ::1] related,
                  int[::1] rel_flat, int[::1] rel_off,
                  int[::1] inc_flat, int[::1] inc_off,
                  int n_nodes):
    cdef Py_ssize_t n_edges = edge_i.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] status_arr = np.ones(n_edges, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] parent_arr = np.arange(n_nodes, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] rank_arr = np.zeros(n_nodes, dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] chosen_arr = np.empty(
        n_nodes - 1 if n_nodes > 0 else 0, dtype=np.int64)

    cdef unsigned char* status = <unsigned char*> cnp.PyArray_DATA(status_arr)
    cdef int* parent = <int*> cnp.PyArray_DATA(parent_arr)
    cdef int* rank = <int*> cnp.PyArray_DATA(rank_arr)
    cdef long long* chosen = <long long*> cnp.PyArray_DATA(chosen_arr)

    cdef Py_ssize_t pos, t, s
    cdef int i, j, ri, rj, g, h, n_chosen = 0
    cdef int endpoint
    with nogil:
        for pos in range(n_edges):
            if status[pos] == 0:
                continue
            i = edge_i[pos]
            j = edge_j[pos]
            if related[i, j] != 0 and values[i] == values[j]:
                continue
            ri = _find(parent, i)
            rj = _find(parent, j)
            if ri == rj:
                continue
            if rank[ri] < rank[rj]:
                ri, rj = rj, ri
            parent[rj] = ri
            if rank[ri] == rank[rj]:
                rank[ri] += 1
            chosen[n_chosen] = pos
            n_chosen += 1
            for endpoint in range(2):
                g = i if endpoint == 0 else j
                for t in range(rel_off[g], rel_off[g + 1]):
                    h = rel_flat[t]
                    if values[h] == values[g]:
                        for s in range(inc_off[h], inc_off[h + 1]):
                            status[inc_flat[s]] = 0
            if n_chosen == n_nodes - 1:
                break
    return chosen_arr[:n_chosen].copy()
