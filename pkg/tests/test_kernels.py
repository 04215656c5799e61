"""Parity between the compiled tree-scan kernel and its pure-Python twin,
plus backend selection."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

import hretan
from conftest import (
    WALK_EDGES,
    WALK_NAMES,
    WALK_RANKING,
    WALK_VALUES,
    edge_list_from_matrix,
    make_edge_list,
    random_dag,
)
from hretan import build_dag, score_all_edges, synthesize
from hretan._kernels import _treescan_py


def kernel_inputs(dag, edges, values):
    rel_flat, rel_off = dag.related_csr()
    inc_flat, inc_off = edges.incidence_csr()
    return (edges.edge_i, edges.edge_j,
            np.ascontiguousarray(values, dtype=np.uint8), dag.related_matrix(),
            rel_flat, rel_off, inc_flat, inc_off, dag.n_features)


def test_backend_name_is_known():
    assert hretan.kernel_backend in ("compiled", "python")
    assert _treescan_py.BACKEND == "python"


def test_compiled_backend_identifies_itself():
    compiled = pytest.importorskip("hretan._kernels._treescan")
    assert compiled.BACKEND == "compiled"


def test_walkthrough_parity():
    compiled = pytest.importorskip("hretan._kernels._treescan")
    dag = build_dag(WALK_NAMES, WALK_EDGES)
    edges = make_edge_list(6, WALK_RANKING)
    args = kernel_inputs(dag, edges, np.asarray(WALK_VALUES, dtype=np.uint8))
    expected = _treescan_py.run_tree_scan(*args)
    assert np.array_equal(compiled.run_tree_scan(*args), expected)
    assert expected.dtype == np.int64


def test_backend_parity_fuzz():
    compiled = pytest.importorskip("hretan._kernels._treescan")
    rng = np.random.default_rng(99)
    for _ in range(300):
        n = int(rng.integers(2, 10))
        dag = random_dag(rng, n, edge_prob=float(rng.uniform(0.1, 0.6)))
        weights = rng.normal(size=(n, n))
        edges = edge_list_from_matrix(weights + weights.T)
        values = rng.integers(0, 2, size=n, dtype=np.uint8)
        args = kernel_inputs(dag, edges, values)
        assert np.array_equal(compiled.run_tree_scan(*args),
                              _treescan_py.run_tree_scan(*args))


def test_backend_parity_on_scored_data():
    # same check on CMI-scored edges from a real dataset rather than random
    # weights, which exercises tie handling in the shared ordering
    compiled = pytest.importorskip("hretan._kernels._treescan")
    rng = np.random.default_rng(13)
    for trial in range(10):
        dag = random_dag(rng, 7, edge_prob=0.4)
        data = synthesize(dag, 40, 0.4, 0.5, seed=trial)
        edges = score_all_edges(data)
        for row in range(0, data.n_instances, 8):
            args = kernel_inputs(dag, edges, data.rows[row])
            assert np.array_equal(compiled.run_tree_scan(*args),
                                  _treescan_py.run_tree_scan(*args))


def run_backend_probe(env_extra):
    env = dict(os.environ)
    env.pop("HRETAN_PURE_PYTHON", None)
    env.update(env_extra)
    probe = "import hretan; print(hretan.kernel_backend)"
    return subprocess.run([sys.executable, "-c", probe], env=env,
                          capture_output=True, text=True, check=True).stdout.strip()


def test_env_var_forces_pure_backend():
    assert run_backend_probe({"HRETAN_PURE_PYTHON": "1"}) == "python"


def test_default_backend_prefers_compiled():
    try:
        import hretan._kernels._treescan  # noqa: F401
    except ImportError:
        pytest.skip("compiled extension not built")
    assert run_backend_probe({}) == "compiled"
