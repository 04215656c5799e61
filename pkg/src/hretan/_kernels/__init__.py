"""Kernel backend selection.

The compiled extension is preferred when it importable; the pure-Python twin
keeps the package fully functional without a build step.  Setting
``HRETAN_PURE_PYTHON=1`` forces the fallback (used by the benchmark and the
backend parity tests).
"""

import os

from . import _treescan_py

if os.environ.get("HRETAN_PURE_PYTHON"):
    _impl = _treescan_py
else:
    try:
        from . import _treescan as _impl
    except ImportError:
        _impl = _treescan_py

run_tree_scan = _impl.run_tree_scan
BACKEND = _impl.BACKEND

__all__ = ["run_tree_scan", "BACKEND"]
