"""Power-iteration kernel with a compiled core and a NumPy fallback.

The Cython extension is optional; when it has not been built (see
``setup.py build_ext --inplace``) the pure-Python implementation is used.
Both expose the same ``power_iterate`` signature and are interchangeable,
which ``benchmarks/bench_pagerank.py`` exercises side by side.
"""

from __future__ import annotations

try:
    from scholarank._kernels._pagerank_cy import power_iterate

    BACKEND = "cython"
except ImportError:  # extension not built; fall back to NumPy
    from scholarank._kernels._pagerank_py import power_iterate

    BACKEND = "python"

__all__ = ["power_iterate", "BACKEND"]
