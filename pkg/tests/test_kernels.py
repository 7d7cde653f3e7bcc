"""Backend-equivalence checks for the score-propagation kernel."""

from __future__ import annotations

import random

import numpy as np
import pytest

from scholarank._kernels import BACKEND
from scholarank._kernels._pagerank_py import power_iterate as py_iterate

cy_kernel = pytest.importorskip(
    "scholarank._kernels._pagerank_cy", reason="compiled kernel not built"
)


def random_csr(n, avg_degree, rng):
    neighbors = {i: set() for i in range(n)}
    for _ in range(int(n * avg_degree / 2)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            neighbors[a].add(b)
            neighbors[b].add(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    for i in range(n):
        row = sorted(neighbors[i])
        indices.extend(row)
        indptr[i + 1] = indptr[i] + len(row)
    return indptr, np.array(indices, dtype=np.int64)


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.5, 0.85])
def test_backends_agree(theta):
    rng = random.Random(20)
    for trial in range(5):
        n = rng.randint(2, 300)
        indptr, indices = random_csr(n, 4, rng)
        teleport = np.array([rng.random() + 0.01 for _ in range(n)])
        teleport /= teleport.sum()
        cy_scores, cy_iters, cy_resid, cy_ok = cy_kernel.power_iterate(
            indptr, indices, teleport, theta, 1e-10, 200
        )
        py_scores, py_iters, py_resid, py_ok = py_iterate(
            indptr, indices, teleport, theta, 1e-10, 200
        )
        assert cy_ok and py_ok
        assert cy_iters == py_iters
        np.testing.assert_allclose(cy_scores, py_scores, atol=1e-10)


def test_selected_backend_is_compiled_when_available():
    assert BACKEND == "cython"


def test_degenerate_all_zero_update_reports_failure():
    # theta=1 on an edgeless graph leaves no mass to propagate
    indptr = np.zeros(4, dtype=np.int64)
    indices = np.zeros(0, dtype=np.int64)
    teleport = np.full(3, 1 / 3)
    for kernel in (cy_kernel.power_iterate, py_iterate):
        scores, _, residual, converged = kernel(indptr, indices, teleport, 1.0, 1e-10, 50)
        assert not converged
        assert residual == np.inf
