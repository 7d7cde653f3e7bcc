"""NumPy implementation of the synchronous score-propagation kernel."""

from __future__ import annotations

import numpy as np


def power_iterate(indptr, indices, teleport, theta, tolerance, max_iterations):
    """Iterate score[i] = (1-theta)*teleport[i] + theta * sum(score[k]/deg[k], k adjacent to i).

    Starts from the uniform vector and renormalizes to sum 1 every
    iteration (isolated nodes leak mass otherwise). Stops when the L1
    change between consecutive normalized vectors drops below
    ``tolerance`` or after ``max_iterations``.

    Returns (scores, iterations, residual, converged). A degenerate
    all-zero update (possible only at theta = 1 on an edgeless graph)
    reports converged=False with an infinite residual.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    teleport = np.asarray(teleport, dtype=np.float64)

    n = teleport.shape[0]
    degrees = np.diff(indptr).astype(np.float64)
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    inv_degree = np.zeros(n)
    nonzero = degrees > 0
    inv_degree[nonzero] = 1.0 / degrees[nonzero]

    x = np.full(n, 1.0 / n)
    residual = np.inf
    for iteration in range(1, max_iterations + 1):
        contrib = x * inv_degree
        link_mass = np.bincount(rows, weights=contrib[indices], minlength=n)
        new = (1.0 - theta) * teleport + theta * link_mass
        total = new.sum()
        if total <= 0.0:
            return x, iteration, np.inf, False
        new /= total
        residual = np.abs(new - x).sum()
        x = new
        if residual < tolerance:
            return x, iteration, residual, True
    return x, max_iterations, residual, False
