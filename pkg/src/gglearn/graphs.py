"""Core graph/signal validation and derived quantities.

Adjacency matrices are plain ``numpy`` arrays: nonnegative, zero diagonal,
possibly non-symmetric (entry ``w[i, j]`` weights the influence of node j
on node i). A *feasible* adjacency additionally has every row summing to
a common budget ``c``.
"""

import numpy as np

from .linalg import dominant_eigenvector

#: Absolute tolerance on the row-sum constraint of a feasible adjacency.
ROW_SUM_TOL = 1e-9


def check_adjacency(w):
    """Validate and return an adjacency matrix (nonnegative, zero diagonal)."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("adjacency has non-finite entries")
    if (w < 0).any():
        raise ValueError("adjacency has negative entries")
    if np.abs(np.diag(w)).max(initial=0.0) != 0.0:
        raise ValueError("adjacency has nonzero diagonal entries (self-loops)")
    return w


def check_feasible_adjacency(w, c, tol=ROW_SUM_TOL):
    """Validate a feasible adjacency: adjacency whose rows all sum to ``c``."""
    w = check_adjacency(w)
    if not 0.0 < c < 1.0:
        raise ValueError(f"row budget c must lie in (0, 1), got {c}")
    gap = np.abs(w.sum(axis=1) - c).max()
    if gap > tol:
        raise ValueError(f"row sums deviate from c={c} by {gap:.3e} (> {tol:.0e})")
    return w


def check_signals(x):
    """Validate an n-by-m signal matrix (row i = node i's observations)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"signals must be a 2-D array, got shape {x.shape}")
    if x.shape[1] < 1:
        raise ValueError("signal set is empty (no columns)")
    if not np.all(np.isfinite(x)):
        raise ValueError("signals have non-finite entries")
    return x


def check_distance_matrix(d):
    """Validate a symmetric nonnegative distance matrix with zero diagonal."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise ValueError("distance matrix has non-finite entries")
    if (d < 0).any():
        raise ValueError("distance matrix has negative entries")
    if np.abs(np.diag(d)).max(initial=0.0) != 0.0:
        raise ValueError("distance matrix has nonzero diagonal")
    if not np.array_equal(d, d.T):
        raise ValueError("distance matrix is not symmetric")
    return d


def uniform_feasible(n, c):
    """The uniform feasible adjacency: every off-diagonal entry c/(n-1)."""
    if n < 2:
        raise ValueError("need at least two nodes")
    w = np.full((n, n), c / (n - 1))
    np.fill_diagonal(w, 0.0)
    return w


def signal_distance_matrix(x):
    """Pairwise squared distances between node signal rows, scaled by 1/(2M).

    ``D[i, j] = ||x[i] - x[j]||^2 / (2 M)`` where M is the number of
    observed signals (columns of ``x``). Computed row by row from explicit
    differences, so symmetry, nonnegativity and the zero diagonal hold
    exactly.
    """
    x = check_signals(x)
    n, m = x.shape
    d = np.zeros((n, n))
    for i in range(n):
        diff = x - x[i]
        d[i] = (diff * diff).sum(axis=1) / (2.0 * m)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


def marginal_benefit(d):
    """Benefit vector from data: clipped, normalized top eigenvector of ``d``.

    Takes the dominant eigenvector of the distance matrix, zeroes its
    negative entries, and normalizes the result to sum to one.

    Raises
    ------
    ValueError
        If the clipped eigenvector is identically zero (cannot normalize).
    ConvergenceError
        Propagated from the eigenvector iteration (degenerate spectrum).
    """
    d = check_distance_matrix(d)
    _, v = dominant_eigenvector(d)
    b = np.maximum(v, 0.0)
    total = b.sum()
    if total <= 0.0:
        raise ValueError("clipped top eigenvector is identically zero")
    return b / total
