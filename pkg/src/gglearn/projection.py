"""Euclidean projection onto the feasible adjacency set.

The feasible set {W >= 0, diag(W) = 0, W 1 = c 1} decouples across rows:
fixing the diagonal to zero, each row's off-diagonal entries live on an
independent scaled simplex {w >= 0, sum(w) = c}. The joint Euclidean
projection therefore equals the per-row simplex projection, which is
solved exactly by sort-and-threshold water-filling.
"""

import numpy as np


def _simplex_rows(v, c):
    """Project each row of ``v`` onto {w >= 0, sum(w) = c} (vectorized)."""
    k = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - c
    ind = np.arange(1, k + 1)
    active = np.count_nonzero(u - css / ind > 0, axis=1)
    tau = css[np.arange(v.shape[0]), active - 1] / active
    return np.maximum(v - tau[:, None], 0.0)


def _pin_row_sums(w, c):
    """Nudge each row's largest entry so the row sum equals c bitwise.

    The water-filling threshold leaves row sums within a few ulps of c;
    absorbing that residue into the largest entry makes feasibility exact,
    which in turn makes reprojection the identity.
    """
    for _ in range(5):
        residue = c - w.sum(axis=1)
        if not residue.any():
            break
        rows = np.nonzero(residue)[0]
        w[rows, np.argmax(w[rows], axis=1)] += residue[rows]
    return w


def project_row_simplex(v, c):
    """Euclidean projection of a vector onto {w >= 0, sum(w) = c}.

    Returns ``max(0, v - tau)`` with the threshold ``tau`` chosen by
    sort-and-threshold water-filling so the result sums to ``c``. Already
    feasible inputs are returned unchanged, so the projection is
    idempotent. Never fails: the target set is nonempty for any c > 0.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("expected a nonempty vector")
    if not c > 0:
        raise ValueError("simplex mass c must be positive")
    if (v >= 0).all() and v.sum() == c:
        return v.copy()
    w = _simplex_rows(v[None, :], c)
    return _pin_row_sums(w, c)[0]


def project_feasible(w, c):
    """Euclidean projection of a square matrix onto the feasible set.

    Forces the diagonal to zero and projects each row's off-diagonal
    entries onto the scaled simplex of mass ``c``; by row separability
    this equals the joint projection. Idempotent: projecting a feasible
    matrix returns it unchanged.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {w.shape}")
    n = w.shape[0]
    if n < 2:
        raise ValueError("need at least two nodes to satisfy a positive row sum")
    if not c > 0:
        raise ValueError("row budget c must be positive")

    off = ~np.eye(n, dtype=bool)
    if ((w >= 0) | ~off).all() and np.abs(np.diag(w)).max() == 0.0 \
            and (w.sum(axis=1) == c).all():
        return w.copy()

    rows = w[off].reshape(n, n - 1)
    projected = _pin_row_sums(_simplex_rows(rows, c), c)
    out = np.zeros_like(w)
    out[off] = projected.ravel()
    return out
