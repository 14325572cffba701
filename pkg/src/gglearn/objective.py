"""Smooth-signal data-fidelity objective and its gradient.

The objective is ``<W, D> + beta ||W||_F^2`` where D is the pairwise
signal distance matrix (which already carries the 1/(2M) factor), so one
evaluation costs O(N^2) regardless of how many signals were observed.
"""

import numpy as np


def _check_pair(w, d):
    w = np.asarray(w, dtype=float)
    d = np.asarray(d, dtype=float)
    if w.shape != d.shape or w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"shape mismatch: W {w.shape} vs D {d.shape}")
    return w, d


def smoothness_objective(w, d, beta):
    """Data-fidelity value ``<W, D> + beta ||W||_F^2``."""
    w, d = _check_pair(w, d)
    if not beta > 0:
        raise ValueError("beta must be positive")
    return float((w * d).sum() + beta * (w * w).sum())


def smoothness_gradient(w, d, beta):
    """Gradient of the data-fidelity objective: ``D + 2 beta W``."""
    w, d = _check_pair(w, d)
    if not beta > 0:
        raise ValueError("beta must be positive")
    return d + 2.0 * beta * w
