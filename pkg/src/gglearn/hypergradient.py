"""Gradient of the welfare-regularized objective through the equilibrium map.

The learning objective is ``ell(W) = J(W) - lambda * Wel(W)`` where the
welfare term depends on W implicitly through the equilibrium. Implicit
differentiation of the fixed-point condition ``y = b + W f(y)`` gives

    grad ell(W) = grad J(W) - lambda * v f(y)^T,
    (I - Diag(f'(y)) W^T) v = 1,

so the correction term costs one dense N-by-N solve plus an outer
product; the N^2-by-N Jacobian of the response map is never materialized.
Diagonal entries are left as computed; the projection step owns the
zero-diagonal constraint.
"""

import numpy as np

from .game import solve_equilibrium
from .linalg import linear_solve
from .objective import smoothness_gradient, smoothness_objective


def hypergradient(w, y, d, beta, lam, game):
    """Gradient of ``ell`` at W, evaluated with the supplied lower iterate.

    ``y`` is passed explicitly (not recomputed) because the two-timescale
    solver evaluates the gradient at its inexact running iterate rather
    than at the exact equilibrium. Assumes the interior regime (b > 0 so
    the best-response clamp is inactive around y).
    """
    w = np.asarray(w, dtype=float)
    y = np.asarray(y, dtype=float)
    grad = smoothness_gradient(w, d, beta)
    if lam == 0.0:
        return grad
    fy = game.f.value(y)
    fp = game.f.derivative(y)
    system = np.eye(w.shape[0]) - fp[:, None] * w.T
    v = linear_solve(system, np.ones(w.shape[0]))
    return grad - lam * np.outer(v, fy)


def bilevel_objective(w, d, beta, lam, game, ne_tol=1e-12, max_iter=100000):
    """Value of ``ell(W) = J(W) - lambda * Wel(W)`` (solves the equilibrium)."""
    value = smoothness_objective(w, d, beta)
    if lam == 0.0:
        return value
    eq = solve_equilibrium(w, game, tol=ne_tol, max_iter=max_iter)
    return value - lam * float(eq.y.sum())


def finite_difference_hypergradient(w, d, beta, lam, game, step=1e-5,
                                    ne_tol=1e-12, max_iter=100000):
    """Central finite differences of ``ell``, the oracle for `hypergradient`.

    Perturbs every off-diagonal entry with ``w[i, j] > step`` (so W +- h
    stays in the region where the objective is smooth) and re-solves the
    equilibrium at each perturbed matrix. All perturbed fixed-point
    iterations run as one batched sweep.

    Returns
    -------
    (grad, mask)
        ``grad`` holds the finite-difference estimate at perturbable
        entries and NaN elsewhere; ``mask`` flags the computed entries.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    mask = (w > step) & ~np.eye(n, dtype=bool)
    rows, cols = np.nonzero(mask)
    k = rows.size
    grad = np.full_like(w, np.nan)
    if k == 0:
        return grad, mask

    stack = np.repeat(w[None, :, :], 2 * k, axis=0)
    stack[np.arange(k), rows, cols] += step
    stack[k + np.arange(k), rows, cols] -= step

    b = game.b
    f = game.f
    y = np.repeat(b[None, :], 2 * k, axis=0)
    for _ in range(max_iter):
        t = np.maximum(0.0, b[None, :] + np.einsum("kij,kj->ki", stack, f.value(y)))
        gaps = np.linalg.norm(t - y, axis=1)
        y = t
        if gaps.max() <= ne_tol:
            break
    else:
        raise RuntimeError("batched equilibrium solve did not converge")

    j_plus = np.einsum("kij,ij->k", stack[:k], d) \
        + beta * np.einsum("kij,kij->k", stack[:k], stack[:k])
    j_minus = np.einsum("kij,ij->k", stack[k:], d) \
        + beta * np.einsum("kij,kij->k", stack[k:], stack[k:])
    ell_plus = j_plus - lam * y[:k].sum(axis=1)
    ell_minus = j_minus - lam * y[k:].sum(axis=1)
    grad[rows, cols] = (ell_plus - ell_minus) / (2.0 * step)
    return grad, mask


def hypergradient_y_lipschitz(n, lam, c, radius):
    """Lipschitz constant of the gradient map in y over ``||y|| <= radius``.

    ``sqrt(N) lam / (1 - c) + lam sqrt(N) B c / (1 - c)^2`` with B the
    radius of the action ball.
    """
    return np.sqrt(n) * lam / (1.0 - c) \
        + lam * np.sqrt(n) * radius * c / (1.0 - c) ** 2
