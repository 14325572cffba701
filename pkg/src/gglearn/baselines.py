"""Single-level baselines: smoothness-only learning and the linearized
welfare surrogate with its KKT closed form.

Both problems are strictly convex quadratics over the feasible set, so
their unique minimizers are Euclidean projections of explicit targets:

    smoothness only:   Proj(-D / (2 beta))
    linear surrogate:  Proj((lambda 1 b^T - D) / (2 beta))

The KKT route recovers the same solution row by row: each row's dual
variable eta_i is found by monotone bisection on the row-sum condition,
and ``max(0, (lambda b_j + eta_i - D_ij) / (2 beta))`` is exactly the
water-filling form of the simplex projection with threshold
``tau_i = -eta_i / (2 beta)``. The two derivations are kept independent
and cross-checked in the tests.
"""

import numpy as np

from .graphs import check_distance_matrix, uniform_feasible
from .linalg import ConvergenceError
from .objective import smoothness_gradient
from .projection import project_feasible


def solve_smoothness_only(d, beta, c, method="closed_form", max_iter=50000,
                          tol=1e-10):
    """Minimize the data-fidelity objective over the feasible set.

    The closed form is ``Proj(-D / (2 beta))``. ``method="pgd"`` runs
    projected gradient descent instead (step 1/(2 beta), stopping when the
    step norm falls below ``tol``) and exists purely as a cross-check.
    """
    d = check_distance_matrix(d)
    if method == "closed_form":
        return project_feasible(-d / (2.0 * beta), c)
    if method != "pgd":
        raise ValueError(f"unknown method {method!r}")
    w = uniform_feasible(d.shape[0], c)
    step = 1.0 / (2.0 * beta)
    for _ in range(max_iter):
        w_next = project_feasible(w - step * smoothness_gradient(w, d, beta), c)
        gap = float(np.linalg.norm(w_next - w))
        w = w_next
        if gap <= tol:
            return w
    raise ConvergenceError(
        f"projected gradient did not reach step tol {tol} in {max_iter} iters",
        last_estimate=gap)


def solve_linear_prior(d, beta, c, lam, b):
    """Minimize ``J(W) - lambda 1^T W b`` over the feasible set (closed form).

    Completing the square turns the objective into
    ``beta || W - (lambda 1 b^T - D) / (2 beta) ||_F^2`` plus a constant,
    so the minimizer is the projection of that target.
    """
    d = check_distance_matrix(d)
    b = np.asarray(b, dtype=float)
    target = (lam * np.outer(np.ones(d.shape[0]), b) - d) / (2.0 * beta)
    return project_feasible(target, c)


def kkt_closed_form(d, beta, c, lam, b, row_tol=1e-12, max_bisect=200):
    """Row-wise KKT solution of the linear surrogate, with dual variables.

    For each row i, bisection finds ``eta_i`` so that
    ``sum_j max(0, lambda b_j + eta_i - D_ij) / (2 beta) = c`` over
    ``j != i``; the optimal weights follow from the same expression. The
    row-sum function is continuous, nondecreasing and unbounded in eta, so
    the bracket below always contains a root.

    Returns
    -------
    (w, eta)
        The optimal feasible adjacency and the per-row duals.
    """
    d = check_distance_matrix(d)
    b = np.asarray(b, dtype=float)
    n = d.shape[0]
    w = np.zeros((n, n))
    eta = np.zeros(n)
    target = 2.0 * beta * c
    for i in range(n):
        keep = np.arange(n) != i
        base = lam * b[keep] - d[i, keep]

        def row_sum(e):
            return np.maximum(0.0, base + e).sum()

        lo = -base.max()            # row_sum(lo) = 0 < target
        hi = -base.min() + target   # every term active and >= spread
        converged = False
        for _ in range(max_bisect):
            mid = 0.5 * (lo + hi)
            value = row_sum(mid)
            if abs(value - target) <= 2.0 * beta * row_tol:
                converged = True
                break
            if value < target:
                lo = mid
            else:
                hi = mid
        if not converged:
            raise ConvergenceError(
                f"dual bisection stalled on row {i}", last_estimate=mid)
        eta[i] = mid
        w[i, keep] = np.maximum(0.0, base + mid) / (2.0 * beta)
    return w, eta
