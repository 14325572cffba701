"""Dense linear-algebra primitives shared by the rest of the package.

Everything here is deterministic given its inputs: fixed-order rational
approximation for the matrix exponential, fixed starting vectors for the
power iterations, and LAPACK LU with partial pivoting for linear solves.
"""

import numpy as np
import scipy.linalg


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap or a degenerate spectrum.

    Attributes
    ----------
    last_estimate : float or None
        The final iterate's estimate of the quantity being computed.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


def _check_square(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


# Degree-13 Pade approximant of exp; coefficients and the scaling threshold
# theta_13 follow Higham, "The Scaling and Squaring Method for the Matrix
# Exponential Revisited" (2005).
_PADE13_THETA = 5.371920351148152
_PADE13_B = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0,
    40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)


def matrix_exponential(a):
    """Matrix exponential of a square matrix by scaling and squaring.

    Uses a fixed degree-13 Pade approximant after scaling ``a`` by a power
    of two so its 1-norm is below ``_PADE13_THETA``, then squares back.
    Relative accuracy is far below 1e-10 (Frobenius) for ``||a|| <= 10``.
    """
    a = _check_square(a)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > _PADE13_THETA:
        squarings = int(np.ceil(np.log2(norm / _PADE13_THETA)))
        a = a / (2.0 ** squarings)

    b = _PADE13_B
    ident = np.eye(n)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    result = linear_solve(v - u, v + u)
    for _ in range(squarings):
        result = result @ result
    return result


def _power_iteration_pair(a, start, tol, max_iter):
    """Power iteration returning (rayleigh estimate, unit vector, converged)."""
    v = start / np.linalg.norm(start)
    lam = float(v @ (a @ v))
    for _ in range(max_iter):
        av = a @ v
        norm_av = np.linalg.norm(av)
        if norm_av == 0.0:
            # v lies in the kernel; the dominant eigenvalue is defective/zero.
            return 0.0, v, False
        v = av / norm_av
        lam_new = float(v @ (a @ v))
        if abs(lam_new - lam) <= tol:
            return lam_new, v, True
        lam = lam_new
    return lam, v, False


def dominant_eigenvector(a, tol=1e-12, max_iter=10000):
    """Dominant eigenpair of a symmetric matrix by power iteration.

    Parameters
    ----------
    a : ndarray
        Symmetric square matrix with a positive gap between the dominant
        eigenvalue and the rest of the spectrum.
    tol : float
        Stop when successive Rayleigh-quotient estimates differ by at most
        this amount.
    max_iter : int
        Iteration cap.

    Returns
    -------
    (eigenvalue, eigenvector)
        The eigenvector is a unit vector with its largest-magnitude entry
        made positive, so the output is deterministic.

    Raises
    ------
    ConvergenceError
        If the cap is reached without the estimate settling, or if the
        dominant eigenvalue is degenerate (a deflated second power
        iteration finds the same eigenvalue), carrying the last estimate.
    """
    a = _check_square(a)
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]

    lam, v, ok = _power_iteration_pair(a, np.ones(n), tol, max_iter)
    if not ok:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations",
            last_estimate=lam)

    # Degeneracy probe: deflate the found eigenpair and look for a second
    # eigenvalue equal to the first. The start vector is chosen to overlap
    # the orthogonal complement of v for any v.
    deflated = a - lam * np.outer(v, v)
    start = 1.0 + np.arange(n, dtype=float)
    mu, _, _ = _power_iteration_pair(deflated, start, tol, max_iter)
    scale = max(abs(lam), 1.0)
    if abs(mu - lam) <= 1e-9 * scale:
        raise ConvergenceError(
            "dominant eigenvalue is degenerate (no spectral gap)",
            last_estimate=lam)

    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return lam, v


def spectral_radius(a, tol=1e-10, max_iter=10000):
    """Power-iteration estimate of the spectral radius of ``|a|``.

    Intended for validating bounds (e.g. row-sum caps on nonnegative
    matrices), not for use inside solvers. The estimate is the iterate
    norm ``||A v_k||`` which converges for the periodic spectra that
    defeat Rayleigh-quotient estimates (bipartite graphs). Returns the
    last estimate if the cap is reached.
    """
    a = np.abs(_check_square(a))
    n = a.shape[0]
    v = np.ones(n) / np.sqrt(n)
    estimate = float(np.linalg.norm(a @ v))
    for _ in range(max_iter):
        av = a @ v
        norm_av = np.linalg.norm(av)
        if norm_av == 0.0:
            return 0.0
        v = av / norm_av
        new_estimate = float(np.linalg.norm(a @ v))
        if abs(new_estimate - estimate) <= tol:
            return new_estimate
        estimate = new_estimate
    return estimate


def linear_solve(a, b):
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Raises ``numpy.linalg.LinAlgError`` when a pivot falls below
    ``1e-14 * ||a||_F``, i.e. the matrix is numerically singular.
    ``b`` may be a vector or a matrix.
    """
    a = _check_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivot_floor = 1e-14 * np.linalg.norm(a)
    if np.abs(np.diag(lu)).min() < pivot_floor:
        raise np.linalg.LinAlgError("matrix is singular or numerically singular")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
