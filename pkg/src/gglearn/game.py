"""Linear-quadratic network game: interaction functions, best response,
equilibrium solvers, and total welfare.

Each agent i picks an action ``y_i >= 0`` maximizing a quadratic payoff
whose linear term is ``b_i`` plus a weighted sum of neighbors' transformed
actions. The best-response map is ``T(y) = max(0, b + W f(y))`` and the
Nash equilibrium is its fixed point; with ``b >= 0`` and row sums below 1
the map is a contraction and plain fixed-point iteration converges at a
linear rate.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import ConvergenceError, linear_solve


def _identity_value(y):
    return np.asarray(y, dtype=float)


def _identity_derivative(y):
    return np.ones_like(np.asarray(y, dtype=float))


def _log1p_derivative(y):
    return 1.0 / (1.0 + np.asarray(y, dtype=float))


class InteractionFunction:
    """A concave, nondecreasing, 1-Lipschitz map with f(0) = 0, f(x) <= x.

    Ships with the two kinds used throughout: ``identity`` (f(x) = x) and
    ``log1p`` (f(x) = log(1 + x)). Instances are stateless and picklable.
    """

    _REGISTRY = {
        "identity": (_identity_value, _identity_derivative),
        "log1p": (np.log1p, _log1p_derivative),
    }

    def __init__(self, kind):
        if kind not in self._REGISTRY:
            raise ValueError(
                f"unknown interaction function {kind!r}; "
                f"choose from {sorted(self._REGISTRY)}")
        self.kind = kind

    def value(self, y):
        return self._REGISTRY[self.kind][0](np.asarray(y, dtype=float))

    def derivative(self, y):
        return self._REGISTRY[self.kind][1](np.asarray(y, dtype=float))

    def __repr__(self):
        return f"InteractionFunction({self.kind!r})"

    def __eq__(self, other):
        return isinstance(other, InteractionFunction) and self.kind == other.kind


IDENTITY = InteractionFunction("identity")
LOG1P = InteractionFunction("log1p")


@dataclass(frozen=True)
class GameSpec:
    """Marginal benefits, interaction function, and row budget of a game."""

    b: np.ndarray
    f: InteractionFunction = field(default_factory=lambda: IDENTITY)
    c: float = 0.95

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if b.ndim != 1:
            raise ValueError("marginal benefit b must be a vector")
        if not np.all(np.isfinite(b)):
            raise ValueError("marginal benefit b has non-finite entries")
        if (b < 0).any():
            raise ValueError("marginal benefit b must be nonnegative")
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"row budget c must lie in (0, 1), got {self.c}")
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.b.shape[0]


@dataclass(frozen=True)
class Equilibrium:
    """A solved equilibrium: actions, fixed-point residual, iteration count."""

    y: np.ndarray
    residual: float
    iterations: int


def best_response(y, w, game):
    """Best-response map ``T(y; W) = max(0, b + W f(y))`` elementwise.

    With b, W and f all nonnegative the clamp never binds; it is applied
    anyway as insurance against rounding.
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if y.shape != (game.n,) or w.shape != (game.n, game.n):
        raise ValueError(
            f"shape mismatch: y {y.shape}, W {w.shape}, game n={game.n}")
    return np.maximum(0.0, game.b + w @ game.f.value(y))


def solve_equilibrium(w, game, tol=1e-12, max_iter=100000):
    """Find the equilibrium by fixed-point iteration of the best response.

    Starts from ``y = b`` and iterates ``y <- T(y; W)`` until the residual
    ``||y - T(y)||_2`` drops to ``tol``. For a feasible W (row sums c < 1)
    each sweep contracts the error by at least a factor c.

    Returns
    -------
    Equilibrium
        The final iterate, its recorded residual, and the sweep count.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` sweeps leave the residual above ``tol``.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] != game.n:
        raise ValueError(f"W has shape {w.shape}, expected ({game.n}, {game.n})")
    b = game.b
    f = game.f
    y = b.copy()
    for k in range(1, max_iter + 1):
        t = np.maximum(0.0, b + w @ f.value(y))
        gap = float(np.linalg.norm(t - y))
        y = t
        if gap <= tol:
            residual = float(np.linalg.norm(np.maximum(0.0, b + w @ f.value(y)) - y))
            return Equilibrium(y=y, residual=residual, iterations=k)
    raise ConvergenceError(
        f"equilibrium iteration did not reach tol={tol} in {max_iter} sweeps",
        last_estimate=gap)


def equilibrium_linear(w, b):
    """Closed-form equilibrium for the identity interaction: (I - W)^-1 b.

    Valid when the spectral radius of W is below one; serves as an oracle
    for the fixed-point solver. Raises on singular I - W.
    """
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    return linear_solve(np.eye(w.shape[0]) - w, b)


def welfare(w, game, tol=1e-12, max_iter=100000):
    """Total welfare: the sum of equilibrium actions ``1^T y``."""
    return float(solve_equilibrium(w, game, tol=tol, max_iter=max_iter).y.sum())


def response_jacobians(y, w, game):
    """Jacobian structure of the best response in the interior regime.

    Returns ``(J_y, fy)`` where ``J_y = W Diag(f'(y))`` is the Jacobian
    with respect to the actions and ``fy = f(y)`` generates the Jacobian
    with respect to the weights (the map is linear in W, acting on row i
    through the fixed vector f(y)).
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    fy = game.f.value(y)
    jy = w * game.f.derivative(y)[None, :]
    return jy, fy
