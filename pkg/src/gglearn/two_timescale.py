"""Two-timescale solver for the welfare-regularized learning problem.

Each iteration takes one damped best-response sweep on the actions (fast
timescale) and one projected gradient step on the weights (slow
timescale), with the gradient evaluated at the current inexact actions:

    y_{k+1} = y_k + alpha (T(y_k; W_k) - y_k)
    W_{k+1} = Proj(W_k - gamma * hypergradient(W_k, y_{k+1}))

Step sizes come either from the experiment defaults (``manual``) or from
the convergence theory (``theory``), which prescribes
``alpha = (1 - c) / (1 + c)^2`` and a cap on gamma built from the
Lipschitz constants below.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from .game import GameSpec, InteractionFunction, best_response, solve_equilibrium
from .graphs import uniform_feasible
from .hypergradient import hypergradient, hypergradient_y_lipschitz
from .linalg import ConvergenceError
from .objective import smoothness_objective
from .projection import project_feasible

_F_KINDS = ("identity", "log1p")
_STEP_MODES = ("manual", "theory")


@dataclass
class LearnConfig:
    """Everything needed to reproduce a learning run."""

    lam: float = 0.0
    beta: float = 200.0
    c: float = 0.95
    alpha: float = 0.5
    gamma: float = 0.003
    max_iter: int = 700
    ne_tol: float = 1e-12
    seed: int = 0
    f_kind: str = "identity"
    step_mode: str = "manual"
    stop_stationarity: float | None = None
    exact_stationarity_every: int | None = None

    def validation_errors(self):
        """All constraint violations, so a caller can report them at once."""
        problems = []
        if not self.lam >= 0:
            problems.append(f"lambda must be >= 0, got {self.lam}")
        if not self.beta > 0:
            problems.append(f"beta must be > 0, got {self.beta}")
        if not 0.0 < self.c < 1.0:
            problems.append(f"c must lie in (0, 1), got {self.c}")
        if not 0.0 < self.alpha <= 1.0:
            problems.append(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.gamma > 0:
            problems.append(f"gamma must be > 0, got {self.gamma}")
        if self.step_mode == "manual" and not self.gamma < self.alpha:
            problems.append(
                f"two-timescale ordering requires gamma < alpha, "
                f"got gamma={self.gamma}, alpha={self.alpha}")
        if self.max_iter < 1:
            problems.append(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.ne_tol > 0:
            problems.append(f"ne_tol must be > 0, got {self.ne_tol}")
        if self.f_kind not in _F_KINDS:
            problems.append(f"f_kind must be one of {_F_KINDS}, got {self.f_kind!r}")
        if self.step_mode not in _STEP_MODES:
            problems.append(
                f"step_mode must be one of {_STEP_MODES}, got {self.step_mode!r}")
        if self.exact_stationarity_every is not None \
                and self.exact_stationarity_every < 1:
            problems.append("exact_stationarity_every must be >= 1 when set")
        return problems

    def __post_init__(self):
        problems = self.validation_errors()
        if problems:
            raise ValueError("; ".join(problems))

    def game(self, b):
        return GameSpec(b=np.asarray(b, dtype=float),
                        f=InteractionFunction(self.f_kind), c=self.c)

    def to_dict(self):
        return asdict(self)


@dataclass
class LearnTrace:
    """Per-iteration history of a learning run plus the final iterates.

    ``ell_value[k]`` is the objective evaluated at the running action
    iterate (the exact value would need an equilibrium solve per
    iteration); ``stationarity[k]`` is the squared scaled projected-
    gradient residual at the same iterate; ``ne_residual[k]`` measures how
    far the actions are from the best response. When
    ``exact_stationarity_every`` is set, ``exact_iterations`` and
    ``exact_stationarity`` record the metric with the equilibrium
    re-solved to full accuracy.
    """

    ell_value: np.ndarray
    stationarity: np.ndarray
    ne_residual: np.ndarray
    w: np.ndarray
    y: np.ndarray
    iterations: int
    gamma: float
    alpha: float
    exact_iterations: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=int))
    exact_stationarity: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def best_stationarity(self):
        """Running minimum of the stationarity metric (nonincreasing)."""
        return np.minimum.accumulate(self.stationarity)


@dataclass(frozen=True)
class TheoryConstants:
    """Step sizes and Lipschitz constants from the convergence analysis.

    ``l_y`` bounds the equilibrium map's sensitivity to W, ``l_grad_y``
    the gradient map's sensitivity to the actions (on the ball the
    iterates provably stay in), and ``l_ell`` the smoothness of the
    implicit objective.
    """

    alpha: float
    l_y: float
    l_grad_y: float
    l_ell: float
    gamma_cap: float


def theory_constants(n, b, c, lam, beta, y_init_gap=0.0):
    """Evaluate the theoretical step sizes and Lipschitz constants.

    Parameters
    ----------
    n : int
        Number of nodes.
    b : array_like
        Marginal benefit vector (only its max magnitude enters).
    c : float
        Row budget, in (0, 1).
    lam, beta : float
        Objective weights.
    y_init_gap : float
        ``||y_1 - y*(W_0)||``, the initial action error entering the bound
        on the action iterates.
    """
    b_inf = float(np.max(np.abs(b)))
    alpha = (1.0 - c) / (1.0 + c) ** 2
    l_y = np.sqrt(n) * b_inf / (1.0 - c) ** 2
    # Radius the action iterates provably stay within.
    drift = 2.0 * c * l_y ** 2 * (2.0 / ((1.0 - c) * alpha) - 1.0)
    radius = np.sqrt(n) * b_inf / (1.0 - c) \
        + np.sqrt((1.0 - alpha * (1.0 - c) / 2.0) * y_init_gap ** 2 + drift)
    l_grad_y = hypergradient_y_lipschitz(n, lam, c, radius)
    l_ell = (np.sqrt(n) * lam / (1.0 - c)
             + lam * n * b_inf * c / (1.0 - c) ** 3) \
        * np.sqrt(n) * b_inf / (1.0 - c) ** 2 \
        + 2.0 * beta + lam * n * b_inf / (1.0 - c) ** 3
    caps = [3.0 / (4.0 * l_ell)]
    if l_grad_y > 0 and l_y > 0:
        caps.append((1.0 - c) * alpha / (4.0 * l_grad_y * l_y))
    return TheoryConstants(alpha=alpha, l_y=l_y, l_grad_y=l_grad_y,
                           l_ell=l_ell, gamma_cap=min(caps))


def stationarity(w, gamma, grad, c):
    """Squared scaled projected-gradient residual at W.

    ``|| (W - Proj(W - gamma * grad)) / gamma ||_F^2``; zero exactly at
    fixed points of the projected gradient step.
    """
    moved = project_feasible(w - gamma * grad, c)
    return float(np.linalg.norm((w - moved) / gamma) ** 2)


def two_timescale_step(w, y, d, game, config):
    """One coupled update; returns ``(w_next, y_next, info)``.

    ``info`` carries the per-iteration trace scalars: the objective at the
    new action iterate, the squared projected-gradient residual (free,
    since the W-update already is the projected step), and the action
    residual ``||y_next - T(y_next; W)||``.
    """
    t = best_response(y, w, game)
    y_next = y + config.alpha * (t - y)
    grad = hypergradient(w, y_next, d, config.beta, config.lam, game)
    w_next = project_feasible(w - config.gamma * grad, config.c)
    info = {
        "ell_value": smoothness_objective(w, d, config.beta)
        - config.lam * float(y_next.sum()),
        "stationarity": float(
            np.linalg.norm((w - w_next) / config.gamma) ** 2),
        "ne_residual": float(
            np.linalg.norm(best_response(y_next, w, game) - y_next)),
    }
    return w_next, y_next, info


def run_two_timescale(config, d, b, w0=None):
    """Run the two-timescale iteration for ``config.max_iter`` steps.

    Starts from the uniform feasible matrix (unless ``w0`` is given) and
    ``y = b``. In ``theory`` step mode the step sizes are replaced by
    ``alpha = (1-c)/(1+c)^2`` and the theoretical gamma cap, with the
    initial action gap measured against an equilibrium solved to
    ``ne_tol``. An optional stationarity threshold stops early; otherwise
    the budget is fixed. Returns the trace (partial if a step fails).
    """
    d = np.asarray(d, dtype=float)
    b = np.asarray(b, dtype=float)
    n = d.shape[0]
    game = config.game(b)
    w = uniform_feasible(n, config.c) if w0 is None else project_feasible(w0, config.c)
    y = b.copy()

    if config.step_mode == "theory":
        alpha = (1.0 - config.c) / (1.0 + config.c) ** 2
        y1 = y + alpha * (best_response(y, w, game) - y)
        y_star = solve_equilibrium(w, game, tol=config.ne_tol).y
        constants = theory_constants(n, b, config.c, config.lam, config.beta,
                                     y_init_gap=float(np.linalg.norm(y1 - y_star)))
        config = LearnConfig(**{**config.to_dict(),
                                "alpha": constants.alpha,
                                "gamma": constants.gamma_cap,
                                "step_mode": "manual"})

    ell_values = []
    stationarities = []
    ne_residuals = []
    exact_iters = []
    exact_stat = []

    def trace():
        return LearnTrace(
            ell_value=np.array(ell_values),
            stationarity=np.array(stationarities),
            ne_residual=np.array(ne_residuals),
            w=w,
            y=y,
            iterations=len(ell_values),
            gamma=config.gamma,
            alpha=config.alpha,
            exact_iterations=np.array(exact_iters, dtype=int),
            exact_stationarity=np.array(exact_stat),
        )

    for k in range(config.max_iter):
        try:
            if config.exact_stationarity_every is not None \
                    and k % config.exact_stationarity_every == 0:
                y_star = solve_equilibrium(w, game, tol=config.ne_tol).y
                exact_grad = hypergradient(w, y_star, d, config.beta,
                                           config.lam, game)
                exact_iters.append(k)
                exact_stat.append(
                    stationarity(w, config.gamma, exact_grad, config.c))
            w, y, info = two_timescale_step(w, y, d, game, config)
        except (np.linalg.LinAlgError, ConvergenceError) as exc:
            # Abort with the partial trace attached for post-mortems.
            failure = ConvergenceError(
                f"step {k} failed: {exc}", last_estimate=None)
            failure.trace = trace()
            raise failure from exc
        ell_values.append(info["ell_value"])
        stationarities.append(info["stationarity"])
        ne_residuals.append(info["ne_residual"])
        if config.stop_stationarity is not None \
                and info["stationarity"] < config.stop_stationarity:
            break

    return trace()
