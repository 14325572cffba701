"""Graph topology learning from smooth signals with a network-game
welfare prior.

The package learns an adjacency matrix that both fits observed smooth
graph signals and scores well on the total welfare of the equilibrium of
a linear-quadratic game played on it. The bilevel coupling is handled by
a two-timescale gradient method with an implicit-differentiation
hypergradient; single-level baselines, synthetic data generators and
evaluation utilities round out the toolkit.
"""

__version__ = "0.1.0"

from .baselines import kkt_closed_form, solve_linear_prior, solve_smoothness_only
from .datagen import (RngStream, gaussian, gen_gmrf_signals,
                      gen_lowpass_signals, gen_pa_graph, rewire,
                      scale_adjacency, substream_id, welfare_ratio_experiment)
from .datasets import KARATE_EDGES, karate_adjacency
from .evaluation import auc_edges, pareto_sweep, welfare_gain
from .game import (GameSpec, Equilibrium, IDENTITY, LOG1P,
                   InteractionFunction, best_response, equilibrium_linear,
                   response_jacobians, solve_equilibrium, welfare)
from .graphs import (check_adjacency, check_feasible_adjacency,
                     marginal_benefit, signal_distance_matrix,
                     uniform_feasible)
from .hypergradient import (bilevel_objective, finite_difference_hypergradient,
                            hypergradient, hypergradient_y_lipschitz)
from .linalg import (ConvergenceError, dominant_eigenvector, linear_solve,
                     matrix_exponential, spectral_radius)
from .objective import smoothness_gradient, smoothness_objective
from .projection import project_feasible, project_row_simplex
from .two_timescale import (LearnConfig, LearnTrace, TheoryConstants,
                            run_two_timescale, stationarity, theory_constants,
                            two_timescale_step)
