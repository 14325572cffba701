"""Synthetic instances: preferential-attachment graphs, smooth signals,
and the random-rewiring welfare-sensitivity experiment.

All randomness flows through `RngStream`, a counter-based Philox generator
keyed by ``(seed, stream_id)``, so any draw is reproducible from those two
integers alone on every platform. Gaussians are produced by Box-Muller on
the uniform stream rather than the generator's native normals, pinning
the exact byte sequence independent of the numpy ziggurat tables.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .game import GameSpec, InteractionFunction, solve_equilibrium, welfare
from .graphs import check_adjacency
from .linalg import ConvergenceError, matrix_exponential, spectral_radius
from .projection import project_feasible

SCALE_MODES = ("spectral", "rowsum", "none")


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self):
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def substream_id(*indices):
    """Pack up to two 32-bit indices into one stream id.

    Used to derive per-trial streams, e.g. ``substream_id(fraction_index,
    trial_index)`` in the rewiring experiment.
    """
    out = 0
    for index in indices:
        if not 0 <= index < 2 ** 32:
            raise ValueError(f"stream index out of range: {index}")
        out = (out << 32) | index
    return out


def gaussian(rng, shape):
    """Standard normal draws via Box-Muller on the uniform stream."""
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 in (0, 1], no log(0)
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count].reshape(shape)


def gen_pa_graph(n, rng):
    """Preferential-attachment tree on ``n`` nodes (binary, symmetric).

    Starts from the edge (0, 1); every later node attaches a single edge
    to an existing node picked with probability proportional to its
    degree. The result always has ``n - 1`` edges and is connected.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    w = np.zeros((n, n))
    w[0, 1] = w[1, 0] = 1.0
    # One entry per unit of degree; uniform choice = degree-proportional.
    repeated = [0, 1]
    for node in range(2, n):
        target = repeated[rng.integers(0, len(repeated))]
        w[node, target] = w[target, node] = 1.0
        repeated.append(node)
        repeated.append(target)
    return w


def scale_adjacency(w, mode, c=0.95):
    """Normalize a raw adjacency so the game is well posed.

    ``spectral`` rescales to spectral radius ``c`` (preserves relative
    edge structure), ``rowsum`` rescales by the max row sum then projects
    onto the feasible set, ``none`` returns the matrix untouched.
    """
    w = check_adjacency(w)
    if mode == "none":
        return w.copy()
    if mode == "spectral":
        rho = spectral_radius(w)
        if rho == 0.0:
            return w.copy()
        return w * (c / rho)
    if mode == "rowsum":
        top = w.sum(axis=1).max()
        if top == 0.0:
            return project_feasible(w, c)
        return project_feasible(w * (c / top), c)
    raise ValueError(f"unknown scale mode {mode!r}; choose from {SCALE_MODES}")


def gen_lowpass_signals(w_true, m, sigma, rng, scale="spectral", scale_c=0.95):
    """Signals through a low-pass exponential filter of the graph.

    Each column is ``exp(W_s / 2) u + sigma * noise`` with both ``u`` and
    the noise i.i.d. standard normal; ``W_s`` is the input adjacency
    normalized per ``scale`` (``none`` applies the filter to the raw
    matrix). The excitation block is drawn before the noise block.
    """
    w_true = check_adjacency(w_true)
    if m < 1:
        raise ValueError("need at least one signal")
    scaled = scale_adjacency(w_true, scale, scale_c)
    filt = matrix_exponential(scaled / 2.0)
    n = w_true.shape[0]
    excitation = gaussian(rng, (n, m))
    noise = gaussian(rng, (n, m))
    return filt @ excitation + sigma * noise


def gen_gmrf_signals(w_true, m, ridge, rng):
    """Gaussian samples whose precision is the graph Laplacian plus a ridge.

    The Laplacian alone is singular (constant vectors are in its kernel),
    so a positive ridge is required. Sampling solves the Cholesky factor
    of the precision against white noise.
    """
    w_true = check_adjacency(w_true)
    if not np.array_equal(w_true, w_true.T):
        raise ValueError("GMRF generation needs a symmetric adjacency")
    if m < 1:
        raise ValueError("need at least one signal")
    if not ridge > 0:
        raise ValueError("ridge must be positive: the Laplacian is singular")
    lap = np.diag(w_true.sum(axis=1)) - w_true
    precision = lap + ridge * np.eye(w_true.shape[0])
    upper = scipy.linalg.cholesky(precision, lower=False)
    z = gaussian(rng, (w_true.shape[0], m))
    return scipy.linalg.solve_triangular(upper, z, lower=False)


def _upper_pairs(w):
    rows, cols = np.nonzero(np.triu(w, 1))
    return list(zip(rows.tolist(), cols.tolist()))


def rewire(w, fraction, rng):
    """Randomly rewire a fraction of the edges of a binary symmetric graph.

    Picks ``round(fraction * E)`` distinct edges without replacement; each
    one is deleted and replaced by a uniformly random currently-absent
    pair (self-loops excluded, the freed slot is eligible again). Edge
    count, symmetry and the zero diagonal are preserved.
    """
    w = check_adjacency(w)
    if not np.array_equal(w, w.T):
        raise ValueError("rewiring needs a symmetric adjacency")
    if not np.isin(w, (0.0, 1.0)).all():
        raise ValueError("rewiring needs a binary adjacency")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")

    n = w.shape[0]
    edges = _upper_pairs(w)
    count = int(np.floor(fraction * len(edges) + 0.5))
    if count == 0:
        return w.copy()
    out = w.copy()
    chosen = rng.choice(len(edges), size=count, replace=False)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for index in chosen:
        i, j = edges[index]
        out[i, j] = out[j, i] = 0.0
        absent_rows, absent_cols = np.nonzero(upper & (out == 0.0))
        if absent_rows.size == 0:
            raise ValueError("graph too dense: no absent pair for rewiring")
        pick = rng.integers(0, absent_rows.size)
        a, bnode = int(absent_rows[pick]), int(absent_cols[pick])
        out[a, bnode] = out[bnode, a] = 1.0
    return out


def _rewire_trial(payload):
    """Worker for one rewiring trial; takes primitives so it pickles."""
    (w, fraction, seed, stream, b, f_kind, c, scale, base) = payload
    rng = RngStream(seed, stream).generator()
    perturbed = rewire(w, fraction, rng)
    scaled = scale_adjacency(perturbed, scale, c)
    game = GameSpec(b=b, f=InteractionFunction(f_kind), c=c)
    try:
        equilibrium = solve_equilibrium(scaled, game)
    except ConvergenceError:
        return None
    return (float(equilibrium.y.sum()) - float(b.sum())) / base


def welfare_ratio_experiment(w_orig, fractions, trials, game, scale="spectral",
                             seed=0, threads=1):
    """Monte-Carlo welfare ratio of randomly rewired graphs.

    For each fraction, rewires the graph ``trials`` times (stream id
    ``substream_id(fraction_index, trial_index)``), applies the scale
    mode, and averages ``(Wel(perturbed) - 1^T b) / (Wel(original) -
    1^T b)``. Trials whose equilibrium solve fails are excluded and
    counted.

    Returns a list of dicts with keys ``fraction, p_pert, stderr,
    failed_trials``.
    """
    w_orig = check_adjacency(w_orig)
    if trials < 1:
        raise ValueError("need at least one trial")
    scaled_orig = scale_adjacency(w_orig, scale, game.c)
    base = welfare(scaled_orig, game) - float(game.b.sum())
    payloads = []
    for fi, fraction in enumerate(fractions):
        for trial in range(trials):
            payloads.append((w_orig, float(fraction), seed,
                             substream_id(fi, trial), game.b, game.f.kind,
                             game.c, scale, base))

    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_rewire_trial, payloads, chunksize=8))
    else:
        results = [_rewire_trial(p) for p in payloads]

    rows = []
    for fi, fraction in enumerate(fractions):
        values = results[fi * trials:(fi + 1) * trials]
        kept = np.array([v for v in values if v is not None])
        failed = sum(1 for v in values if v is None)
        if kept.size == 0:
            rows.append({"fraction": float(fraction), "p_pert": float("nan"),
                         "stderr": float("nan"), "failed_trials": failed})
            continue
        stderr = 0.0 if kept.size == 1 \
            else float(kept.std(ddof=1) / np.sqrt(kept.size))
        rows.append({"fraction": float(fraction), "p_pert": float(kept.mean()),
                     "stderr": stderr, "failed_trials": failed})
    return rows
