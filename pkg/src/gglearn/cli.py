"""Command-line front end.

Subcommands wire the generators, solvers and evaluators together with
deterministic outputs: rerunning any command with the same flags and seed
produces byte-identical files (floats are always rendered at 17
significant digits, and every random draw comes from a Philox stream
keyed by (seed, stream id)).

Stream-id scheme: gen-graph draws from stream 1, gen-signals from stream
2, and the rewiring experiment from stream ``substream_id(fraction_index,
trial_index)``.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O failure.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .baselines import solve_linear_prior, solve_smoothness_only
from .datagen import (RngStream, SCALE_MODES, gen_lowpass_signals,
                      gen_gmrf_signals, gen_pa_graph, scale_adjacency,
                      welfare_ratio_experiment)
from .evaluation import SWEEP_METHODS, auc_edges, pareto_sweep
from .game import GameSpec, InteractionFunction, solve_equilibrium
from .graphs import marginal_benefit, signal_distance_matrix
from .io import (dumps_json17, fmt, load_edge_list, load_matrix_csv,
                 save_edge_list, save_matrix_csv)
from .linalg import ConvergenceError
from .two_timescale import LearnConfig, run_two_timescale

_STREAM_GEN_GRAPH = 1
_STREAM_GEN_SIGNALS = 2


class UsageError(Exception):
    """Bad flags or invalid configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_graph(path, fmt_kind="auto", undirected=False, num_nodes=None):
    if fmt_kind == "auto":
        fmt_kind = "csv" if str(path).endswith(".csv") else "edgelist"
    if fmt_kind == "csv":
        w = load_matrix_csv(path)
        if w.shape[0] != w.shape[1]:
            raise ValueError(f"{path}: adjacency CSV must be square")
        return w
    return load_edge_list(path, undirected=undirected, num_nodes=num_nodes)


def _benefit_vector(spec, n):
    if spec == "ones":
        return np.ones(n)
    if spec == "uniform":
        return np.full(n, 1.0 / n)
    b = load_matrix_csv(spec)
    if 1 in b.shape:
        b = b.ravel()
    if b.ndim != 1 or b.shape[0] != n:
        raise ValueError(f"benefit vector has shape {b.shape}, expected ({n},)")
    return b


def _float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}: {exc}") from None


def _write_text(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _build_parser():
    parser = _Parser(prog="gglearn",
                     description="Graph learning with a network-game prior")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("gen-graph", help="generate a random graph")
    p.add_argument("--model", choices=["pa"], default="pa")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-signals", help="generate smooth graph signals")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["auto", "edgelist", "csv"],
                   default="auto")
    p.add_argument("--undirected", action="store_true",
                   help="mirror each edge-list line in both directions")
    p.add_argument("--model", choices=["lowpass", "gmrf"], default="lowpass")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--ridge", type=float, default=1e-2)
    p.add_argument("--scale", choices=SCALE_MODES, default="spectral")
    p.add_argument("--scale-c", type=float, default=0.95)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("learn", help="learn a graph from signals")
    p.add_argument("--replay", metavar="META",
                   help="rerun from a meta.json written by a previous run")
    p.add_argument("--method", choices=["glgp", "smooth", "linapprox"],
                   default="glgp")
    p.add_argument("--signals")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=200.0)
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.003)
    p.add_argument("--iters", type=int, default=700)
    p.add_argument("--f", choices=["identity", "log1p"], default="identity")
    p.add_argument("--step-mode", choices=["manual", "theory"],
                   default="manual")
    p.add_argument("--ne-tol", type=float, default=1e-12)
    p.add_argument("--exact-stationarity-every", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix")

    p = sub.add_parser("eval-auc", help="edge-recovery AUC vs a ground truth")
    p.add_argument("--learned", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--format", choices=["auto", "edgelist", "csv"],
                   default="auto")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--symmetrize", choices=["avg", "max"], default="avg")
    p.add_argument("--out")

    p = sub.add_parser("welfare", help="total welfare of a graph's equilibrium")
    _game_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("ne", help="solve the equilibrium of a graph")
    _game_flags(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--out")

    p = sub.add_parser("rewire-experiment",
                       help="welfare sensitivity to random rewiring")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["auto", "edgelist", "csv"],
                   default="auto")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--fractions", required=True,
                   help="comma-separated fractions, e.g. 0.1,0.2")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scale", choices=SCALE_MODES, default="spectral")
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--f", choices=["identity", "log1p"], default="identity")
    p.add_argument("--b", default="ones")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")

    p = sub.add_parser("pareto",
                       help="objective/welfare sweep over a lambda grid")
    p.add_argument("--signals", required=True)
    p.add_argument("--lambdas", required=True)
    p.add_argument("--beta", type=float, default=200.0)
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.003)
    p.add_argument("--iters", type=int, default=700)
    p.add_argument("--f", choices=["identity", "log1p"], default="identity")
    p.add_argument("--methods", default="glgp,linapprox,smooth")
    p.add_argument("--truth")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--symmetrize", choices=["avg", "max"], default="avg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    return parser


def _game_flags(p):
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["auto", "edgelist", "csv"],
                   default="auto")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--b", default="ones",
                   help="'ones', 'uniform', or a CSV vector file")
    p.add_argument("--f", choices=["identity", "log1p"], default="identity")
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--scale", choices=SCALE_MODES, default="none")


def _cmd_gen_graph(args):
    if args.nodes < 2:
        raise UsageError("--nodes must be at least 2")
    rng = RngStream(args.seed, _STREAM_GEN_GRAPH).generator()
    w = gen_pa_graph(args.nodes, rng)
    save_edge_list(args.out, w, undirected=True)
    return 0


def _cmd_gen_signals(args):
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    w = _load_graph(args.graph, args.format, undirected=args.undirected)
    rng = RngStream(args.seed, _STREAM_GEN_SIGNALS).generator()
    if args.model == "lowpass":
        x = gen_lowpass_signals(w, args.samples, args.sigma, rng,
                                scale=args.scale, scale_c=args.scale_c)
    else:
        x = gen_gmrf_signals(w, args.samples, args.ridge, rng)
    save_matrix_csv(args.out, x)
    return 0


def _learn_config(args):
    # LearnConfig's validator reports every violation in one message.
    try:
        return LearnConfig(
            lam=args.lam, beta=args.beta, c=args.c, alpha=args.alpha,
            gamma=args.gamma, max_iter=args.iters, ne_tol=args.ne_tol,
            seed=args.seed, f_kind=args.f, step_mode=args.step_mode,
            exact_stationarity_every=args.exact_stationarity_every)
    except ValueError as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _cmd_learn(args):
    if args.replay:
        import json
        with open(args.replay, "r", encoding="utf-8") as handle:
            meta = json.load(handle)
        method = meta["method"]
        signals_path = meta["signals"]
        config = LearnConfig(**meta["config"])
        out_prefix = args.out_prefix or meta["out_prefix"]
    else:
        if not args.signals:
            raise UsageError("--signals is required (or use --replay)")
        if not args.out_prefix:
            raise UsageError("--out-prefix is required")
        method = args.method
        signals_path = args.signals
        config = _learn_config(args)
        out_prefix = args.out_prefix

    x = load_matrix_csv(signals_path)
    d = signal_distance_matrix(x)
    b = marginal_benefit(d)
    game = GameSpec(b=b, f=InteractionFunction(config.f_kind), c=config.c)

    if method == "glgp":
        trace = run_two_timescale(config, d, b)
        w = trace.w
        trace_doc = {
            "iterations": trace.iterations,
            "alpha": trace.alpha,
            "gamma": trace.gamma,
            "ell_value": trace.ell_value,
            "stationarity": trace.stationarity,
            "ne_residual": trace.ne_residual,
            "exact_iterations": trace.exact_iterations,
            "exact_stationarity": trace.exact_stationarity,
            "final_w_path": f"{out_prefix}.adj.csv",
            "final_y": trace.y,
        }
    else:
        if method == "smooth":
            w = solve_smoothness_only(d, config.beta, config.c)
        else:
            w = solve_linear_prior(d, config.beta, config.c, config.lam, b)
        y = solve_equilibrium(w, game, tol=config.ne_tol).y
        trace_doc = {
            "iterations": 0,
            "alpha": config.alpha,
            "gamma": config.gamma,
            "ell_value": [],
            "stationarity": [],
            "ne_residual": [],
            "exact_iterations": [],
            "exact_stationarity": [],
            "final_w_path": f"{out_prefix}.adj.csv",
            "final_y": y,
        }

    meta_doc = {
        "command": "learn",
        "version": __version__,
        "method": method,
        "signals": signals_path,
        "config": config.to_dict(),
        "out_prefix": out_prefix,
    }
    save_matrix_csv(f"{out_prefix}.adj.csv", w)
    _write_text(f"{out_prefix}.trace.json", dumps_json17(trace_doc) + "\n")
    _write_text(f"{out_prefix}.meta.json", dumps_json17(meta_doc) + "\n")
    return 0


def _cmd_eval_auc(args):
    learned = load_matrix_csv(args.learned)
    truth = _load_graph(args.truth, args.format, undirected=args.undirected)
    value = auc_edges(learned, truth, symmetrize=args.symmetrize)
    _write_text(args.out, fmt(value) + "\n")
    return 0


def _game_from_args(args, w):
    b = _benefit_vector(args.b, w.shape[0])
    return GameSpec(b=b, f=InteractionFunction(args.f), c=args.c)


def _cmd_welfare(args):
    w = _load_graph(args.graph, args.format, undirected=args.undirected)
    game = _game_from_args(args, w)
    scaled = scale_adjacency(w, args.scale, args.c)
    value = solve_equilibrium(scaled, game).y.sum()
    _write_text(args.out, fmt(value) + "\n")
    return 0


def _cmd_ne(args):
    w = _load_graph(args.graph, args.format, undirected=args.undirected)
    game = _game_from_args(args, w)
    scaled = scale_adjacency(w, args.scale, args.c)
    eq = solve_equilibrium(scaled, game, tol=args.tol, max_iter=args.max_iter)
    doc = {"y": eq.y, "residual": eq.residual, "iterations": eq.iterations}
    _write_text(args.out, dumps_json17(doc) + "\n")
    return 0


def _cmd_rewire_experiment(args):
    w = _load_graph(args.graph, args.format, undirected=args.undirected)
    fractions = _float_list(args.fractions)
    if not fractions:
        raise UsageError("--fractions must name at least one fraction")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    game = GameSpec(b=_benefit_vector(args.b, w.shape[0]),
                    f=InteractionFunction(args.f), c=args.c)
    rows = welfare_ratio_experiment(w, fractions, args.trials, game,
                                    scale=args.scale, seed=args.seed,
                                    threads=args.threads)
    lines = ["fraction,P_pert,stderr,failed_trials"]
    for row in rows:
        lines.append(",".join([fmt(row["fraction"]), fmt(row["p_pert"]),
                               fmt(row["stderr"]), str(row["failed_trials"])]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_pareto(args):
    x = load_matrix_csv(args.signals)
    d = signal_distance_matrix(x)
    b = marginal_benefit(d)
    lambdas = _float_list(args.lambdas)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for method in methods:
        if method not in SWEEP_METHODS:
            raise UsageError(f"unknown method {method!r}; "
                             f"choose from {SWEEP_METHODS}")
    w_true = None
    if args.truth:
        w_true = _load_graph(args.truth, undirected=args.undirected)
    config = LearnConfig(beta=args.beta, c=args.c, alpha=args.alpha,
                         gamma=args.gamma, max_iter=args.iters,
                         f_kind=args.f, seed=args.seed)
    rows = pareto_sweep(d, b, lambdas, config, methods=methods, w_true=w_true,
                        symmetrize=args.symmetrize, threads=args.threads)
    lines = ["method,lambda,J,welfare,auc"]
    for row in rows:
        auc = fmt(row["auc"]) if "auc" in row else ""
        lines.append(",".join([row["method"], fmt(row["lam"]),
                               fmt(row["objective"]), fmt(row["welfare"]),
                               auc]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


_HANDLERS = {
    "gen-graph": _cmd_gen_graph,
    "gen-signals": _cmd_gen_signals,
    "learn": _cmd_learn,
    "eval-auc": _cmd_eval_auc,
    "welfare": _cmd_welfare,
    "ne": _cmd_ne,
    "rewire-experiment": _cmd_rewire_experiment,
    "pareto": _cmd_pareto,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("no command given (try --help)")
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
