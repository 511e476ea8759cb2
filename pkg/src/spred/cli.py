"""Command-line entry point: ``spred <command> [options]``.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 bad configuration.
Options of ``reduce``, ``reduce-distributed``, ``similarity`` and
``experiment`` can also be given in a JSON file passed with ``--config``;
keys are option names with dashes or underscores, and flags given on the
command line win.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import datasets, io, plotting
from .core import as_point_cloud, check_stiefel, project
from .diagram_distance import bottleneck, wasserstein
from .equivalence import similarity
from .errors import ConfigError, InputError, NumericalError, SpredError, WellDefinednessError
from .experiments import METHODS, run_experiment
from .grassmann import distributed_reduce, weiszfeld_median
from .optimizer import AnnealingConfig, anneal_chains, parse_orders
from .persistence import rips_diagrams

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_CONFIG = 0, 2, 3, 4

ANNEALING_DEFAULTS = {
    "k": 2, "orders": "0:1", "p": 2.0, "q": math.inf, "tau0": 1.0, "tau_end": 1e-3,
    "gamma": 0.95, "sigma": 0.1, "steps_per_temp": 1, "seed": 0, "chains": 1,
    "pca_penalty": 0.0, "workers": 1,
}


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _add_annealing(parser):
    # defaults stay None so config-file values can fill the gaps
    a = parser.add_argument
    a("--input", required=True, help="point cloud CSV")
    a("--k", type=int, help="target dimension (default 2)")
    a("--orders", help='homology degrees and weights, e.g. "0:0.5,1:0.5" (default "0:1")')
    a("--p", type=_float, help="Wasserstein order (default 2)")
    a("--q", type=_float, help="ground norm on the plane (default inf)")
    a("--tau0", type=_float)
    a("--tau-end", type=_float)
    a("--gamma", type=_float)
    a("--sigma", type=_float, help="standard deviation of the entrywise perturbation")
    a("--steps-per-temp", type=int)
    a("--seed", type=int)
    a("--chains", type=int)
    a("--pca-penalty", type=_float)
    a("--workers", type=int)
    a("--out-proj", help="where to write the frame P (n x k CSV)")
    a("--out-points", help="where to write the projected cloud")
    a("--out-trace", help="where to write the per-step trace CSV")
    a("--config", help="JSON file with option values")


def build_parser():
    parser = argparse.ArgumentParser(prog="spred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a dataset to CSV")
    p.add_argument("--shape", required=True, help="cylinder or iris")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--noise-var", type=_float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("diagram", help="Rips persistence diagrams of a CSV cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--maxdim", type=int, default=1)
    p.add_argument("--outdir", required=True, help="receives H0.json .. H<maxdim>.json")

    p = sub.add_parser("distance", help="distance between two diagram JSON files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--p", type=_float, default=2.0, help="Wasserstein order; inf for bottleneck")
    p.add_argument("--q", type=_float, default=math.inf)

    p = sub.add_parser("reduce", help="anneal a topology-preserving projection")
    _add_annealing(p)

    p = sub.add_parser("reduce-distributed", help="anneal on subsets and take the median frame")
    _add_annealing(p)
    p.add_argument("--parts", type=int, help="number of disjoint subsets (default 1)")

    p = sub.add_parser("median", help="geometric median of frames on the Grassmannian")
    p.add_argument("--inputs", required=True, help="comma-separated frame CSVs")
    p.add_argument("--out", required=True)

    p = sub.add_parser("similarity", help="interval classification of a projection")
    p.add_argument("--input", required=True)
    p.add_argument("--proj", required=True)
    p.add_argument("--l", type=int)
    p.add_argument("--eta", help='shift, or "auto" for eta_min/2 (default)')
    p.add_argument("--budget", type=int)
    p.add_argument("--method", choices=["cone", "cokernel"])
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--config")

    p = sub.add_parser("plot", help="SVG of a 2-D cloud or of diagrams")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--points")
    group.add_argument("--diagram", action="append", help="diagram JSON (repeatable)")
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")

    p = sub.add_parser("experiment", help="PCA / random / annealed comparison")
    p.add_argument("--name", required=True, help="cylinder or iris")
    p.add_argument("--seed", type=int)
    p.add_argument("--outdir", required=True)
    p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--n", type=int)
    p.add_argument("--noise-var", type=_float)
    p.add_argument("--l", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--workers", type=int)
    for flag in ("--tau0", "--tau-end", "--gamma", "--sigma", "--p", "--q"):
        p.add_argument(flag, type=_float)
    p.add_argument("--steps-per-temp", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--config")
    return parser


def _resolve(args, defaults):
    """Merge defaults, the ``--config`` file and explicit flags (in that order)."""
    values = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, v in loaded.items():
            key = key.replace("-", "_")
            if key not in values:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = v
    for key in values:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


def _annealing_config(values):
    orders = values["orders"]
    orders = parse_orders(orders) if isinstance(orders, str) else tuple(map(tuple, orders))
    try:
        return AnnealingConfig(
            tau0=float(values["tau0"]), tau_end=float(values["tau_end"]),
            gamma=float(values["gamma"]), sigma=float(values["sigma"]),
            steps_per_temp=int(values["steps_per_temp"]), seed=int(values["seed"]),
            p=float(values["p"]), q=float(values["q"]), orders=orders,
            pca_penalty=float(values["pca_penalty"]), chains=int(values["chains"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpredError):
            raise
        raise ConfigError(str(exc)) from None


def _jsonable(values):
    return {key: ("inf" if isinstance(v, float) and math.isinf(v) else v) for key, v in values.items()}


def _write_outputs(args, values, X, P, trace=None):
    if args.out_proj:
        io.write_matrix(args.out_proj, P)
        io.write_json(args.out_proj + ".config.json", _jsonable(values))
    if args.out_points:
        io.write_matrix(args.out_points, project(X, P))
    if args.out_trace and trace is not None:
        trace.write_csv(args.out_trace)
    if not args.out_proj:
        for row in P:
            print(",".join(repr(float(x)) for x in row))


def cmd_generate(args):
    if args.shape == "cylinder":
        X = datasets.cylinder(args.n, args.noise_var, rng=np.random.default_rng(args.seed))
    elif args.shape in ("iris", "iris-passthrough"):
        X = datasets.load_iris()
    else:
        raise InputError(f"unknown shape {args.shape!r}; choose cylinder or iris")
    io.write_matrix(args.out, X)


def cmd_diagram(args):
    X = io.read_matrix(args.input)
    if args.maxdim < 0:
        raise InputError("maxdim must be non-negative")
    os.makedirs(args.outdir, exist_ok=True)
    for D in rips_diagrams(X, args.maxdim):
        io.write_diagram(os.path.join(args.outdir, f"H{D.degree}.json"), D)


def cmd_distance(args):
    A, B = io.read_diagram(args.first), io.read_diagram(args.second)
    value = bottleneck(A, B, args.q) if math.isinf(args.p) else wasserstein(A, B, args.p, args.q)
    print(f"{value:.12g}")


def cmd_reduce(args):
    values = _resolve(args, ANNEALING_DEFAULTS)
    cfg = _annealing_config(values)
    X = io.read_matrix(args.input)
    P, trace, _ = anneal_chains(X, cfg, k=int(values["k"]), workers=int(values["workers"]))
    _write_outputs(args, values, X, P, trace)


def cmd_reduce_distributed(args):
    values = _resolve(args, {**ANNEALING_DEFAULTS, "parts": 1})
    cfg = _annealing_config(values)
    X = io.read_matrix(args.input)
    P = distributed_reduce(X, int(values["parts"]), cfg, k=int(values["k"]),
                           workers=int(values["workers"]))
    _write_outputs(args, values, X, P)


def cmd_median(args):
    frames = [check_stiefel(io.read_matrix(path)) for path in args.inputs.split(",") if path]
    if not frames:
        raise InputError("no input frames")
    if len({F.shape for F in frames}) > 1:
        raise InputError("all frames must have the same shape")
    io.write_matrix(args.out, weiszfeld_median(frames))


def cmd_similarity(args):
    values = _resolve(args, {"l": 1, "eta": "auto", "budget": 10_000, "method": "cone"})
    eta = values["eta"]
    if eta in (None, "auto"):
        eta = None
    else:
        try:
            eta = float(eta)
        except ValueError:
            raise ConfigError(f"eta must be a number or 'auto', got {eta!r}") from None
    X = as_point_cloud(io.read_matrix(args.input))
    P = check_stiefel(io.read_matrix(args.proj))
    report = similarity(X, P, eta=eta, l=int(values["l"]), budget=int(values["budget"]),
                        method=values["method"])
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_plot(args):
    if args.points:
        svg = plotting.scatter_svg(io.read_matrix(args.points), title=args.title)
    else:
        svg = plotting.diagram_svg([io.read_diagram(path) for path in args.diagram], title=args.title)
    plotting.save_svg(args.out, svg)


def cmd_experiment(args):
    values = _resolve(args, {
        "seed": None, "methods": ",".join(METHODS), "n": None, "noise_var": None, "l": None,
        "budget": 10_000, "workers": 1, "tau0": 1.0, "tau_end": 1e-3, "gamma": 0.95,
        "sigma": 0.1, "p": 2.0, "q": math.inf, "steps_per_temp": 1, "chains": 1})
    if values["seed"] is None:
        raise ConfigError("experiment needs --seed (or seed in the config file)")
    cfg = AnnealingConfig(tau0=values["tau0"], tau_end=values["tau_end"], gamma=values["gamma"],
                          sigma=values["sigma"], p=values["p"], q=values["q"],
                          steps_per_temp=values["steps_per_temp"], chains=values["chains"])
    methods = values["methods"]
    methods = methods.split(",") if isinstance(methods, str) else list(methods)
    summary, _ = run_experiment(args.name, values["seed"], outdir=args.outdir, methods=methods,
                                cfg=cfg, n=values["n"], noise_var=values["noise_var"],
                                l=values["l"], budget=values["budget"], workers=values["workers"])
    print(json.dumps(summary["methods"], indent=2, sort_keys=True))


COMMANDS = {
    "generate": cmd_generate, "diagram": cmd_diagram, "distance": cmd_distance,
    "reduce": cmd_reduce, "reduce-distributed": cmd_reduce_distributed, "median": cmd_median,
    "similarity": cmd_similarity, "plot": cmd_plot, "experiment": cmd_experiment,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"spred: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"spred: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, WellDefinednessError) as exc:
        print(f"spred: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
