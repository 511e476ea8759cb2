"""Comparison runs: PCA, random projection and annealed projections on one dataset.

Each method produces a frame ``P``; for every frame the run records the
order-0 and order-1 topological costs, the similarity report of the
canonical embedding, and the projected cloud with its diagrams.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

import numpy as np

from . import datasets, io, plotting
from .diagram_distance import wasserstein
from .equivalence import similarity
from .errors import ConfigError
from .optimizer import AnnealingConfig, anneal_chains, pca_projection, random_projection
from .persistence import rips_diagrams

METHODS = ("pca", "random", "spred_order0", "spred_order1")

DEFAULTS = {
    "cylinder": {"n": 100, "noise_var": 0.05, "k": 2, "l": 1},
    "iris": {"k": 2, "l": 0},
}


def load_dataset(name, seed, n=100, noise_var=0.05):
    if name == "cylinder":
        return datasets.cylinder(n, noise_var, rng=np.random.default_rng(seed))
    if name == "iris":
        return datasets.load_iris()
    raise ConfigError(f"unknown experiment {name!r}; choose cylinder or iris")


def _frame(method, X, k, cfg, seed):
    """Frame and optional annealing trace for one method."""
    if method == "pca":
        return pca_projection(X, k), None
    if method == "random":
        return random_projection(X.shape[1], k, np.random.default_rng(seed)), None
    if method in ("spred_order0", "spred_order1"):
        degree = int(method[-1])
        run_cfg = replace(cfg, orders=((degree, 1.0),), seed=seed)
        P, trace, _ = anneal_chains(X, run_cfg, k=k)
        return P, trace
    raise ConfigError(f"unknown method {method!r}")


def _evaluate(job):
    method, X, k, l, cfg, seed, reference, budget, pi1 = job
    P, trace = _frame(method, X, k, cfg, seed)
    Y = X @ P
    diagrams = rips_diagrams(Y, max(1, l))
    costs = {f"f{j}": wasserstein(reference[j], diagrams[j], cfg.p, cfg.q) for j in (0, 1)}
    report = similarity(X, P, eta=None, l=l, budget=budget, pi1=pi1)
    return {"method": method, "P": P, "Y": Y, "diagrams": diagrams, "costs": costs,
            "report": report, "trace": trace}


def run_experiment(name, seed, outdir=None, methods=METHODS, cfg=None, n=None, noise_var=None,
                   k=None, l=None, budget=10_000, pi1=True, workers=None):
    """Run the comparison and optionally write a report directory.

    Parameters
    ----------
    name : {"cylinder", "iris"}
    seed : int
        Master seed; the data sample, the random baseline and each annealed
        method get their own child seed.
    outdir : str, optional
        When given, one subdirectory per method plus ``summary.json`` and
        the resolved ``config.json`` are written there.
    methods : sequence of str
        Any subset of :data:`METHODS`.
    workers : int, optional
        Run methods in a process pool of this size.

    Returns
    -------
    summary : dict
        ``{"methods": {method: {"f0", "f1", "mu_quasi_iso", "mu_equiv"}}, ...}``.
    results : dict
        Per-method frames, projected clouds, diagrams and reports; each entry
        also carries the data ``X`` and its diagrams under ``"reference"``.
    """
    if seed is None:
        raise ConfigError("experiments need an explicit master seed")
    if name not in DEFAULTS:
        raise ConfigError(f"unknown experiment {name!r}; choose cylinder or iris")
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ConfigError(f"unknown methods {sorted(unknown)}")
    opts = dict(DEFAULTS[name])
    opts.update({key: v for key, v in (("n", n), ("noise_var", noise_var), ("k", k), ("l", l))
                 if v is not None})
    cfg = AnnealingConfig() if cfg is None else cfg
    data_seq, *method_seqs = np.random.SeedSequence(int(seed)).spawn(1 + len(METHODS))
    method_seed = {m: int(s.generate_state(1, dtype=np.uint64)[0]) for m, s in zip(METHODS, method_seqs)}
    X = load_dataset(name, data_seq, opts.get("n", 100), opts.get("noise_var", 0.05))
    reference = rips_diagrams(X, 1)
    jobs = [(m, X, opts["k"], opts["l"], cfg, method_seed[m], reference, budget, pi1) for m in methods]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_evaluate, jobs))
    else:
        outputs = [_evaluate(job) for job in jobs]
    results = {out["method"]: out for out in outputs}
    for out in outputs:
        out["X"], out["reference"] = X, reference
    resolved = {"experiment": name, "seed": int(seed), "methods": list(methods),
                "budget": budget, "pi1": pi1, **opts,
                "annealing": {key: (v if not isinstance(v, float) or math.isfinite(v) else "inf")
                              for key, v in asdict(cfg).items()}}
    resolved["annealing"]["orders"] = [list(o) for o in cfg.orders]
    summary = {"config": resolved, "shape": list(X.shape), "methods": {}}
    for m, out in results.items():
        rep = out["report"]
        summary["methods"][m] = {
            **{key: float(v) for key, v in out["costs"].items()},
            "mu_quasi_iso": float(rep.mu_quasi_iso),
            "mu_equiv": [float(rep.mu_equiv_lower), float(rep.mu_equiv_upper)],
        }
    if outdir is not None:
        _write_report(outdir, X, reference, results, summary, resolved)
    return summary, results


def _write_report(outdir, X, reference, results, summary, resolved):
    os.makedirs(outdir, exist_ok=True)
    io.write_json(os.path.join(outdir, "config.json"), resolved)
    io.write_matrix(os.path.join(outdir, "X.csv"), X)
    for D in reference:
        io.write_diagram(os.path.join(outdir, f"X_H{D.degree}.json"), D)
    plotting.save_svg(os.path.join(outdir, "X_diagram.svg"),
                      plotting.diagram_svg(reference, title="original"))
    for m, out in results.items():
        sub = os.path.join(outdir, m)
        os.makedirs(sub, exist_ok=True)
        io.write_matrix(os.path.join(sub, "P.csv"), out["P"])
        io.write_matrix(os.path.join(sub, "Y.csv"), out["Y"])
        for D in out["diagrams"]:
            io.write_diagram(os.path.join(sub, f"H{D.degree}.json"), D)
        io.write_json(os.path.join(sub, "similarity.json"), out["report"].to_dict())
        if out["trace"] is not None:
            out["trace"].write_csv(os.path.join(sub, "trace.csv"))
        if out["Y"].shape[1] == 2:
            plotting.save_svg(os.path.join(sub, "points.svg"), plotting.scatter_svg(out["Y"], title=m))
        plotting.save_svg(os.path.join(sub, "diagram.svg"),
                          plotting.diagram_svg(out["diagrams"], title=m))
    io.write_json(os.path.join(outdir, "summary.json"), summary)
