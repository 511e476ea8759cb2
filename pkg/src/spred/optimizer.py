"""Topology-preserving projection search by simulated annealing on St(n, k).

The objective compares persistence diagrams of a point cloud and of its
projection::

    f(P) = sum_j w_j * W_p(D_j(X), D_j(X P)) - beta * tr(P^T Sigma P)

where ``Sigma`` is the empirical covariance of ``X`` (``beta = 0`` by
default). Candidates are drawn by adding i.i.d. Gaussian noise to the
current frame and re-orthonormalizing with a QR factorization.
"""

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import as_point_cloud, check_stiefel, pairwise_distances
from .diagram_distance import wasserstein
from .errors import ConfigError, DegenerateQRError, InputError
from .persistence import rips_diagrams


def parse_orders(text):
    """Parse ``"0:0.5,1:0.5"`` into ``((0, 0.5), (1, 0.5))``."""
    orders = []
    try:
        for item in text.split(","):
            degree, _, weight = item.partition(":")
            orders.append((int(degree), float(weight) if weight else 1.0))
    except ValueError:
        raise ConfigError(f"cannot parse orders {text!r}; expected e.g. '0:0.5,1:0.5'") from None
    return tuple(orders)


@dataclass(frozen=True)
class AnnealingConfig:
    """Parameters of the annealing search.

    ``orders`` lists ``(degree, weight)`` pairs; weights are normalized to
    sum to one. ``sigma`` is the standard deviation of the entrywise
    perturbation. Temperatures follow ``tau0 * gamma**t`` and are lowered
    after every ``steps_per_temp`` proposals until ``tau <= tau_end``.
    """

    tau0: float = 1.0
    tau_end: float = 1e-3
    gamma: float = 0.95
    sigma: float = 0.1
    steps_per_temp: int = 1
    seed: int = 0
    p: float = 2.0
    q: float = math.inf
    orders: tuple = ((0, 1.0),)
    pca_penalty: float = 0.0
    chains: int = 1

    def __post_init__(self):
        if not (self.tau0 > 0 and self.tau_end > 0):
            raise ConfigError("temperatures must be positive")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if int(self.steps_per_temp) < 1 or int(self.chains) < 1:
            raise ConfigError("steps_per_temp and chains must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not (self.p >= 1 and self.q >= 1):
            raise ConfigError("p and q must be >= 1")
        orders = parse_orders(self.orders) if isinstance(self.orders, str) else self.orders
        orders = tuple((int(d), float(w)) for d, w in orders)
        if not orders or any(d < 0 or w < 0 for d, w in orders):
            raise ConfigError("orders need non-negative degrees and weights")
        if len({d for d, _ in orders}) != len(orders):
            raise ConfigError("each degree may appear only once in orders")
        total = sum(w for _, w in orders)
        if total <= 0:
            raise ConfigError("order weights must not all be zero")
        object.__setattr__(self, "orders", tuple((d, w / total) for d, w in orders))

    @property
    def max_degree(self):
        return max(d for d, _ in self.orders)

    @property
    def max_dim_hint(self):
        return self.max_degree + 1

    def temperatures(self):
        """The cooling schedule ``tau0 * gamma**t`` for ``t = 0, 1, ...`` above ``tau_end``."""
        out = []
        t = 0
        while self.tau0 * self.gamma**t > self.tau_end:
            out.append(self.tau0 * self.gamma**t)
            t += 1
        return out


class TopologicalCost:
    """Cost of a frame ``P`` for a fixed cloud; the diagrams of ``X`` are computed once."""

    def __init__(self, X, orders=((0, 1.0),), p=2.0, q=math.inf, pca_penalty=0.0):
        self.X = as_point_cloud(X)
        total = sum(w for _, w in orders)
        self.orders = tuple((int(d), w / total) for d, w in orders)
        self.p, self.q = p, q
        self.pca_penalty = pca_penalty
        self.max_degree = max(d for d, _ in self.orders)
        self.reference = rips_diagrams(self.X, self.max_degree)
        self.covariance = np.cov(self.X, rowvar=False, bias=True).reshape(self.X.shape[1], -1)

    @classmethod
    def from_config(cls, X, cfg):
        return cls(X, cfg.orders, cfg.p, cfg.q, cfg.pca_penalty)

    def distances(self, P):
        """``{degree: W_p(D_j(X), D_j(XP))}`` for every configured degree."""
        Y = self.X @ P
        projected = rips_diagrams(Y, self.max_degree, distances=pairwise_distances(Y))
        return {d: wasserstein(self.reference[d], projected[d], self.p, self.q)
                for d, _ in self.orders}

    def __call__(self, P):
        dist = self.distances(P)
        value = sum(w * dist[d] for d, w in self.orders if w > 0)
        if self.pca_penalty:
            value -= self.pca_penalty * float(np.trace(P.T @ self.covariance @ P))
        return value


def cost(X, P, cfg):
    """Weighted topological cost of projecting ``X`` with the frame ``P``."""
    P = check_stiefel(P)
    return TopologicalCost.from_config(X, cfg)(P)


def sign_normalized_qr(A):
    """Q factor of ``A`` with the signs chosen so that ``diag(R) > 0``."""
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs, R * signs[:, None]


def perturb(P, sigma, rng, max_retries=10):
    """Random neighbour of ``P``: QR-orthonormalization of ``P + E``, ``E ~ N(0, sigma^2)``."""
    P = np.asarray(P, dtype=float)
    for _ in range(max_retries):
        Q, R = sign_normalized_qr(P + rng.normal(0.0, sigma, size=P.shape))
        if np.min(np.abs(np.diag(R))) > 1e-12 * max(1.0, np.abs(R).max()):
            return Q
    raise DegenerateQRError(f"perturbation stayed rank deficient after {max_retries} draws")


def accept(delta, tau, u):
    """Metropolis rule: always take improvements, otherwise iff ``u < exp(-delta / tau)``."""
    if delta < 0:
        return True
    if math.isnan(delta):
        return False
    return u < math.exp(-delta / tau)


@dataclass
class AnnealingTrace:
    """Per-proposal history of one annealing run."""

    temperature: list = field(default_factory=list)
    candidate_cost: list = field(default_factory=list)
    current_cost: list = field(default_factory=list)
    best_cost: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    best_P: np.ndarray = None
    initial_cost: float = math.nan

    @property
    def best(self):
        return self.best_cost[-1] if self.best_cost else self.initial_cost

    def __len__(self):
        return len(self.temperature)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "temperature", "candidate_cost", "current_cost",
                             "best_cost", "accepted"])
            for i, row in enumerate(zip(self.temperature, self.candidate_cost,
                                        self.current_cost, self.best_cost, self.accepted)):
                writer.writerow([i, *(repr(v) for v in row[:4]), int(row[4])])


def pca_projection(X, k):
    """Frame of the top-``k`` principal directions of ``X``.

    Each column is sign-normalized so that its largest-magnitude entry is
    positive. If fewer than ``k`` directions carry variance the frame is
    completed by eigenvectors of zero variance and a warning is issued.
    """
    X = as_point_cloud(X)
    m, n = X.shape
    if m < 2:
        raise InputError("PCA needs at least two points")
    if not 1 <= k <= n:
        raise InputError(f"k must lie in [1, {n}], got {k}")
    cov = np.cov(X, rowvar=False, bias=True).reshape(n, n)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:k]
    P = evecs[:, order]
    if np.sum(evals > 1e-12 * max(evals.max(), 1e-300)) < k:
        warnings.warn("data rank is below k; PCA frame completed arbitrarily", RuntimeWarning)
    idx = np.argmax(np.abs(P), axis=0)
    P = P * np.sign(P[idx, np.arange(k)])
    return P


def random_projection(n, k, rng):
    """Orthonormalized Gaussian ``n x k`` matrix."""
    return sign_normalized_qr(rng.normal(size=(n, k)))[0]


def anneal(X, cfg, k=2, init=None, cost_fn=None, rng=None):
    """Simulated annealing for the frame minimizing the topological cost.

    Parameters
    ----------
    X : ndarray, shape (m, n)
    cfg : AnnealingConfig
    k : int
        Target dimension.
    init : ndarray, shape (n, k), optional
        Starting frame; defaults to the PCA frame.
    cost_fn : callable, optional
        Replaces the topological cost (mainly for testing).
    rng : numpy.random.Generator, optional
        Defaults to ``default_rng(cfg.seed)``.

    Returns
    -------
    P_best : ndarray, shape (n, k)
        Best frame visited, not the last one.
    trace : AnnealingTrace
    """
    X = as_point_cloud(X)
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    f = TopologicalCost.from_config(X, cfg) if cost_fn is None else cost_fn
    P = pca_projection(X, k) if init is None else check_stiefel(init)
    current = f(P)
    best_P, best = P, current
    trace = AnnealingTrace(initial_cost=current)
    for tau in cfg.temperatures():
        for _ in range(int(cfg.steps_per_temp)):
            candidate = perturb(P, cfg.sigma, rng)
            value = f(candidate)
            delta = value - current
            u = rng.uniform() if not delta < 0 else 0.0
            took = accept(delta, tau, u)
            if took:
                P, current = candidate, value
                if current < best:
                    best_P, best = P, current
            trace.temperature.append(tau)
            trace.candidate_cost.append(value)
            trace.current_cost.append(current)
            trace.best_cost.append(best)
            trace.accepted.append(took)
    trace.best_P = best_P
    return best_P, trace


def chain_seeds(seed, chains):
    """Per-chain seeds; a single chain keeps the master seed."""
    if chains == 1:
        return [int(seed)]
    children = np.random.SeedSequence(int(seed)).spawn(chains)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _run_chain(args):
    X, cfg, k, init, seed = args
    return anneal(X, cfg, k=k, init=init, rng=np.random.default_rng(seed))


def anneal_chains(X, cfg, k=2, init=None, workers=None):
    """Run ``cfg.chains`` independent chains and keep the best one.

    Chains are executed in a process pool when ``workers > 1``; results are
    identical to a sequential run.
    """
    seeds = chain_seeds(cfg.seed, int(cfg.chains))
    jobs = [(X, cfg, k, init, s) for s in seeds]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chain, jobs))
    else:
        results = [_run_chain(job) for job in jobs]
    best = min(range(len(results)), key=lambda i: (results[i][1].best, i))
    return results[best][0], results[best][1], [r[1] for r in results]
