"""Grassmann geometry and the distributed (split, solve, median) reduction.

Points of Gr(n, k) are represented by ``n x k`` column-orthonormal frames;
two frames are the same point when their column spans agree.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .core import as_point_cloud, principal_angles
from .errors import CutLocusError, InputError
from .optimizer import anneal_chains

#: Tangent vectors shorter than this are treated as "at the iterate" in Weiszfeld.
ANCHOR_TOL = 1e-12


def exp_map(X, delta):
    """Geodesic from span(X) with initial velocity ``delta`` evaluated at time 1.

    With ``delta = U diag(s) V^T`` (thin SVD) the endpoint is
    ``X V cos(s) V^T + U sin(s) V^T``.
    """
    X = np.asarray(X, dtype=float)
    U, s, Vt = np.linalg.svd(np.asarray(delta, dtype=float), full_matrices=False)
    return (X @ Vt.T) * np.cos(s) @ Vt + U * np.sin(s) @ Vt


def log_map(X, Y):
    """Tangent vector at ``X`` whose geodesic reaches span(Y) at time 1.

    Computed as ``U arctan(S) V^T`` where ``U S V^T`` is the thin SVD of
    ``(I - X X^T) Y (X^T Y)^{-1}``.

    Raises
    ------
    CutLocusError
        If ``X^T Y`` is singular, i.e. some principal angle equals pi/2.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    XtY = X.T @ Y
    if np.linalg.svd(XtY, compute_uv=False).min() < 1e-12:
        raise CutLocusError("logarithm undefined: the subspaces have a principal angle of pi/2")
    M = np.linalg.solve(XtY.T, (Y - X @ XtY).T).T
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return U * np.arctan(s) @ Vt


def distance(X, Y):
    """Geodesic distance: 2-norm of the principal angles."""
    return float(np.linalg.norm(principal_angles(X, Y)))


def same_point(X, Y, tol=1e-8):
    return bool(principal_angles(X, Y).max() <= tol)


def _top_eigenvectors(M, k):
    evals, evecs = np.linalg.eigh(M)
    order = np.argsort(evals)[::-1]
    if k < len(evals) and evals[order[k - 1]] - evals[order[k]] <= 1e-12:
        warnings.warn("eigenvalues k and k+1 coincide; the mean subspace is ambiguous",
                      RuntimeWarning)
    P = evecs[:, order[:k]]
    idx = np.argmax(np.abs(P), axis=0)
    return P * np.sign(P[idx, np.arange(k)])


def extrinsic_mean(Ps):
    """Top-``k`` eigenvectors of the average projector ``mean(P_i P_i^T)``."""
    Ps = [np.asarray(P, dtype=float) for P in Ps]
    if not Ps:
        raise InputError("extrinsic mean of an empty collection")
    k = Ps[0].shape[1]
    M = sum(P @ P.T for P in Ps) / len(Ps)
    return _top_eigenvectors(M, k)


def median_objective(P, Ps):
    """Sum of geodesic distances from ``P`` to every anchor."""
    return float(sum(distance(P, Q) for Q in Ps))


def weiszfeld_median(Ps, tol=1e-8, max_iter=1000, init=None, full_output=False):
    """Geometric median on the Grassmannian by the Weiszfeld iteration.

    Starting from the extrinsic mean, each step moves along the geodesic in
    the direction of the inverse-distance-weighted average of the
    logarithms of the anchors. Anchors within ``ANCHOR_TOL`` of the iterate
    are left out of both sums; if the remaining unit directions cannot
    outweigh them, the iterate already is the median and the loop stops.

    Parameters
    ----------
    Ps : sequence of ndarray, shape (n, k)
    tol : float
        Stop once consecutive iterates are closer than ``tol`` (geodesic distance).
    max_iter : int
    init : ndarray, optional
        Starting frame; the extrinsic mean by default.
    full_output : bool
        Also return a dict with ``iterations``, ``objective`` (one value per
        iterate) and ``converged``.
    """
    Ps = [np.asarray(P, dtype=float) for P in Ps]
    if not Ps:
        raise InputError("median of an empty collection")
    P = extrinsic_mean(Ps) if init is None else np.asarray(init, dtype=float)
    objective = [median_objective(P, Ps)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        logs = [log_map(P, Q) for Q in Ps]
        norms = np.array([np.linalg.norm(L) for L in logs])
        active = norms >= ANCHOR_TOL
        if not active.any():
            converged = True
            break
        units = sum(L / r for L, r, a in zip(logs, norms, active) if a)
        coincident = int(np.count_nonzero(~active))
        if coincident and np.linalg.norm(units) <= coincident:
            converged = True
            break
        step = units / np.sum(1.0 / norms[active])
        P_next = exp_map(P, step)
        moved = distance(P, P_next)
        P = P_next
        objective.append(median_objective(P, Ps))
        if moved < tol:
            converged = True
            break
    if full_output:
        return P, {"iterations": it, "objective": objective, "converged": converged}
    return P


def partition(X, m_parts, rng):
    """Shuffle the rows of ``X`` into ``m_parts`` disjoint subsets of near-equal size."""
    X = as_point_cloud(X)
    if not 1 <= m_parts <= len(X):
        raise InputError(f"cannot split {len(X)} points into {m_parts} parts")
    if m_parts == 1:
        return [X]
    return [X[idx] for idx in np.array_split(rng.permutation(len(X)), m_parts)]


def _subset_job(args):
    Xi, cfg, k = args
    return anneal_chains(Xi, cfg, k=k)[0]


def distributed_reduce(X, m_parts, cfg, k=2, workers=None, full_output=False):
    """Anneal on disjoint subsets and combine the frames by their geometric median.

    With ``m_parts == 1`` this is exactly the plain annealing run. Subset
    ``i`` uses a seed derived from ``cfg.seed`` and ``i``; with
    ``workers > 1`` subsets are solved in a process pool.
    """
    X = as_point_cloud(X)
    if m_parts == 1:
        P = anneal_chains(X, cfg, k=k)[0]
        return (P, {"subset_frames": [P]}) if full_output else P
    seq = np.random.SeedSequence(int(cfg.seed)).spawn(m_parts + 1)
    parts = partition(X, m_parts, np.random.default_rng(seq[0]))
    jobs = [(Xi, replace(cfg, seed=int(s.generate_state(1, dtype=np.uint64)[0])), k)
            for Xi, s in zip(parts, seq[1:])]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            frames = list(pool.map(_subset_job, jobs))
    else:
        frames = [_subset_job(job) for job in jobs]
    P = weiszfeld_median(frames)
    return (P, {"subset_frames": frames}) if full_output else P
