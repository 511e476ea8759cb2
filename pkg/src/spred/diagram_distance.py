"""Wasserstein and bottleneck distances between persistence diagrams.

Diagrams of different sizes are compared by letting any point be matched to
its orthogonal projection onto the diagonal; two diagonal slots match for
free. Points with infinite death are matched among themselves by sorted
birth, which is optimal for any ``p`` on the real line.
"""

import math

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from .errors import InputError
from .persistence import PersistenceDiagram

# stand-in for allowed entries whose p-th power overflows after rescaling
_OVERFLOW_COST = 1e200
_UNDERFLOW_LOG = math.log(1e-280)


def _split(diagram):
    if isinstance(diagram, PersistenceDiagram):
        pairs, degree = diagram.pairs, diagram.degree
    else:
        pairs, degree = np.asarray(diagram, dtype=float).reshape(-1, 2), None
    finite = np.isfinite(pairs[:, 1])
    return pairs[finite], np.sort(pairs[~finite, 0]), degree


def _key(pairs, essential):
    return (len(pairs), pairs.tobytes(), essential.tobytes())


def _check_exponents(p, q):
    if not p >= 1:
        raise InputError(f"p must be >= 1, got {p}")
    if not q >= 1:
        raise InputError(f"q must be >= 1, got {q}")


def ground_distance(A, B, q):
    """``q``-norm distances between the rows of ``A`` and ``B``."""
    if math.isinf(q):
        return cdist(A, B, metric="chebyshev")
    return cdist(A, B, metric="minkowski", p=q)


def diagonal_distance(A, q):
    """``q``-norm distance of each point to its orthogonal projection on the diagonal."""
    half = (A[:, 1] - A[:, 0]) / 2.0
    return half if math.isinf(q) else half * 2.0 ** (1.0 / q)


def matching_costs(A, B, q):
    """Square cost matrix of the diagonal-augmented matching problem.

    Rows are the points of ``A`` followed by one diagonal slot per point of
    ``B``; columns are the points of ``B`` followed by one diagonal slot per
    point of ``A``. A point may only use its own diagonal slot; forbidden
    entries are ``inf`` and slot-to-slot entries are 0.
    """
    n1, n2 = len(A), len(B)
    C = np.full((n1 + n2, n1 + n2), np.inf)
    C[:n1, :n2] = ground_distance(A, B, q)
    C[np.arange(n1), n2 + np.arange(n1)] = diagonal_distance(A, q)
    C[n1 + np.arange(n2), np.arange(n2)] = diagonal_distance(B, q)
    C[n1:, n2:] = 0.0
    return C


def _min_power_sum(C, p):
    """Optimal assignment of ``C`` under ``sum c**p``, returned as ``(scale, S)``.

    The optimum equals ``scale**p * S``. Costs are divided by ``scale``
    before exponentiation; when the chosen matching's largest cost would
    underflow at that scale the problem is re-solved at the smaller scale,
    which keeps very large ``p`` accurate.
    """
    allowed = np.isfinite(C)
    scale = C[allowed].max()
    if scale == 0:
        return 0.0, 0.0
    for _ in range(64):
        with np.errstate(over="ignore", under="ignore"):
            W = np.where(allowed, (C / scale) ** p, np.inf)
        W[allowed & ~np.isfinite(W)] = _OVERFLOW_COST
        rows, cols = linear_sum_assignment(W)
        chosen = C[rows, cols]
        top = chosen.max()
        if top == 0:
            return 0.0, 0.0
        if top >= scale or p * math.log(top / scale) > _UNDERFLOW_LOG:
            break
        scale = top
    with np.errstate(under="ignore"):
        S = float(np.sum((chosen / scale) ** p))
    return float(scale), S


def wasserstein(D1, D2, p=2.0, q=math.inf):
    """``p``-Wasserstein distance between two diagrams under the ``q``-norm.

    Parameters
    ----------
    D1, D2 : PersistenceDiagram or array_like, shape (N, 2)
    p : float, default=2
        Order of the distance, ``1 <= p <= inf``; ``p = inf`` is the bottleneck distance.
    q : float, default=inf
        Ground norm on the plane, ``1 <= q <= inf``.

    Returns
    -------
    float
        ``inf`` when the diagrams have different numbers of infinite-death points.
    """
    _check_exponents(p, q)
    if math.isinf(p):
        return bottleneck(D1, D2, q)
    A, ess_a, deg_a = _split(D1)
    B, ess_b, deg_b = _split(D2)
    if deg_a is not None and deg_b is not None and deg_a != deg_b:
        raise InputError(f"cannot compare diagrams of degrees {deg_a} and {deg_b}")
    if len(ess_a) != len(ess_b):
        return math.inf
    if _key(B, ess_b) < _key(A, ess_a):
        # fixed argument order keeps the rounding, and thus the value, symmetric
        A, B = B, A
    ess = np.abs(ess_a - ess_b)
    scale, S = (0.0, 0.0) if len(A) + len(B) == 0 else _min_power_sum(matching_costs(A, B, q), p)
    top = max(scale, float(ess.max()) if len(ess) else 0.0)
    if top == 0:
        return 0.0
    with np.errstate(under="ignore"):
        total = S * (scale / top) ** p + float(np.sum((ess / top) ** p))
    return top * total ** (1.0 / p)


def _has_perfect_matching(mask):
    n = mask.shape[0]
    rows, cols = np.nonzero(mask)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(D1, D2, q=math.inf):
    """Bottleneck distance: smallest achievable largest matched cost.

    The finite part is found by binary search over the distinct entries of
    the augmented cost matrix, testing each threshold for a perfect
    bipartite matching.
    """
    _check_exponents(1.0, q)
    A, ess_a, deg_a = _split(D1)
    B, ess_b, deg_b = _split(D2)
    if deg_a is not None and deg_b is not None and deg_a != deg_b:
        raise InputError(f"cannot compare diagrams of degrees {deg_a} and {deg_b}")
    if len(ess_a) != len(ess_b):
        return math.inf
    ess = float(np.abs(ess_a - ess_b).max()) if len(ess_a) else 0.0
    if len(A) + len(B) == 0:
        return ess
    C = matching_costs(A, B, q)
    candidates = np.unique(C[np.isfinite(C)])
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(C <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(float(candidates[lo]), ess)
