"""Topological equivalence of a cloud's filtration and that of its projection.

A projection ``L`` with contraction bound ``eta_min`` induces, for every
shift ``eta`` small enough, simplicial maps ``K_{t + eta} -> Q_t`` from the
Rips complexes of ``X`` to those of ``Y = L(X)`` that send vertex ``i`` to
vertex ``i``. The parameter range ``[0, diam(X) / 2)`` is cut into grid
intervals on which both complexes are constant, and each interval is
labelled

* ``T0`` - the Betti counts of ``K`` and ``Q`` differ in some degree ``<= l``;
* ``T1`` - counts agree but ``pi_1(Q / im K)`` is nontrivial at some point;
* ``T2`` - counts agree and ``pi_1(Q / im K)`` is trivial everywhere;
* ``T1-or-T2-unknown`` - the triviality test was inconclusive.

``mu_quasi_iso`` is the fraction of the range not in ``T0`` and
``mu_equiv`` the fraction in ``T2``; the latter is reported as a
``[lower, upper]`` interval to account for inconclusive intervals.
"""

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import as_point_cloud, check_stiefel, pairwise_distances, project
from .errors import InputError, WellDefinednessError
from .filtration import SimplicialComplex, complex_at, rips_filtration, simplicial_image, skeleton
from .groups import GroupPresentation, Verdict, free_reduce, is_trivial
from .persistence import compute_persistence

T0, T1, T2, UNKNOWN = "T0", "T1", "T2", "T1-or-T2-unknown"


# --------------------------------------------------------------------------
# edge-path groups


class _DisjointSet:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def components(K):
    """Vertex sets of the path components of ``K``, sorted by smallest vertex."""
    ds = _DisjointSet()
    for v in K.vertices:
        ds.find(v)
    for e in K.by_dim(1):
        ds.union(*e)
    groups = {}
    for v in K.vertices:
        groups.setdefault(ds.find(v), []).append(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


@dataclass
class EdgePathGroup:
    """Edge-path presentation of the component of ``basepoint`` in a complex.

    Generator ``i`` is the non-tree edge ``generators[i] = (u, v)`` with
    ``u < v``, read from ``u`` to ``v``.
    """

    basepoint: int
    vertices: list
    tree: set
    generators: list
    presentation: GroupPresentation
    parent: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._index = {e: i for i, e in enumerate(self.generators)}

    def edge_word(self, u, v):
        """Word of the oriented edge ``u -> v`` (empty for tree edges and ``u == v``)."""
        if u == v:
            return ()
        e = (min(u, v), max(u, v))
        i = self._index.get(e)
        if i is None:
            if e not in self.tree:
                raise InputError(f"edge {e} is not in the complex")
            return ()
        return (i + 1,) if u < v else (-(i + 1),)

    def path_word(self, path):
        word = []
        for u, v in zip(path, path[1:]):
            word.extend(self.edge_word(u, v))
        return free_reduce(word)

    def tree_path(self, v):
        """Vertices on the tree path from the basepoint to ``v``."""
        path = [v]
        while path[-1] != self.basepoint:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def generator_loop(self, i):
        """Closed vertex path at the basepoint representing generator ``i``."""
        u, v = self.generators[i]
        return self.tree_path(u) + self.tree_path(v)[::-1]


def edge_path_group(K, basepoint):
    """Spanning tree (Kruskal, lexicographic edge order) and presentation of ``pi_1``.

    One generator per non-tree edge of the basepoint's component and one
    relator per triangle, its boundary word ``e_ab e_bc e_ac^-1``.
    """
    if (basepoint,) not in K.simplices:
        raise InputError(f"basepoint {basepoint} is not a vertex of the complex")
    comp = next(c for c in components(K) if basepoint in c)
    members = set(comp)
    edges = [e for e in K.by_dim(1) if e[0] in members]
    ds = _DisjointSet()
    tree, generators = set(), []
    for e in edges:
        (tree.add if ds.union(*e) else generators.append)(e)
    adjacency = {v: [] for v in comp}
    for u, v in tree:
        adjacency[u].append(v)
        adjacency[v].append(u)
    parent = {basepoint: basepoint}
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for v in sorted(adjacency[u]):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    index = {e: i for i, e in enumerate(generators)}

    def letter(u, v):
        i = index.get((u, v))
        return () if i is None else (i + 1,)

    relators = []
    for a, b, c in K.by_dim(2):
        if a in members:
            ac = letter(a, c)
            relators.append(letter(a, b) + letter(b, c) + tuple(-x for x in ac))
    group = GroupPresentation(len(generators), tuple(relators))
    return EdgePathGroup(basepoint, comp, tree, generators, group, parent)


def edge_path_presentation(K, basepoint):
    """Presentation of ``pi_1(K, basepoint)`` from :func:`edge_path_group`."""
    return edge_path_group(K, basepoint).presentation


@dataclass
class QuotientComponent:
    """``pi_1`` of one path component of ``Q / im(K)``.

    ``case`` is ``"untouched"`` (no image vertex in the component),
    ``"single"`` (one image component lands in it) or ``"multiple"``.
    """

    vertices: list
    presentation: GroupPresentation
    case: str
    verdict: Verdict = None


def pi1_quotient_verdicts(K, Q, vmap, budget=10_000):
    """Per-component presentations of ``pi_1(Q / im K)`` as cokernels.

    For each component of ``Q`` the presentation of ``pi_1(Q)`` receives one
    extra relator per generator of every ``K`` component mapped into it (the
    generator's loop pushed through ``vmap``), plus one free generator per
    additional image component. Both complexes are cut to their 2-skeletons.
    """
    K2, Q2 = skeleton(K, 2), skeleton(Q, 2)
    k_comps = components(K2)
    q_comps = components(Q2)
    owner = {v: i for i, comp in enumerate(q_comps) for v in comp}
    landing = {i: [] for i in range(len(q_comps))}
    for comp in k_comps:
        image = int(vmap[comp[0]])
        if image not in owner:
            raise InputError(f"vertex {comp[0]} maps outside the target complex")
        landing[owner[image]].append(comp)
    out = []
    for i, comp in enumerate(q_comps):
        group = edge_path_group(Q2, comp[0])
        relators = list(group.presentation.relators)
        for kc in landing[i]:
            kgroup = edge_path_group(K2, kc[0])
            for g in range(len(kgroup.generators)):
                loop = [int(vmap[v]) for v in kgroup.generator_loop(g)]
                relators.append(group.path_word(loop))
        r = len(landing[i])
        extra = max(r - 1, 0)
        pres = GroupPresentation(group.presentation.n_generators + extra, tuple(relators))
        case = "untouched" if r == 0 else "single" if r == 1 else "multiple"
        out.append(QuotientComponent(comp, pres, case, is_trivial(pres, budget)))
    return out


def cone_quotient_presentation(Q_adj, A_adj):
    """Presentation of ``pi_1(Q / A)`` for Rips-type complexes sharing all vertices.

    ``Q_adj`` and ``A_adj`` are boolean adjacency matrices of the 1-skeletons
    of a flag complex ``Q`` and a subcomplex ``A`` that contains every
    vertex. Coning off ``A`` makes every ``A`` edge trivial; edges closing a
    triangle of ``Q`` with two trivial edges are trivial as well, and this
    is propagated to a fixed point. The remaining edges generate, and the
    triangles of ``Q`` through them give the relators.
    """
    Q_adj = np.asarray(Q_adj, dtype=bool)
    trivial = np.asarray(A_adj, dtype=bool) & Q_adj
    np.fill_diagonal(trivial, False)
    Q_off = Q_adj.copy()
    np.fill_diagonal(Q_off, False)
    while True:
        pending = Q_off & ~trivial
        if not pending.any():
            return GroupPresentation(0)
        t = trivial.astype(np.float32)
        closing = pending & ((t @ t) > 0)
        if not closing.any():
            break
        trivial |= closing
    iu, ju = np.nonzero(np.triu(pending))
    index = {(int(u), int(v)): i + 1 for i, (u, v) in enumerate(zip(iu, ju))}

    def letter(u, v):
        g = index.get((u, v) if u < v else (v, u))
        if g is None:
            return ()
        return (g,) if u < v else (-g,)

    relators = set()
    for u, v in index:
        for w in np.flatnonzero(Q_off[u] & Q_off[v]).tolist():
            a, b, c = sorted((u, v, w))
            relators.add(letter(a, b) + letter(b, c) + letter(c, a))
    return GroupPresentation(len(index), tuple(sorted(relators)))


# --------------------------------------------------------------------------
# quasi-isomorphism similarity


def _measure(grid, mask):
    """Total length of the grid intervals selected by ``mask``, summed run by run."""
    total = 0.0
    start = None
    for i, keep in enumerate(mask):
        if keep and start is None:
            start = grid[i]
        elif not keep and start is not None:
            total += grid[i] - start
            start = None
    if start is not None:
        total += grid[len(mask)] - start
    return total


def _shifted(diagram, eta):
    pairs = np.asarray(diagram.pairs, dtype=float).reshape(-1, 2)
    return pairs - eta


def _diagram_values(pairs):
    vals = pairs[np.isfinite(pairs)]
    return vals


def breakpoints(DX, DY, eta, diam_x):
    """Sorted grid ``0 = a_0 < ... < a_n = diam_x / 2`` from both diagram families."""
    end = diam_x / 2.0
    vals = [np.array([0.0, end])]
    for dx in DX:
        vals.append(_diagram_values(_shifted(dx, eta)))
    for dy in DY:
        vals.append(_diagram_values(np.asarray(dy.pairs).reshape(-1, 2)))
    grid = np.unique(np.concatenate(vals))
    return grid[(grid >= 0.0) & (grid <= end)]


def _check_diagrams(DX, DY):
    if len(DX) != len(DY):
        raise InputError("need diagrams of the same degrees for both clouds")
    for dx, dy in zip(DX, DY):
        if dx.degree != dy.degree:
            raise InputError("diagram degrees do not line up")


def mu_quasi_iso(DX, DY, eta, diam_x):
    """Quasi-isomorphism similarity from persistence diagrams.

    On each grid interval ``[a_i, a_{i+1})`` the number of ``X`` pairs with
    ``birth <= a_i + eta < death`` is compared with the number of ``Y``
    pairs with ``birth <= a_i < death``, degree by degree. An interval
    counts when every degree agrees.

    Returns
    -------
    mu : float
    report : dict
        ``grid``, per-interval ``counts_x`` / ``counts_y`` (one row per
        degree) and the boolean ``agree`` mask.
    """
    _check_diagrams(DX, DY)
    grid = breakpoints(DX, DY, eta, diam_x)
    end = diam_x / 2.0
    if end <= 0 or len(grid) < 2:
        return 1.0, {"grid": grid, "agree": np.ones(0, bool),
                     "counts_x": np.zeros((len(DX), 0), int), "counts_y": np.zeros((len(DX), 0), int)}
    left = grid[:-1]
    counts_x, counts_y = [], []
    for dx, dy in zip(DX, DY):
        px = _shifted(dx, eta)
        py = np.asarray(dy.pairs).reshape(-1, 2)
        counts_x.append(((px[:, 0][None, :] <= left[:, None]) & (left[:, None] < px[:, 1][None, :])).sum(1))
        counts_y.append(((py[:, 0][None, :] <= left[:, None]) & (left[:, None] < py[:, 1][None, :])).sum(1))
    counts_x = np.array(counts_x).reshape(len(DX), -1)
    counts_y = np.array(counts_y).reshape(len(DX), -1)
    agree = np.all(counts_x == counts_y, axis=0)
    mu = _measure(grid, agree) / end
    return mu, {"grid": grid, "agree": agree, "counts_x": counts_x, "counts_y": counts_y}


def _height_function(pairs):
    """Barcode height as a step function: ``(breaks, heights)`` with ``heights[i]`` on ``[breaks[i], breaks[i+1])``."""
    events = {}
    for b, d in pairs:
        events[b] = events.get(b, 0) + 1
        if math.isfinite(d):
            events[d] = events.get(d, 0) - 1
    breaks = sorted(events)
    heights = np.cumsum([events[x] for x in breaks]) if breaks else np.zeros(0, int)
    return np.array(breaks, dtype=float), heights


def _height_at(fn, t):
    breaks, heights = fn
    i = np.searchsorted(breaks, t, side="right") - 1
    return np.where(i >= 0, heights[np.maximum(i, 0)] if len(heights) else 0, 0)


def mu_quasi_iso_barcode(BX, BY, eta, diam_x):
    """Quasi-isomorphism similarity from barcode heights.

    Measures ``{t in [0, diam_x / 2) : ht_{t + eta}(B_X) == ht_t(B_Y)}``
    for every degree at once, using the piecewise-constant height
    functions of the barcodes.
    """
    _check_diagrams(BX, BY)
    end = diam_x / 2.0
    fx = [_height_function(_shifted(b, eta)) for b in BX]
    fy = [_height_function(np.asarray(b.pairs).reshape(-1, 2)) for b in BY]
    points = [np.array([0.0, end])]
    for breaks, _ in fx + fy:
        points.append(breaks[np.isfinite(breaks)])
    grid = np.unique(np.concatenate(points))
    grid = grid[(grid >= 0.0) & (grid <= end)]
    if end <= 0 or len(grid) < 2:
        return 1.0
    left = grid[:-1]
    equal = np.ones(len(left), dtype=bool)
    for gx, gy in zip(fx, fy):
        equal &= _height_at(gx, left) == _height_at(gy, left)
    return _measure(grid, equal) / end


# --------------------------------------------------------------------------
# canonical embedding and interval classification


@dataclass
class CanonicalEmbedding:
    """Interval-wise simplicial maps ``K_{a_i + eta} -> Q_{a_i}`` (vertex ``i -> i``).

    ``source_values`` / ``target_values`` are the edge-entry parameters of
    the two Rips filtrations expressed on the common grid (the source one
    already shifted by ``-eta``), so ``K_i`` holds the simplices whose
    source value is ``<= grid[i]`` and ``Q_i`` those whose target value is.
    """

    eta: float
    grid: np.ndarray
    source_values: np.ndarray
    target_values: np.ndarray
    diameter: float
    l: int
    skeleton_level: int
    eta_min: float
    eta_max: float
    diagrams_x: list = field(repr=False, default=None)
    diagrams_y: list = field(repr=False, default=None)

    @property
    def n_intervals(self):
        return len(self.grid) - 1

    def source_adjacency(self, i):
        return self.source_values <= self.grid[i]

    def target_adjacency(self, i):
        return self.target_values <= self.grid[i]

    def _flag(self, adjacency, level):
        m = adjacency.shape[0]
        simplices = [(v,) for v in range(m)]
        nbrs = [set(np.flatnonzero(adjacency[v]).tolist()) - {v} for v in range(m)]

        def extend(simplex, candidates):
            simplices.append(simplex)
            if len(simplex) <= level:
                for w in sorted(candidates):
                    if w > simplex[-1]:
                        extend(simplex + (w,), candidates & nbrs[w])

        for v in range(m):
            for w in sorted(nbrs[v]):
                if w > v:
                    extend((v, w), nbrs[v] & nbrs[w])
        return SimplicialComplex(simplices, close=False)

    def source_complex(self, i, level=None):
        """``K_i`` materialized up to dimension ``level`` (default: the embedding's)."""
        return self._flag(self.source_adjacency(i), self.skeleton_level if level is None else level)

    def target_complex(self, i, level=None):
        return self._flag(self.target_adjacency(i), self.skeleton_level if level is None else level)

    def vertex_map(self):
        return list(range(self.source_values.shape[0]))


def _default_distances(X, P):
    X = as_point_cloud(X)
    P = check_stiefel(P)
    DX = pairwise_distances(X)
    DY = pairwise_distances(project(X, P))
    # projections never expand distances; anything above DX is round-off
    return DX, np.minimum(DY, DX)


def _snap(values, tol):
    """Monotone map merging values that lie within ``tol`` of their predecessor."""
    flat = np.unique(values)
    if len(flat) == 0:
        return values
    starts = np.concatenate([[True], np.diff(flat) > tol])
    rep = flat[starts][np.cumsum(starts) - 1]
    return rep[np.searchsorted(flat, values)]


def canonical_embedding(X, P, eta=None, l=1, snap_tol=1e-12):
    """Build the interval-wise simplicial maps induced by the frame ``P``.

    Parameters
    ----------
    X : ndarray, shape (m, n)
    P : ndarray, shape (n, k)
    eta : float or None
        Shift in the radius scale; ``None`` uses ``eta_min / 2``.
    l : int
        Highest homology degree compared.
    snap_tol : float
        Edge values closer than ``snap_tol * diam(X)`` are merged so that
        round-off does not create spurious sliver intervals.

    Raises
    ------
    WellDefinednessError
        If some simplex of ``K_{t + eta}`` does not map into ``Q_t``.
    """
    DX, DY = _default_distances(X, P)
    m = DX.shape[0]
    if m < 2:
        raise InputError("need at least two points")
    iu = np.triu_indices(m, k=1)
    contraction = DX[iu] - DY[iu]
    eta_min, eta_max = float(contraction.min()), float(contraction.max())
    if eta is None:
        eta = eta_min / 2.0
    if not eta >= 0:
        raise InputError("eta must be non-negative")
    diam = float(DX.max())
    end = diam / 2.0
    edge_src = np.maximum(DX[iu] / 2.0 - eta, 0.0)
    edge_tgt = DY[iu] / 2.0
    both = _snap(np.concatenate([[0.0, end], edge_src, edge_tgt]), snap_tol * max(diam, 1e-300))
    end = both[1]
    edge_src, edge_tgt = both[2:2 + len(edge_src)], both[2 + len(edge_src):]
    # a flag simplex maps into Q_t iff its edges do
    bad = np.flatnonzero((edge_tgt > edge_src) & (edge_src < end))
    if len(bad):
        e = bad[np.argmin(edge_src[bad])]
        edge = (int(iu[0][e]), int(iu[1][e]))
        raise WellDefinednessError(
            f"edge {edge} is in K at t={edge_src[e] + eta:.6g} but not in Q at t={edge_src[e]:.6g}; "
            f"choose eta <= {eta_min / 2:.6g}", simplex=edge, parameter=float(edge_src[e]))
    source = np.zeros((m, m))
    source[iu] = edge_src
    source += source.T
    target = np.zeros((m, m))
    target[iu] = edge_tgt
    target += target.T
    grid = np.unique(np.concatenate([[0.0, end], edge_src, edge_tgt]))
    grid = grid[grid <= end]
    if len(grid) < 2:
        grid = np.array([0.0, end])
    level = max(l + 1, 2)
    # diagrams of the shifted source filtration, so counts at grid points need no offset
    diagrams_x = compute_persistence(rips_filtration(2.0 * source, l + 1), l)
    diagrams_y = compute_persistence(rips_filtration(2.0 * target, l + 1), l)
    return CanonicalEmbedding(
        eta=float(eta), grid=grid, source_values=source, target_values=target, diameter=diam,
        l=int(l), skeleton_level=level, eta_min=eta_min, eta_max=eta_max,
        diagrams_x=diagrams_x, diagrams_y=diagrams_y)


@dataclass
class SimilarityReport:
    eta: float
    l: int
    grid: np.ndarray
    classes: list
    mu_quasi_iso: float
    mu_equiv_lower: float
    mu_equiv_upper: float
    lengths: dict

    @property
    def mu_equiv(self):
        return (float(self.mu_equiv_lower), float(self.mu_equiv_upper))

    def to_dict(self):
        return {
            "eta": self.eta,
            "l": self.l,
            "grid": [float(a) for a in self.grid],
            "classes": list(self.classes),
            "mu_quasi_iso": float(self.mu_quasi_iso),
            "mu_equiv": [float(self.mu_equiv_lower), float(self.mu_equiv_upper)],
            "lengths": {k: float(v) for k, v in self.lengths.items()},
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _interval_verdict(emb, i, budget, method):
    src, tgt = emb.source_adjacency(i), emb.target_adjacency(i)
    if np.array_equal(src, tgt):
        return Verdict.TRIVIAL
    if method == "cone":
        return is_trivial(cone_quotient_presentation(tgt, src), budget)
    if method == "cokernel":
        K = emb.source_complex(i, level=2)
        Q = emb.target_complex(i, level=2)
        parts = pi1_quotient_verdicts(K, Q, emb.vertex_map(), budget)
        verdicts = {p.verdict for p in parts}
        if Verdict.NONTRIVIAL in verdicts:
            return Verdict.NONTRIVIAL
        return Verdict.UNKNOWN if Verdict.UNKNOWN in verdicts else Verdict.TRIVIAL
    raise InputError(f"unknown method {method!r}")


def classify_intervals(emb, l=None, budget=10_000, method="cone", pi1=True):
    """Split ``[0, diam(X) / 2)`` into ``T0``, ``T1``, ``T2`` and unknown intervals.

    Betti counts come from the persistence diagrams of both clouds; the
    fundamental group of ``Q_i / K_i`` is examined only on intervals whose
    counts agree. ``method="cone"`` presents that group through the cone
    on ``K_i`` (fast), ``method="cokernel"`` through the cokernel of
    ``pi_1(K_i) -> pi_1(Q_i)`` component by component; both give the
    same verdicts. With ``pi1=False`` every agreeing interval is reported
    as unknown.
    """
    l = emb.l if l is None else l
    if l > emb.l:
        raise InputError(f"embedding was built for degrees <= {emb.l}")
    grid = emb.grid
    end = grid[-1]
    left = grid[:-1]
    agree = np.ones(len(left), dtype=bool)
    for dx, dy in zip(emb.diagrams_x[: l + 1], emb.diagrams_y[: l + 1]):
        px = np.asarray(dx.pairs).reshape(-1, 2)
        py = np.asarray(dy.pairs).reshape(-1, 2)
        cx = ((px[:, 0][None, :] <= left[:, None]) & (left[:, None] < px[:, 1][None, :])).sum(1)
        cy = ((py[:, 0][None, :] <= left[:, None]) & (left[:, None] < py[:, 1][None, :])).sum(1)
        agree &= cx == cy
    classes = []
    for i in range(len(left)):
        if not agree[i]:
            classes.append(T0)
        elif not pi1:
            classes.append(UNKNOWN)
        else:
            v = _interval_verdict(emb, i, budget, method)
            classes.append({Verdict.TRIVIAL: T2, Verdict.NONTRIVIAL: T1}.get(v, UNKNOWN))
    classes_arr = np.array(classes, dtype=object)
    if end <= 0:
        return SimilarityReport(emb.eta, l, grid, classes, 1.0, 1.0, 1.0, {})
    lengths = {c: _measure(grid, classes_arr == c) for c in (T0, T1, T2, UNKNOWN)}
    mu_q = _measure(grid, classes_arr != T0) / end
    lower = lengths[T2] / end
    upper = _measure(grid, (classes_arr == T2) | (classes_arr == UNKNOWN)) / end
    return SimilarityReport(emb.eta, l, grid, classes, mu_q, lower, upper, lengths)


def similarity(X, P, eta=None, l=1, budget=10_000, method="cone", pi1=True):
    """Canonical embedding of ``P`` followed by :func:`classify_intervals`."""
    emb = canonical_embedding(X, P, eta=eta, l=l)
    return classify_intervals(emb, l, budget=budget, method=method, pi1=pi1)
