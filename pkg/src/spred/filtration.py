"""Vietoris-Rips filtrations in the radius scale and simplicial complexes.

A simplex is a strictly increasing tuple of point indices. Rips values use
the radius convention: a simplex enters at half its largest edge length, so
``{a, b}`` is present at parameter ``t`` iff ``|a - b| <= 2 t``.
"""

import json
from itertools import combinations

import numpy as np

from .errors import InputError


def _binomial_table(m, k):
    """``table[v, i] = C(v, i)`` for ``v <= m``, ``i <= k`` as int64."""
    table = np.zeros((m + 1, k + 1), dtype=np.int64)
    table[:, 0] = 1
    for v in range(1, m + 1):
        table[v, 1:] = table[v - 1, 1:] + table[v - 1, :-1]
    return table


def colex_rank(vertices, table):
    """Combinatorial-number-system rank of each row of a sorted vertex array."""
    vertices = np.asarray(vertices, dtype=np.int64)
    ranks = np.zeros(vertices.shape[0], dtype=np.int64)
    for i in range(vertices.shape[1]):
        ranks += table[vertices[:, i], i + 1]
    return ranks


class FilteredComplex:
    """A finite filtration stored dimension by dimension.

    Parameters
    ----------
    vertices : list of ndarray
        ``vertices[d]`` has shape ``(N_d, d + 1)``; each row is a strictly
        increasing vertex tuple and rows are in lexicographic order.
    values : list of ndarray
        ``values[d][i]`` is the filtration value of ``vertices[d][i]``.
    vertex_count : int
        Number of vertex labels ``0 .. vertex_count - 1``.

    Notes
    -----
    The filtration order sorts simplices by ``(value, dim, lex)``; the
    position of a ``d``-simplex among all ``d``-simplices in that order is
    available from :meth:`order`.
    """

    def __init__(self, vertices, values, vertex_count):
        self.vertices = [np.asarray(v, dtype=np.int64).reshape(-1, d + 1)
                         for d, v in enumerate(vertices)]
        self.values = [np.asarray(v, dtype=float).ravel() for v in values]
        self.vertex_count = int(vertex_count)
        if len(self.vertices) != len(self.values):
            raise InputError("vertices and values must have one entry per dimension")
        for d, (vs, vals) in enumerate(zip(self.vertices, self.values)):
            if vs.shape[0] != vals.shape[0]:
                raise InputError(f"dimension {d}: {vs.shape[0]} simplices but {vals.shape[0]} values")
        self._order = None
        self._table = None

    @property
    def max_dim(self):
        return len(self.vertices) - 1

    def __len__(self):
        return sum(v.shape[0] for v in self.vertices)

    @classmethod
    def from_simplices(cls, pairs, vertex_count=None):
        """Build from an iterable of ``(simplex, value)``; the input need not be sorted."""
        by_dim = {}
        for simplex, value in pairs:
            s = tuple(sorted(int(v) for v in simplex))
            if len(set(s)) != len(s) or not s:
                raise InputError(f"invalid simplex {simplex!r}")
            by_dim.setdefault(len(s) - 1, []).append((s, float(value)))
        if not by_dim:
            raise InputError("empty filtration")
        top = max(by_dim)
        vertices, values = [], []
        for d in range(top + 1):
            items = sorted(by_dim.get(d, []))
            vertices.append(np.array([s for s, _ in items], dtype=np.int64).reshape(-1, d + 1))
            values.append(np.array([v for _, v in items], dtype=float))
        if vertex_count is None:
            vertex_count = int(vertices[0].max()) + 1 if vertices[0].size else 0
        return cls(vertices, values, vertex_count)

    def binomials(self):
        if self._table is None:
            self._table = _binomial_table(max(self.vertex_count, 1), self.max_dim + 1)
        return self._table

    def order(self, d):
        """Indices of the ``d``-simplices sorted by ``(value, lex)``."""
        if self._order is None:
            self._order = [np.lexsort((np.arange(len(v)), v)) for v in self.values]
        return self._order[d]

    def simplices(self):
        """All ``(simplex, value)`` pairs in filtration order ``(value, dim, lex)``."""
        items = []
        for d in range(self.max_dim + 1):
            verts = self.vertices[d].tolist()
            vals = self.values[d].tolist()
            items.extend((vals[i], d, tuple(verts[i])) for i in range(len(vals)))
        items.sort()
        return [(s, v) for v, _, s in items]

    def validate(self):
        """Raise unless every face of every simplex is present with a value no larger."""
        table = self.binomials()
        for d in range(1, self.max_dim + 1):
            if not len(self.vertices[d]):
                continue
            lower_rank = colex_rank(self.vertices[d - 1], table)
            sorter = np.argsort(lower_rank)
            for drop in range(d + 1):
                faces = np.delete(self.vertices[d], drop, axis=1)
                rank = colex_rank(faces, table)
                pos = np.searchsorted(lower_rank, rank, sorter=sorter)
                pos = np.minimum(pos, len(lower_rank) - 1)
                found = sorter[pos]
                ok = lower_rank[found] == rank if len(lower_rank) else np.zeros(len(rank), bool)
                if not np.all(ok):
                    bad = int(np.flatnonzero(~ok)[0])
                    raise InputError(f"face {tuple(faces[bad])} of {tuple(self.vertices[d][bad])} missing")
                if np.any(self.values[d - 1][found] > self.values[d]):
                    raise InputError(f"a face enters after its coface in dimension {d}")

    def to_json(self):
        """Debug dump: list of ``{"vertices": [...], "value": ...}`` in filtration order."""
        return json.dumps([{"vertices": list(s), "value": v} for s, v in self.simplices()])


def rips_filtration(D, max_dim):
    """Vietoris-Rips filtration of a distance matrix up to dimension ``max_dim``.

    Every vertex subset of size ``<= max_dim + 1`` is included with value
    equal to half its largest pairwise distance; vertices enter at 0.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {D.shape}")
    if max_dim < 0:
        raise InputError("max_dim must be non-negative")
    m = D.shape[0]
    vertices = [np.arange(m, dtype=np.int64).reshape(-1, 1)]
    values = [np.zeros(m)]
    for d in range(1, max_dim + 1):
        if d + 1 > m:
            vertices.append(np.zeros((0, d + 1), dtype=np.int64))
            values.append(np.zeros(0))
            continue
        simp = np.fromiter(
            (v for c in combinations(range(m), d + 1) for v in c),
            dtype=np.int64).reshape(-1, d + 1)
        val = np.zeros(len(simp))
        for a, b in combinations(range(d + 1), 2):
            np.maximum(val, D[simp[:, a], simp[:, b]], out=val)
        vertices.append(simp)
        values.append(val / 2.0)
    return FilteredComplex(vertices, values, m)


class SimplicialComplex:
    """A face-closed finite set of simplices (sorted vertex tuples)."""

    def __init__(self, simplices, close=True):
        simplices = {tuple(sorted(int(v) for v in s)) for s in simplices}
        if close:
            closed = set()
            for s in simplices:
                for r in range(1, len(s) + 1):
                    closed.update(combinations(s, r))
            simplices = closed
        self.simplices = frozenset(simplices)

    @property
    def vertices(self):
        return sorted(s[0] for s in self.simplices if len(s) == 1)

    @property
    def dim(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def by_dim(self, d):
        """Sorted list of the ``d``-simplices."""
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def __contains__(self, simplex):
        return tuple(sorted(simplex)) in self.simplices

    def __iter__(self):
        return iter(sorted(self.simplices, key=lambda s: (len(s), s)))

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    def __le__(self, other):
        return self.simplices <= other.simplices

    def __repr__(self):
        counts = [len(self.by_dim(d)) for d in range(self.dim + 1)]
        return f"SimplicialComplex(f-vector={counts})"


def complex_at(F, t):
    """The complex ``{sigma : value(sigma) <= t}`` of a filtration."""
    if t < 0:
        raise InputError("filtration parameter must be non-negative")
    simplices = []
    for d in range(F.max_dim + 1):
        keep = F.values[d] <= t
        simplices.extend(map(tuple, F.vertices[d][keep].tolist()))
    return SimplicialComplex(simplices, close=False)


def skeleton(K, l):
    """Simplices of ``K`` of dimension at most ``l``."""
    if l < 0:
        raise InputError("skeleton level must be non-negative")
    return SimplicialComplex([s for s in K.simplices if len(s) <= l + 1], close=False)


def critical_values(F):
    """Distinct filtration values in increasing order."""
    return np.unique(np.concatenate(F.values)) if len(F) else np.zeros(0)


def simplicial_image(K, vmap):
    """Image of ``K`` under a vertex map (dict or sequence), duplicates merged."""
    image = set()
    for s in K.simplices:
        try:
            image.add(tuple(sorted({int(vmap[v]) for v in s})))
        except (KeyError, IndexError):
            missing = [v for v in s if not _defined(vmap, v)]
            raise InputError(f"vertex map undefined on vertex {missing[0]}") from None
    return SimplicialComplex(image, close=True)


def _defined(vmap, v):
    try:
        vmap[v]
    except (KeyError, IndexError):
        return False
    return True
