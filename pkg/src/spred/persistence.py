"""Persistence diagrams over Z/2 by boundary-matrix reduction.

Columns of the boundary matrix are stored as Python integers used as bit
sets (bit ``r`` set means row ``r`` is nonzero), so adding two columns over
Z/2 is a single XOR and the pivot is ``bit_length() - 1``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import pairwise_distances
from .errors import InputError
from .filtration import colex_rank, rips_filtration


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Multiset of ``(birth, death)`` pairs of one homology degree.

    ``pairs`` is an ``(N, 2)`` float array sorted lexicographically; an
    infinite death is ``np.inf``. Pairs with ``birth == death`` never occur.
    """

    degree: int
    pairs: np.ndarray

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=float).reshape(-1, 2)
        if np.any(pairs[:, 0] > pairs[:, 1]):
            raise InputError("birth exceeds death in a persistence pair")
        pairs = pairs[pairs[:, 0] < pairs[:, 1]]
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return (isinstance(other, PersistenceDiagram) and self.degree == other.degree
                and np.array_equal(self.pairs, other.pairs))

    @property
    def finite(self):
        return self.pairs[np.isfinite(self.pairs[:, 1])]

    @property
    def essential(self):
        """Births of the pairs with infinite death, sorted."""
        return np.sort(self.pairs[~np.isfinite(self.pairs[:, 1]), 0])

    def persistence(self):
        return self.pairs[:, 1] - self.pairs[:, 0]

    def to_json(self):
        pairs = [[b, "inf" if math.isinf(d) else d] for b, d in self.pairs.tolist()]
        return json.dumps({"scale": "radius", "degree": self.degree, "pairs": pairs})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        if obj.get("scale", "radius") != "radius":
            raise InputError(f"unsupported diagram scale {obj.get('scale')!r}")
        pairs = [[float(b), math.inf if d == "inf" else float(d)] for b, d in obj["pairs"]]
        return cls(int(obj["degree"]), np.array(pairs, dtype=float).reshape(-1, 2))


Barcode = PersistenceDiagram


def _boundary_columns(F, d):
    """Bit-set boundary columns of the ``d``-simplices, both in filtration order."""
    table = F.binomials()
    upper = F.vertices[d][F.order(d)]
    lower_order = F.order(d - 1)
    lower_rank = colex_rank(F.vertices[d - 1], table)
    sorter = np.argsort(lower_rank)
    # original index of a (d-1)-simplex -> its position in filtration order
    position = np.empty(len(lower_order), dtype=np.int64)
    position[lower_order] = np.arange(len(lower_order))
    rows = []
    for drop in range(d + 1):
        face_rank = colex_rank(np.delete(upper, drop, axis=1), table)
        idx = sorter[np.searchsorted(lower_rank, face_rank, sorter=sorter)]
        if not np.array_equal(lower_rank[idx], face_rank):
            raise InputError(f"filtration is not closed under faces in dimension {d}")
        rows.append(position[idx].tolist())
    if d == 1:
        return [(1 << a) | (1 << b) for a, b in zip(*rows)]
    if d == 2:
        return [(1 << a) | (1 << b) | (1 << c) for a, b, c in zip(*rows)]
    return [sum(1 << r for r in col) for col in zip(*rows)]


def _reduce(columns, cleared, stop_after=None):
    """Standard column reduction; returns ``{pivot_row: column_index}``.

    ``cleared`` columns are known to reduce to zero and are skipped.
    Reduction stops once ``stop_after`` pivots have been found.
    """
    reduced = {}
    pairs = {}
    for c, col in enumerate(columns):
        if c in cleared:
            continue
        while col:
            low = col.bit_length() - 1
            other = reduced.get(low)
            if other is None:
                reduced[low] = col
                pairs[low] = c
                break
            col ^= other
        if stop_after is not None and len(pairs) >= stop_after:
            break
    return pairs


def _component_count(F):
    parent = list(range(F.vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    components = F.vertex_count
    for a, b in F.vertices[1].tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            components -= 1
    return components


def persistence_pairs(F, top=None):
    """Raw persistence pairing of a filtration, zero-length pairs included.

    Parameters
    ----------
    F : FilteredComplex
    top : int, optional
        Highest simplex dimension to reduce (default ``F.max_dim``). When
        ``top < F.max_dim`` higher simplices are ignored.

    Returns
    -------
    pairs : list of list of (int, int or None)
        ``pairs[d]`` holds ``(i, j)`` meaning the ``d``-simplex at filtration
        position ``i`` is killed by the ``(d+1)``-simplex at position ``j``,
        or ``(i, None)`` for an essential class. Degree ``top`` is only
        complete when ``top == F.max_dim`` or when every top simplex is
        reduced (``early_stop=False``).
    """
    return _pairing(F, F.max_dim if top is None else top, early_stop=False)


def _pairing(F, top, early_stop):
    top = min(top, F.max_dim)
    killers = {}  # dimension d -> {row of (d-1)-simplex: column of d-simplex}
    cleared = set()
    for d in range(top, 0, -1):
        columns = _boundary_columns(F, d)
        stop_after = None
        if early_stop and d == top and d == 2:
            # every 1-cycle is eventually a boundary of a triangle once this many pivots exist
            stop_after = len(F.vertices[1]) - (F.vertex_count - _component_count(F))
        killers[d] = _reduce(columns, cleared, stop_after)
        cleared = set(killers[d])
    pairs = []
    for d in range(top + 1):
        negative = set(killers[d].values()) if d >= 1 else set()
        killed = killers.get(d + 1, {})
        dim_pairs = []
        for i in range(len(F.vertices[d])):
            if i in negative:
                continue
            dim_pairs.append((i, killed.get(i)))
        pairs.append(dim_pairs)
    return pairs


def compute_persistence(F, max_degree):
    """Persistence diagrams of degrees ``0 .. max_degree``.

    ``F`` must contain simplices up to dimension ``max_degree + 1`` so that
    deaths in the top degree are correct.
    """
    if max_degree < 0:
        raise InputError("max_degree must be non-negative")
    if max_degree > F.max_dim - 1:
        raise InputError(
            f"degree {max_degree} needs simplices of dimension {max_degree + 1}, "
            f"filtration only has dimension {F.max_dim}")
    pairs = _pairing(F, max_degree + 1, early_stop=True)
    sorted_values = [F.values[d][F.order(d)] for d in range(min(F.max_dim, max_degree + 1) + 1)]
    diagrams = []
    for d in range(max_degree + 1):
        if d >= len(pairs):
            diagrams.append(PersistenceDiagram(d, np.zeros((0, 2))))
            continue
        out = []
        for i, j in pairs[d]:
            birth = sorted_values[d][i]
            death = math.inf if j is None else sorted_values[d + 1][j]
            if birth < death:
                out.append((birth, death))
        diagrams.append(PersistenceDiagram(d, np.array(out, dtype=float).reshape(-1, 2)))
    return diagrams


def rips_diagrams(X, max_degree, distances=None):
    """Rips persistence diagrams of a point cloud for degrees ``0 .. max_degree``."""
    D = pairwise_distances(X) if distances is None else distances
    return compute_persistence(rips_filtration(D, max_degree + 1), max_degree)


def betti_at(diagram, t):
    """Number of bars ``[birth, death)`` containing ``t``."""
    pairs = diagram.pairs
    return int(np.count_nonzero((pairs[:, 0] <= t) & (t < pairs[:, 1])))
