"""Finitely presented groups: abelianization and heuristic triviality tests.

Words are tuples of nonzero integers: ``g + 1`` stands for generator ``g``
and ``-(g + 1)`` for its inverse.
"""

import enum
import heapq
from dataclasses import dataclass

from .errors import InputError


class Verdict(str, enum.Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNKNOWN = "unknown"


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word):
    word = free_reduce(word)
    i, j = 0, len(word)
    while j - i >= 2 and word[i] == -word[j - 1]:
        i += 1
        j -= 1
    return word[i:j]


def inverse(word):
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class GroupPresentation:
    """``<g_0 .. g_{n-1} | relators>`` with freely reduced, nonempty relators."""

    n_generators: int
    relators: tuple = ()

    def __post_init__(self):
        rels = []
        for r in self.relators:
            r = free_reduce(tuple(int(x) for x in r))
            if any(x == 0 or abs(x) > self.n_generators for x in r):
                raise InputError(f"relator {r} references a missing generator")
            if r:
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    def relation_matrix(self):
        """Exponent-sum matrix: one row per relator, one column per generator."""
        rows = []
        for r in self.relators:
            row = [0] * self.n_generators
            for x in r:
                row[abs(x) - 1] += 1 if x > 0 else -1
            rows.append(row)
        return rows

    def __str__(self):
        def fmt(w):
            return "".join(f"g{abs(x) - 1}" + ("^-1" if x < 0 else "") for x in w)
        gens = ", ".join(f"g{i}" for i in range(self.n_generators))
        return f"<{gens} | {', '.join(fmt(r) for r in self.relators)}>"


def smith_invariants(matrix):
    """Nonzero diagonal entries of the Smith normal form of an integer matrix.

    Entries are positive and each divides the next.
    """
    A = [list(map(int, row)) for row in matrix]
    if not A or not A[0]:
        return []
    rows, cols = len(A), len(A[0])
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero magnitude in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        dirty = True
            if not dirty:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if A[i][j] % p), None)
                if bad is None:
                    break
                # fold the offending row in so the pivot shrinks to a gcd
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # move the smallest entry of the pivot row/column into the pivot slot
            cand = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
            _, i, j = min(cand)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def abelianization(G):
    """``(free_rank, torsion)`` with ``G^ab = Z^free_rank + sum Z/d`` over ``torsion``."""
    invariants = smith_invariants(G.relation_matrix()) if G.relators else []
    return G.n_generators - len(invariants), [d for d in invariants if d > 1]


def tietze_simplify(G, budget=10_000):
    """Eliminate generators that occur exactly once in some relator.

    Each elimination substitutes the solved generator into every other
    relator; one substitution costs one rewrite step. Returns the
    simplified presentation and the number of steps spent.
    """
    relators = {}
    occurs = {g: set() for g in range(1, G.n_generators + 1)}
    heap = []
    next_id = 0

    def add(word):
        nonlocal next_id
        word = cyclic_reduce(word)
        if not word:
            return
        rid = next_id
        next_id += 1
        relators[rid] = word
        for x in word:
            occurs[abs(x)].add(rid)
        heapq.heappush(heap, (len(word), rid))

    def remove(rid):
        for x in relators.pop(rid):
            occurs[abs(x)].discard(rid)

    for r in G.relators:
        add(r)
    steps = 0
    while heap and steps < budget:
        _, rid = heapq.heappop(heap)
        word = relators.get(rid)
        if word is None:
            continue
        counts = {}
        for x in word:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        single = [abs(x) for x in word if counts[abs(x)] == 1]
        if not single:
            continue
        g = min(single, key=lambda h: (len(occurs[h]), h))
        pos = next(i for i, x in enumerate(word) if abs(x) == g)
        rotated = word[pos:] + word[:pos]
        rest = rotated[1:]
        # x * rest = 1  =>  x = rest^-1 ; x^-1 * rest = 1  =>  x = rest
        value = inverse(rest) if rotated[0] > 0 else rest
        remove(rid)
        steps += 1
        for other in sorted(occurs[g]):
            old = relators[other]
            remove(other)
            new = []
            for x in old:
                if abs(x) == g:
                    new.extend(value if x > 0 else inverse(value))
                else:
                    new.append(x)
            add(tuple(new))
            steps += 1
        del occurs[g]
    alive = sorted(occurs)
    relabel = {g: i + 1 for i, g in enumerate(alive)}
    rels = [tuple(relabel[abs(x)] * (1 if x > 0 else -1) for x in w) for w in relators.values()]
    return GroupPresentation(len(alive), tuple(sorted(rels, key=lambda w: (len(w), w)))), steps


def is_trivial(G, budget=10_000):
    """Decide triviality where possible.

    A nontrivial abelianization proves the group nontrivial; reaching the
    empty presentation by Tietze moves within ``budget`` rewrite steps
    proves it trivial; otherwise the answer is ``UNKNOWN``.
    """
    if G.n_generators == 0:
        return Verdict.TRIVIAL
    simple, _ = tietze_simplify(G, budget)
    if simple.n_generators == 0:
        return Verdict.TRIVIAL
    free_rank, torsion = abelianization(simple)
    if free_rank or torsion:
        return Verdict.NONTRIVIAL
    return Verdict.UNKNOWN
