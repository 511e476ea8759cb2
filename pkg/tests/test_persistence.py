import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _oracles import betti_numbers, rips_complex_at
from spred.core import pairwise_distances
from spred.diagram_distance import bottleneck
from spred.errors import InputError
from spred.filtration import critical_values, rips_filtration
from spred.optimizer import random_projection
from spred.persistence import (PersistenceDiagram, betti_at, compute_persistence,
                               persistence_pairs, rips_diagrams)


def test_two_points():
    H0, H1 = rips_diagrams(np.array([[0.0], [2.0]]), 1)
    assert H0.pairs.tolist() == [[0.0, 1.0], [0.0, math.inf]]
    assert len(H1) == 0
    assert betti_at(H0, 0.5) == 2 and betti_at(H0, 1.5) == 1


def test_unit_square_cycle():
    H = rips_diagrams(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float), 1)
    assert H[1].pairs.shape == (1, 2)
    assert H[1].pairs[0] == pytest.approx([0.5, math.sqrt(2) / 2], abs=1e-15)


def test_single_point():
    H = rips_diagrams(np.array([[1.0, 2.0, 3.0]]), 2)
    assert H[0].pairs.tolist() == [[0.0, math.inf]]
    assert len(H[1]) == 0 and len(H[2]) == 0


def test_betti_at_edge_cases():
    empty = PersistenceDiagram(1, np.zeros((0, 2)))
    assert betti_at(empty, 3.0) == 0
    D = PersistenceDiagram(0, [[0, 1], [0, math.inf], [0, 2]])
    assert betti_at(D, 100.0) == 1


def test_degree_bound_is_enforced():
    F = rips_filtration(np.zeros((2, 2)), 1)
    with pytest.raises(InputError):
        compute_persistence(F, 1)


def test_zero_persistence_pairs_dropped():
    D = PersistenceDiagram(0, [[0.0, 0.0], [0.0, 1.0]])
    assert D.pairs.tolist() == [[0.0, 1.0]]
    with pytest.raises(InputError):
        PersistenceDiagram(0, [[1.0, 0.5]])


def test_json_round_trip_bit_exact(rng):
    X = rng.normal(size=(9, 3))
    for D in rips_diagrams(X, 1):
        back = PersistenceDiagram.from_json(D.to_json())
        assert back == D and back.pairs.tobytes() == D.pairs.tobytes()
    assert '"inf"' in rips_diagrams(X, 0)[0].to_json()


@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_diagrams_match_rank_oracle(seed, m):
    X = np.random.default_rng(seed).normal(size=(m, 3))
    D = pairwise_distances(X)
    F = rips_filtration(D, 3)
    diagrams = compute_persistence(F, 2)
    for t in critical_values(F):
        expect = betti_numbers(rips_complex_at(D, t, 3), 2)
        assert [betti_at(D, t) for D in diagrams] == expect


@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_pair_count_equals_simplex_count(seed, m):
    X = np.random.default_rng(seed).normal(size=(m, 2))
    F = rips_filtration(pairwise_distances(X), 2)
    pairs = persistence_pairs(F)
    # each pair (i, j) accounts for two simplices, each essential class for one
    total = sum(1 if j is None else 2 for level in pairs for _, j in level)
    assert total == len(F)


@given(st.integers(0, 2**32 - 1))
def test_stability_under_projection(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(10, 4))
    P = random_projection(4, 2, rng)
    DX, DY = pairwise_distances(X), pairwise_distances(X @ P)
    eta_max = (DX - DY).max()
    for a, b in zip(rips_diagrams(X, 1), rips_diagrams(X @ P, 1)):
        assert bottleneck(a, b) <= eta_max / 2 + 1e-9


def test_h0_always_has_an_essential_class(rng):
    for m in (1, 2, 5):
        assert len(rips_diagrams(rng.normal(size=(m, 2)), 0)[0].essential) == 1
