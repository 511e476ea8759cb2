import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from spred.errors import InputError
from spred.groups import (GroupPresentation, Verdict, abelianization, cyclic_reduce, free_reduce,
                          inverse, is_trivial, smith_invariants, tietze_simplify)


def test_word_helpers():
    assert free_reduce((1, 2, -2, -1, 3)) == (3,)
    assert cyclic_reduce((-1, 2, 3, 1)) == (2, 3)
    assert inverse((1, -2)) == (2, -1)


def test_presentation_validation():
    G = GroupPresentation(2, ((1, -1), (2, 2)))
    assert G.relators == ((2, 2),)
    with pytest.raises(InputError):
        GroupPresentation(1, ((2,),))
    assert str(GroupPresentation(2, ((1, -2),))) == "<g0, g1 | g0g1^-1>"


def test_verdict_examples():
    assert is_trivial(GroupPresentation(0)) is Verdict.TRIVIAL
    assert is_trivial(GroupPresentation(1)) is Verdict.NONTRIVIAL
    assert is_trivial(GroupPresentation(2, ((1, 2, -1, -2),))) is Verdict.NONTRIVIAL
    assert is_trivial(GroupPresentation(2, ((1, 2), (2,)))) is Verdict.TRIVIAL


def test_abelianization():
    assert abelianization(GroupPresentation(2, ((1, 1), (2, 2, 2)))) == (0, [6])
    assert abelianization(GroupPresentation(3, ((1, 2, -1, -2),))) == (3, [])
    assert abelianization(GroupPresentation(1, ((1, 1),))) == (0, [2])


def test_perfect_group_is_unknown():
    # binary icosahedral group <s, t | (st)^2 = s^3 = t^5>: perfect and nontrivial
    s, t = 1, 2
    rels = ((s, t, s, t, -s, -s, -s), (s, s, s) + (-t,) * 5)
    G = GroupPresentation(2, rels)
    assert abelianization(G) == (0, [])
    assert is_trivial(G, budget=200) is Verdict.UNKNOWN


def test_tietze_respects_budget():
    G = GroupPresentation(3, ((1, 2), (2, 3), (3,)))
    simple, steps = tietze_simplify(G, budget=10_000)
    assert simple.n_generators == 0 and steps > 0
    partial, steps = tietze_simplify(G, budget=1)
    assert steps == 1 or partial.n_generators > 0


@given(st.integers(0, 2**32 - 1))
def test_smith_matches_sympy(seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(-6, 7, size=(int(rng.integers(1, 5)), int(rng.integers(1, 5))))
    S = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    expect = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    got = smith_invariants(A.tolist())
    assert got == expect
    assert all(b % a == 0 for a, b in zip(got, got[1:]))


@given(st.integers(0, 2**32 - 1))
def test_tietze_preserves_abelianization(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    rels = []
    for _ in range(int(rng.integers(0, 4))):
        word = [int(rng.integers(1, n + 1)) * int(rng.choice([-1, 1]))
                for _ in range(int(rng.integers(1, 5)))]
        rels.append(tuple(word))
    G = GroupPresentation(n, tuple(rels))
    simple, _ = tietze_simplify(G)
    assert abelianization(simple) == abelianization(G)
    verdict = is_trivial(G)
    if verdict is Verdict.TRIVIAL:
        assert abelianization(G) == (0, [])
