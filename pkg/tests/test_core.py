import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spred.core import (as_point_cloud, check_stiefel, coordinate_frame, diameter, eta_bounds,
                        is_stiefel, pairwise_distances, principal_angles, project)
from spred.errors import DimensionMismatch, InputError
from spred.optimizer import random_projection


def test_pairwise_distances_examples():
    assert np.array_equal(pairwise_distances([[0.0, 0.0]]), [[0.0]])
    D = pairwise_distances([[0, 0], [3, 4]])
    assert D[0, 1] == D[1, 0] == 5.0
    D = pairwise_distances([[0, 0], [1, 0], [0, 1]])
    assert sorted(D[np.triu_indices(3, 1)]) == pytest.approx([1, 1, math.sqrt(2)], abs=1e-15)


def test_distance_matrix_is_a_metric(rng):
    X = rng.normal(size=(12, 4))
    D = pairwise_distances(X)
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0) and np.all(D >= 0)
    assert np.all(D[:, :, None] <= D[:, None, :] + D.T[None, :, :] + 1e-12)


def test_diameter_examples():
    assert diameter([[1.0, 2.0]]) == 0.0
    assert diameter([[0, 0], [3, 4]]) == 5.0
    assert diameter([[0, 0], [1, 0], [1, 1], [0, 1]]) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_project_identity_and_drop(rng):
    X = rng.normal(size=(6, 3))
    assert np.array_equal(project(X, np.eye(3)), X)
    assert np.array_equal(project(X, coordinate_frame(3, [0, 1])), X[:, :2])
    with pytest.raises(DimensionMismatch):
        project(X, np.eye(4)[:, :2])


def test_projection_is_nonexpanding(rng):
    for _ in range(20):
        X = rng.normal(size=(10, 5))
        P = random_projection(5, 2, rng)
        assert np.all(pairwise_distances(project(X, P)) <= pairwise_distances(X) + 1e-12)


def test_eta_bounds_examples():
    P = coordinate_frame(3, [0, 1])
    X = np.array([[0, 0, 0], [1, 2, 0], [3, 1, 0]], float)
    assert eta_bounds(X, P) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert eta_bounds([[0, 0, 0], [0, 0, 2]], P) == (2.0, 2.0)
    lo, hi = eta_bounds([[0, 0, 0], [4, 0, 0], [0, 0, 2]], P)
    assert lo == 0.0 and hi == 2.0
    with pytest.raises(InputError):
        eta_bounds([[0, 0, 0]], P)


def test_stiefel_checks():
    assert is_stiefel(coordinate_frame(4, [1, 3]))
    assert not is_stiefel(np.ones((3, 2)))
    with pytest.raises(InputError):
        check_stiefel(np.ones((3, 2)))
    with pytest.raises(InputError):
        as_point_cloud(np.zeros((0, 3)))
    with pytest.raises(InputError):
        as_point_cloud([[0.0, np.nan]])


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.5))
def test_tube_bound(seed, eps):
    # points within eps of span(P): squared distances shrink by at most 4 eps^2
    rng = np.random.default_rng(seed)
    P = random_projection(5, 2, rng)
    inside = rng.normal(size=(8, 2)) @ P.T
    residual = rng.normal(size=(8, 5))
    residual -= residual @ P @ P.T
    residual *= eps * rng.uniform(0, 1, size=(8, 1)) / np.maximum(
        np.linalg.norm(residual, axis=1, keepdims=True), 1e-300)
    X = inside + residual
    D2 = pairwise_distances(X) ** 2
    Y2 = pairwise_distances(project(X, P)) ** 2
    assert np.all(D2 - Y2 <= 4 * eps**2 + 1e-9)


@given(st.integers(0, 2**32 - 1))
def test_distances_invariant_under_right_rotation(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(7, 4))
    P = random_projection(4, 2, rng)
    Q = random_projection(2, 2, rng)
    D1 = pairwise_distances(project(X, P))
    D2 = pairwise_distances(project(X, P @ Q))
    assert np.allclose(D1, D2, atol=1e-12)


def test_principal_angles_basic():
    e = np.eye(2)
    assert principal_angles(e[:, :1], e[:, 1:]) == pytest.approx([math.pi / 2])
    assert principal_angles(e[:, :1], e[:, :1]) == pytest.approx([0.0])
