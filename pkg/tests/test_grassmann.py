import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spred.core import coordinate_frame, is_stiefel, principal_angles
from spred.errors import CutLocusError, InputError
from spred.grassmann import (distance, distributed_reduce, exp_map, extrinsic_mean, log_map,
                             median_objective, partition, same_point, weiszfeld_median)
from spred.optimizer import AnnealingConfig, anneal_chains, random_projection

E = np.eye(2)


def nearby(rng, X, scale):
    """Random frame at geodesic distance about ``scale`` from ``X``."""
    D = rng.normal(size=X.shape)
    D -= X @ (X.T @ D)
    D *= scale / np.linalg.norm(D)
    return exp_map(X, D)


def test_exp_examples(rng):
    X = random_projection(5, 2, rng)
    assert same_point(exp_map(X, np.zeros_like(X)), X)
    Y = exp_map(E[:, :1], (math.pi / 2) * E[:, 1:])
    assert same_point(Y, E[:, 1:])


def test_log_examples(rng):
    X = random_projection(5, 2, rng)
    assert np.linalg.norm(log_map(X, X)) <= 1e-12
    D = log_map(E[:, :1], np.array([[1.0], [1.0]]) / math.sqrt(2))
    assert np.linalg.norm(D) == pytest.approx(math.pi / 4, abs=1e-15)
    with pytest.raises(CutLocusError):
        log_map(E[:, :1], E[:, 1:])


def test_distance_examples(rng):
    X = random_projection(4, 2, rng)
    assert distance(X, X) == pytest.approx(0.0, abs=1e-12)
    assert distance(E[:, :1], E[:, 1:]) == pytest.approx(math.pi / 2)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1.3))
def test_round_trip_and_log_norm(seed, scale):
    rng = np.random.default_rng(seed)
    X = random_projection(6, 2, rng)
    Y = nearby(rng, X, scale)
    D = log_map(X, Y)
    assert np.linalg.norm(X.T @ D) <= 1e-10
    assert principal_angles(exp_map(X, D), Y).max() <= 1e-8
    assert np.linalg.norm(D) == pytest.approx(distance(X, Y), abs=1e-9)
    assert np.linalg.norm(log_map(Y, X)) == pytest.approx(np.linalg.norm(D), abs=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_distance_metric_and_right_invariance(seed):
    rng = np.random.default_rng(seed)
    X, Y, Z = (random_projection(5, 2, rng) for _ in range(3))
    Q1, Q2 = random_projection(2, 2, rng), random_projection(2, 2, rng)
    assert distance(X, Y) == pytest.approx(distance(Y, X), abs=1e-12)
    assert distance(X, Z) <= distance(X, Y) + distance(Y, Z) + 1e-9
    assert distance(X @ Q1, Y @ Q2) == pytest.approx(distance(X, Y), abs=1e-10)


def test_extrinsic_mean_examples(rng):
    X = random_projection(5, 2, rng)
    assert same_point(extrinsic_mean([X, X @ random_projection(2, 2, rng)]), X)
    assert same_point(extrinsic_mean([X]), X)
    th = 0.3
    a = np.array([[math.cos(th)], [math.sin(th)]])
    b = np.array([[math.cos(th)], [-math.sin(th)]])
    assert same_point(extrinsic_mean([a, b]), E[:, :1])
    with pytest.raises(InputError):
        extrinsic_mean([])
    with pytest.warns(RuntimeWarning):
        extrinsic_mean([E[:, :1], E[:, 1:]])


def test_weiszfeld_examples(rng):
    X = random_projection(5, 2, rng)
    P, info = weiszfeld_median([X, X, X], full_output=True)
    assert same_point(P, X) and info["iterations"] == 1
    Q = nearby(rng, X, 0.7)
    P, info = weiszfeld_median([X, X, Q], full_output=True)
    assert distance(P, X) <= 1e-8 and info["converged"]


@given(st.integers(0, 2**32 - 1))
def test_weiszfeld_objective_nonincreasing(seed):
    rng = np.random.default_rng(seed)
    truth = random_projection(6, 2, rng)
    frames = [nearby(rng, truth, s) for s in rng.uniform(0.05, 0.6, 5)]
    P, info = weiszfeld_median(frames, full_output=True)
    obj = info["objective"]
    assert all(b <= a + 1e-12 for a, b in zip(obj, obj[1:]))
    assert is_stiefel(P)
    assert median_objective(P, frames) <= median_objective(extrinsic_mean(frames), frames) + 1e-12


def test_partition_examples(rng):
    X = np.arange(20.0).reshape(10, 2)
    assert len(partition(X, 1, rng)) == 1 and np.array_equal(partition(X, 1, rng)[0], X)
    parts = partition(X, 3, rng)
    assert sorted(len(p) for p in parts) == [3, 3, 4]
    rows = sorted(tuple(r) for p in parts for r in p)
    assert rows == sorted(tuple(r) for r in X)
    with pytest.raises(InputError):
        partition(X, 11, rng)


def test_distributed_single_part_matches_anneal(rng):
    X = rng.normal(size=(10, 3))
    cfg = AnnealingConfig(tau_end=0.3, gamma=0.7, seed=4)
    assert np.array_equal(distributed_reduce(X, 1, cfg), anneal_chains(X, cfg)[0])


def test_distributed_recovers_plane(rng):
    X = np.zeros((30, 5))
    X[:, :2] = np.random.default_rng(7).normal(size=(30, 2))
    cfg = AnnealingConfig(tau_end=1e-2, gamma=0.8, seed=7)
    P, info = distributed_reduce(X, 3, cfg, full_output=True)
    assert len(info["subset_frames"]) == 3 and is_stiefel(P)
    assert principal_angles(P, coordinate_frame(5, [0, 1])).max() <= 0.1
