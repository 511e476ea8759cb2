"""Sample data: a noisy cylinder and the bundled iris measurements."""

import csv
from importlib import resources

import numpy as np

from .errors import InputError


def cylinder(n=100, noise_var=0.05, rng=None, height=2.0, radius=1.0):
    """Points on ``S^1 x [-height, height]`` in R^3 with isotropic Gaussian noise.

    Angles and heights are uniform; ``noise_var`` is the variance (not the
    standard deviation) of the noise added to every coordinate.
    """
    if n < 1:
        raise InputError("n must be positive")
    if noise_var < 0:
        raise InputError("noise variance must be non-negative")
    rng = np.random.default_rng(rng)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    z = rng.uniform(-height, height, n)
    X = np.column_stack([radius * np.cos(theta), radius * np.sin(theta), z])
    if noise_var > 0:
        X = X + rng.normal(0.0, np.sqrt(noise_var), size=X.shape)
    return X


def load_iris(return_labels=False):
    """The 150 x 4 iris measurements (sepal length/width, petal length/width in cm)."""
    text = resources.files("spred").joinpath("data/iris.csv").read_text()
    rows = list(csv.reader(text.splitlines()))[1:]
    X = np.array([[float(v) for v in row[:4]] for row in rows])
    if return_labels:
        return X, [row[4] for row in rows]
    return X
