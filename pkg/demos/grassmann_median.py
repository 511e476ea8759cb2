"""Combining projection estimates from data splits with a robust median.

Five estimates of the same 2-plane in R^6, one of them badly off.  The
extrinsic mean is pulled towards the outlier; the geodesic median is not.

Run: python demos/grassmann_median.py
"""

import numpy as np

from spred import exp_map, extrinsic_mean, weiszfeld_median
from spred.grassmann import distance
from spred.optimizer import random_projection

rng = np.random.default_rng(4)
truth = random_projection(6, 2, rng)


def nudge(P, angle):
    D = rng.normal(size=P.shape)
    D -= P @ (P.T @ D)
    return exp_map(P, D * angle / np.linalg.norm(D))


estimates = [nudge(truth, a) for a in (0.05, 0.1, 0.08, 0.12)] + [nudge(truth, 1.3)]
median, info = weiszfeld_median(estimates, full_output=True)
mean = extrinsic_mean(estimates)
print("distance to the true plane")
print(f"  extrinsic mean   {distance(mean, truth):.4f}")
print(f"  geodesic median  {distance(median, truth):.4f}  ({info['iterations']} iterations)")
