"""Persistence diagrams of a noisy circle and how far they move under noise.

Run: python demos/persistence_basics.py
"""

import numpy as np

from spred import bottleneck, rips_diagrams, wasserstein

rng = np.random.default_rng(0)
theta = rng.uniform(0, 2 * np.pi, 40)
circle = np.column_stack([np.cos(theta), np.sin(theta)])

H0, H1 = rips_diagrams(circle, 1)
loop = H1.pairs[np.argmax(H1.pairs[:, 1] - H1.pairs[:, 0])]
print(f"{len(H0)} H0 classes, {len(H1)} H1 classes")
print(f"the circle's loop is born at radius {loop[0]:.3f} and dies at {loop[1]:.3f}")

# Small noise moves every point a little; the diagrams move by at most as much.
for scale in (0.01, 0.05, 0.2):
    noisy = circle + rng.normal(scale=scale, size=circle.shape)
    _, N1 = rips_diagrams(noisy, 1)
    shift = np.linalg.norm(noisy - circle, axis=1).max()
    print(f"noise {scale:4.2f}: bottleneck {bottleneck(H1, N1):.4f} "
          f"(largest point shift {shift:.4f}), W2 {wasserstein(H1, N1):.4f}")
