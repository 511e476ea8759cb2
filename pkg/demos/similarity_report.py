"""How much of the scale range does a projection keep the topology intact?

Two small cases: three points whose projection merges two clusters too
early, and a rising square loop whose shadow closes into a circle.

Run: python demos/similarity_report.py
"""

import numpy as np

from spred import coordinate_frame, similarity

three = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])
rep = similarity(three, coordinate_frame(2, [0]), eta=0.0, l=0)
print("three points dropped onto the x-axis")
for lo, hi, cls in zip(rep.grid, rep.grid[1:], rep.classes):
    print(f"  [{lo:.2f}, {hi:.2f}): {cls}")
print(f"  mu_quasi_iso = {rep.mu_quasi_iso}, mu_equiv in {rep.mu_equiv}")

# a square path that climbs in z: an arc in R^3, a closed loop from above
s = np.arange(16) / 4
xy = np.select([s[:, None] < 1, s[:, None] < 2, s[:, None] < 3], [np.c_[s, 0 * s], np.c_[1 + 0 * s, s - 1], np.c_[3 - s, 1 + 0 * s]],
               np.c_[0 * s, 4 - s])
arc = np.column_stack([xy, 0.6 * s])
rep = similarity(arc, coordinate_frame(3, [0, 1]), l=0)
print("\nclimbing square seen from above")
print(f"  interval classes: {sorted(set(rep.classes))}")
print(f"  homology agrees on {rep.mu_quasi_iso:.3f} of the range, "
      f"homotopy certified on {rep.mu_equiv[0]:.3f} to {rep.mu_equiv[1]:.3f}")
