"""The two comparison runs end to end, written to a report directory.

Run: python demos/experiments.py [outdir]   (several minutes)

Equivalent CLI call:
    spred experiment --name cylinder --seed 0 --outdir runs/cylinder
"""

import sys

from spred.experiments import run_experiment

outdir = sys.argv[1] if len(sys.argv) > 1 else "runs"
for name in ("cylinder", "iris"):
    summary, _ = run_experiment(name, 0, outdir=f"{outdir}/{name}", pi1=False)
    print(name)
    for method, row in summary["methods"].items():
        print(f"  {method:13s} f0 {row['f0']:.4f}  f1 {row['f1']:.4f}  "
              f"mu_quasi_iso {row['mu_quasi_iso']:.4f}")
