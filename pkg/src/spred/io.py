"""Reading and writing point clouds, frames and diagrams.

Matrices are CSV files without a header, one row per point (or per ambient
coordinate for frames). Floats are written with ``repr`` so a write/read
cycle is bit-exact.
"""

import csv
import json

import numpy as np

from .errors import InputError
from .persistence import PersistenceDiagram


def read_matrix(path):
    """Read a numeric CSV into a 2-D float array.

    Raises
    ------
    InputError
        Naming the offending row and column (1-based) for a non-numeric or
        non-finite entry, or a row of the wrong length.
    """
    rows = []
    try:
        with open(path, newline="") as fh:
            for r, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                values = []
                for c, cell in enumerate(row, start=1):
                    try:
                        x = float(cell)
                    except ValueError:
                        raise InputError(f"{path}: row {r}, column {c}: cannot parse {cell!r}") from None
                    if not np.isfinite(x):
                        raise InputError(f"{path}: row {r}, column {c}: non-finite value {cell!r}")
                    values.append(x)
                if rows and len(values) != len(rows[0]):
                    raise InputError(
                        f"{path}: row {r}: expected {len(rows[0])} columns, found {len(values)}")
                rows.append(values)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}: no data")
    return np.array(rows, dtype=float)


def write_matrix(path, A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in A:
            writer.writerow([repr(float(x)) for x in row])


def write_diagram(path, diagram):
    with open(path, "w") as fh:
        fh.write(diagram.to_json() + "\n")


def read_diagram(path):
    try:
        with open(path) as fh:
            return PersistenceDiagram.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a diagram file ({exc})") from None


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
