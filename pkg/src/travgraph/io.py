"""Small CSV helpers shared by the library and the command line.

Floats are written with ``repr`` so that reading a file back reproduces the
library values bit for bit.
"""
from __future__ import annotations

import csv

import numpy as np


def fmt(x) -> str:
    return repr(float(x))


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_xyz(path, X, values, name="value"):
    """Rows ``x1, x2, value`` for points ``X`` of shape ``(n, 2)``."""
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    values = np.asarray(values, dtype=float).reshape(-1)
    write_rows(path, ["x1", "x2", name], zip(X[:, 0], X[:, 1], values))


def read_xyz(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, :2], data[:, 2]
