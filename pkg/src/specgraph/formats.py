"""Plain-text matrix and vector formats.

Floats are written with 17 significant digits so that reading a file back
reproduces the array bit for bit.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def fmt(x: float) -> str:
    # + 0.0 turns -0.0 into 0.0
    return format(float(x) + 0.0, ".17g")


def format_matrix_csv(a) -> str:
    a = np.atleast_2d(np.asarray(a.toarray() if sp.issparse(a) else a, dtype=float))
    return "".join(",".join(fmt(x) for x in row) + "\n" for row in a)


def parse_matrix_csv(text: str) -> np.ndarray:
    rows = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not rows:
        return np.zeros((0, 0))
    data = [[float(x) for x in line.split(",")] for line in rows]
    width = {len(r) for r in data}
    if len(width) != 1:
        raise ValueError("ragged CSV matrix")
    return np.array(data, dtype=float)


def format_coo(a) -> str:
    """Coordinate triples ``i j value``; the first line is ``# shape rows cols``."""
    m = sp.coo_matrix(a)
    order = np.lexsort((m.col, m.row))
    lines = [f"# shape {m.shape[0]} {m.shape[1]}"]
    lines += [f"{m.row[k]} {m.col[k]} {fmt(m.data[k])}" for k in order if m.data[k] != 0]
    return "\n".join(lines) + "\n"


def parse_coo(text: str) -> sp.csr_matrix:
    shape = None
    rows, cols, vals = [], [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "shape":
                shape = (int(parts[1]), int(parts[2]))
            continue
        i, j, v = line.split()
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    if shape is None:
        shape = (max(rows, default=-1) + 1, max(cols, default=-1) + 1)
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def read_signal(path) -> np.ndarray:
    """Read an ``n``-row CSV; a single column comes back as a 1-d vector."""
    a = parse_matrix_csv(read_text(path))
    return a[:, 0].copy() if a.ndim == 2 and a.shape[1] == 1 else a


def write_signal(path, f) -> None:
    f = np.asarray(f, dtype=float)
    write_text(path, format_matrix_csv(f.reshape(-1, 1) if f.ndim == 1 else f))
