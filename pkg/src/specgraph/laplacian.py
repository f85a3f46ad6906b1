"""Graph Laplacians, the incidence (co-boundary) operator and the Laplacian quadratic form."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, IdOutOfRange, WeightedGraphUnsupported
from .formats import format_coo, format_matrix_csv, parse_coo, parse_matrix_csv
from .graph import Graph


class LaplacianKind(enum.Enum):
    COMBINATORIAL = "combinatorial"
    SYM_NORMALIZED = "sym"
    RANDOM_WALK = "rw"
    SIGNLESS = "signless"

    @property
    def symmetric(self) -> bool:
        return self is not LaplacianKind.RANDOM_WALK

    @classmethod
    def parse(cls, name: "str | LaplacianKind") -> "LaplacianKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {
            "combinatorial": cls.COMBINATORIAL,
            "unnormalized": cls.COMBINATORIAL,
            "sym": cls.SYM_NORMALIZED,
            "sym_normalized": cls.SYM_NORMALIZED,
            "symmetric": cls.SYM_NORMALIZED,
            "normalized": cls.SYM_NORMALIZED,
            "rw": cls.RANDOM_WALK,
            "random_walk": cls.RANDOM_WALK,
            "signless": cls.SIGNLESS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown Laplacian kind {name!r}") from None


@dataclass(frozen=True)
class LaplacianMatrix:
    kind: LaplacianKind
    mat: sp.csr_matrix = field(repr=False)
    source: Graph = field(repr=False)

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def toarray(self) -> np.ndarray:
        return self.mat.toarray()

    def __matmul__(self, x):
        return self.mat @ x


def _edge_arrays(g: Graph):
    if not g.edges:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    e = np.array(g.edges, dtype=float)
    return e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), e[:, 2]


def laplacian(g: Graph, kind: "LaplacianKind | str" = LaplacianKind.COMBINATORIAL) -> LaplacianMatrix:
    """Realize the Laplacian of ``g`` of the requested kind.

    Isolated vertices get a zero row and column in the normalized kinds,
    including a zero diagonal entry.
    """
    kind = LaplacianKind.parse(kind)
    n = g.n
    us, vs, ws = _edge_arrays(g)
    d = g.degrees
    rows = np.concatenate([us, vs])
    cols = np.concatenate([vs, us])
    diag = np.arange(n)

    if kind is LaplacianKind.COMBINATORIAL:
        off = np.concatenate([-ws, -ws])
        dvals = d
    elif kind is LaplacianKind.SIGNLESS:
        off = np.concatenate([ws, ws])
        dvals = d
    elif kind is LaplacianKind.SYM_NORMALIZED:
        inv_sqrt = np.zeros(n)
        nz = d > 0
        inv_sqrt[nz] = 1.0 / np.sqrt(d[nz])
        # scale by the commutative product so A[i,j] == A[j,i] bitwise
        scale = inv_sqrt[us] * inv_sqrt[vs]
        off = np.concatenate([-ws * scale, -ws * scale])
        dvals = nz.astype(float)
    else:
        inv = np.zeros(n)
        nz = d > 0
        inv[nz] = 1.0 / d[nz]
        off = np.concatenate([-ws * inv[us], -ws * inv[vs]])
        dvals = nz.astype(float)

    mat = sp.csr_matrix(
        (np.concatenate([dvals, off]), (np.concatenate([diag, rows]), np.concatenate([diag, cols]))),
        shape=(n, n),
    )
    mat.sort_indices()
    return LaplacianMatrix(kind=kind, mat=mat, source=g)


@dataclass(frozen=True)
class IncidenceMatrix:
    mat: np.ndarray
    orientation: tuple[tuple[int, int], ...]  # (tail, head) per row


def incidence(
    g: Graph,
    orientation_seed: int = 0,
    orientation: Sequence[tuple[int, int]] | None = None,
) -> IncidenceMatrix:
    """Edge-by-node incidence matrix: -1 at each edge's tail, +1 at its head.

    By default rows follow the sorted edge order and every edge points from
    its smaller to its larger endpoint; a non-zero ``orientation_seed`` flips
    edges at random.  An explicit ``orientation`` lists ``(tail, head)`` for
    every edge exactly once and fixes the row order too.
    """
    if not g.is_unweighted:
        raise WeightedGraphUnsupported("incidence matrix is defined for unweighted graphs only")
    if orientation is None:
        flips = (
            np.random.default_rng(orientation_seed).random(g.num_edges) < 0.5
            if orientation_seed
            else np.zeros(g.num_edges, dtype=bool)
        )
        orientation = tuple((v, u) if f else (u, v) for (u, v, _), f in zip(g.edges, flips))
    else:
        orientation = tuple((int(t), int(h)) for t, h in orientation)
        given = sorted((min(t, h), max(t, h)) for t, h in orientation)
        if given != [(u, v) for u, v, _ in g.edges]:
            raise IdOutOfRange("orientation must list every edge of the graph exactly once")

    mat = np.zeros((len(orientation), g.n), dtype=np.int64)
    for r, (tail, head) in enumerate(orientation):
        mat[r, tail] = -1
        mat[r, head] = 1
    mat.flags.writeable = False
    return IncidenceMatrix(mat=mat, orientation=orientation)


def _check_signal(g: Graph, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[:1] != (g.n,):
        raise DimensionMismatch(f"signal has leading dimension {f.shape[:1]}, graph has {g.n} nodes")
    return f


def apply_laplacian(g: Graph, f) -> np.ndarray:
    """``(D - W) f`` accumulated edge by edge, without forming the matrix."""
    f = _check_signal(g, f)
    us, vs, ws = _edge_arrays(g)
    flow = (f[us] - f[vs]) * (ws if f.ndim == 1 else ws[:, None])
    out = np.zeros_like(f)
    np.add.at(out, us, flow)
    np.add.at(out, vs, -flow)
    return out


def quadratic_form(g: Graph, f) -> float:
    """``f^T L f`` as the sum of ``w_ij (f_i - f_j)^2`` over edges."""
    f = _check_signal(g, f)
    if f.ndim != 1:
        raise DimensionMismatch("quadratic form takes a single signal")
    us, vs, ws = _edge_arrays(g)
    return float(np.sum(ws * (f[us] - f[vs]) ** 2))


# serialization ---------------------------------------------------------------

def to_csv(m) -> str:
    return format_matrix_csv(m.mat if isinstance(m, LaplacianMatrix) else m)


def from_csv(text: str) -> np.ndarray:
    return parse_matrix_csv(text)


def to_coo(m) -> str:
    return format_coo(m.mat if isinstance(m, LaplacianMatrix) else m)


def from_coo(text: str) -> sp.csr_matrix:
    return parse_coo(text)
