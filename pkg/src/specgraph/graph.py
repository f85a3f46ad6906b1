"""Undirected weighted graphs, hop distances and connected components."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    DuplicateEdge,
    IdOutOfRange,
    NonpositiveWeight,
    SelfLoopRejected,
)

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with strictly positive edge weights.

    Edges are stored once, as ``(u, v, w)`` with ``u < v``, sorted.  The
    adjacency matrix is symmetric CSR and ``degrees[i]`` is the (correctly
    rounded) sum of row ``i``.
    """

    n: int
    edges: tuple[Edge, ...]
    adjacency: sp.csr_matrix = field(repr=False, compare=False)
    degrees: np.ndarray = field(repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        _check_node(self, i)
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def dense_adjacency(self) -> np.ndarray:
        return self.adjacency.toarray()


@dataclass(frozen=True)
class NodePartition:
    component_id: np.ndarray
    component_count: int

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.component_id == label)


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.flags.writeable = False


def build_graph(n: int, edge_list: Iterable[Sequence[float]]) -> Graph:
    """Build a graph on nodes ``0..n-1`` from ``(u, v)`` or ``(u, v, w)`` items.

    Missing weights default to 1.  Self-loops, repeated undirected pairs and
    non-positive weights are rejected.
    """
    n = int(n)
    if n < 1:
        raise IdOutOfRange(f"node count must be positive, got {n}")
    seen: dict[tuple[int, int], float] = {}
    for item in edge_list:
        if len(item) == 2:
            u, v = item
            w = 1.0
        elif len(item) == 3:
            u, v, w = item
            w = float(w)
        else:
            raise ValueError(f"edge must be (u, v) or (u, v, w), got {item!r}")
        if int(u) != u or int(v) != v:
            raise IdOutOfRange(f"node ids must be integers, got ({u!r}, {v!r})")
        u, v = int(u), int(v)
        for x in (u, v):
            if not 0 <= x < n:
                raise IdOutOfRange(f"node id {x} outside 0..{n - 1}")
        if u == v:
            raise SelfLoopRejected(f"self-loop at node {u}")
        if not (w > 0.0 and math.isfinite(w)):
            raise NonpositiveWeight(f"edge ({u}, {v}) has weight {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} given more than once")
        seen[key] = w

    edges = tuple((u, v, w) for (u, v), w in sorted(seen.items()))
    if edges:
        us = np.array([e[0] for e in edges], dtype=np.int64)
        vs = np.array([e[1] for e in edges], dtype=np.int64)
        ws = np.array([e[2] for e in edges], dtype=np.float64)
        rows = np.concatenate([us, vs])
        cols = np.concatenate([vs, us])
        vals = np.concatenate([ws, ws])
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    adjacency = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    adjacency.sort_indices()

    degrees = np.array(
        [math.fsum(adjacency.data[adjacency.indptr[i]:adjacency.indptr[i + 1]]) for i in range(n)]
    )
    _freeze(adjacency.data, adjacency.indices, adjacency.indptr, degrees)
    return Graph(n=n, edges=edges, adjacency=adjacency, degrees=degrees)


def _check_node(g: Graph, i: int) -> None:
    if not 0 <= i < g.n:
        raise IdOutOfRange(f"node id {i} outside 0..{g.n - 1}")


def _bfs(g: Graph, source: int) -> np.ndarray:
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in indices[indptr[u]:indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def bfs_distance(g: Graph, i: int, j: int) -> int | None:
    """Hop count of a shortest path from ``i`` to ``j``; ``None`` if unreachable.

    Weights are ignored: every edge counts as one hop.
    """
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        return 0
    d = _bfs(g, i)[j]
    return None if d < 0 else int(d)


def hop_distances(g: Graph) -> np.ndarray:
    """All-pairs hop distances as a float matrix, ``inf`` where unreachable."""
    out = np.empty((g.n, g.n))
    for s in range(g.n):
        d = _bfs(g, s).astype(float)
        d[d < 0] = np.inf
        out[s] = d
    return out


def diameter(g: Graph) -> int | float:
    """Largest pairwise hop distance, or ``math.inf`` for a disconnected graph."""
    if connected_components(g).component_count > 1:
        return math.inf
    return int(max(_bfs(g, s).max() for s in range(g.n)))


def connected_components(g: Graph) -> NodePartition:
    labels = np.full(g.n, -1, dtype=np.int64)
    count = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[_bfs(g, s) >= 0] = count
        count += 1
    _freeze(labels)
    return NodePartition(component_id=labels, component_count=count)


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` (relabelled ``0..k-1`` in the given order).

    Returns the subgraph and the array of original ids.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    index = {int(v): k for k, v in enumerate(nodes)}
    edges = [
        (index[u], index[v], w)
        for u, v, w in g.edges
        if u in index and v in index
    ]
    return build_graph(len(nodes), edges), nodes


# ---------------------------------------------------------------------------
# edge-list files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeListData:
    graph: Graph
    labels: tuple[str, ...] | None  # original node labels when remapped


def parse_edge_list(text: str) -> EdgeListData:
    """Parse ``u<TAB>v[<TAB>w]`` lines.

    ``#`` lines are comments and an ``n=<int>`` line fixes the node count.
    Integer ids are used as-is (``n`` defaults to max id + 1); any
    non-integer label switches to remapping in order of first appearance.
    """
    n_header = None
    rows: list[tuple[str, str, float | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("n="):
            try:
                n_header = int(line[2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad header {line!r}") from None
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 2 or 3 fields, got {len(parts)}")
        w = float(parts[2]) if len(parts) == 3 else None
        rows.append((parts[0].strip(), parts[1].strip(), w))

    def as_int(s):
        try:
            v = int(s)
        except ValueError:
            return None
        return v if v >= 0 else None

    integer_ids = all(as_int(u) is not None and as_int(v) is not None for u, v, _ in rows)
    labels = None
    if integer_ids:
        ids = [(as_int(u), as_int(v), w) for u, v, w in rows]
        n = max((max(u, v) for u, v, _ in ids), default=-1) + 1
        if n_header is not None:
            if n_header < n:
                raise IdOutOfRange(f"header n={n_header} but ids reach {n - 1}")
            n = n_header
    else:
        mapping: dict[str, int] = {}
        for u, v, _ in rows:
            for s in (u, v):
                mapping.setdefault(s, len(mapping))
        ids = [(mapping[u], mapping[v], w) for u, v, w in rows]
        n = len(mapping)
        if n_header is not None:
            if n_header < n:
                raise IdOutOfRange(f"header n={n_header} but {n} labels present")
            n = n_header
        labels = tuple(mapping)
    edges = [(u, v) if w is None else (u, v, w) for u, v, w in ids]
    return EdgeListData(build_graph(max(n, 1), edges), labels)


def read_edge_list(path) -> EdgeListData:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: Graph) -> str:
    lines = [f"n={g.n}"]
    weighted = not g.is_unweighted
    for u, v, w in g.edges:
        lines.append(f"{u}\t{v}\t{w!r}" if weighted else f"{u}\t{v}")
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))
