"""Undirected simple graphs with dense vertex IDs ``1..n``.

Graphs are immutable once built. Vertex IDs are 1-based everywhere in the
public API; numpy arrays exposed here (``degrees``) are indexed by ``v - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np


class GraphError(ValueError):
    """Base class for graph construction and validation failures."""


class SelfLoop(GraphError):
    pass


class ParallelEdge(GraphError):
    pass


class AsymmetricAdjacency(GraphError):
    pass


class Disconnected(GraphError):
    pass


class IsolatedVertex(GraphError):
    pass


class EdgeListFormatError(GraphError):
    """Malformed edge-list text; message carries the offending line number."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Adjacency-list graph. Build through :meth:`from_edges` or :func:`load_edge_list`."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    m: int = field(init=False)
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError(f"adjacency has {len(self.adjacency)} rows, expected n={self.n}")
        adj = tuple(tuple(sorted(row)) for row in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        deg = np.array([len(row) for row in adj], dtype=np.int64)
        deg.setflags(write=False)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "m", int(deg.sum()) // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], validate_graph: bool = True) -> "Graph":
        rows: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"edge ({u}, {v}) outside vertex range 1..{n}")
            rows[u - 1].append(v)
            if u != v:
                rows[v - 1].append(u)
        g = cls(n, tuple(tuple(r) for r in rows))
        if validate_graph:
            validate(g)
        return g

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v - 1]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v - 1])

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted ``(u, v)`` pairs with ``u < v``."""
        return [(u, w) for u in self.vertices() for w in self.neighbors(u) if u < w]

    @property
    def total_volume(self) -> int:
        return 2 * self.m

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, w in self.edges():
            a[u - 1, w - 1] = a[w - 1, u - 1] = 1.0
        return a

    def vertex_set(self, members: Iterable[int]) -> "VertexSet":
        return VertexSet.of(self, members)

    def induced(self, members: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph (unvalidated) and the original IDs of its vertices."""
        keep = sorted(set(members))
        index = {v: i + 1 for i, v in enumerate(keep)}
        rows = tuple(tuple(index[w] for w in self.neighbors(v) if w in index) for v in keep)
        return Graph(len(keep), rows), keep

    def summary(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "min_degree": int(self.degrees.min()) if self.n else 0,
            "max_degree": int(self.degrees.max()) if self.n else 0,
        }


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``1..n`` with its cached volume."""

    n: int
    members: frozenset[int]
    volume: int

    @classmethod
    def of(cls, graph: Graph, members: Iterable[int]) -> "VertexSet":
        mem = frozenset(int(v) for v in members)
        for v in mem:
            if not 1 <= v <= graph.n:
                raise GraphError(f"vertex {v} outside 1..{graph.n}")
        vol = int(sum(graph.degree(v) for v in mem))
        return cls(graph.n, mem, vol)

    def complement(self, graph: Graph) -> "VertexSet":
        return VertexSet(self.n, frozenset(graph.vertices()) - self.members, graph.total_volume - self.volume)

    def indicator(self) -> np.ndarray:
        x = np.zeros(self.n)
        for v in self.members:
            x[v - 1] = 1.0
        return x

    def bitstring(self) -> str:
        return "".join("1" if v in self.members else "0" for v in range(1, self.n + 1))

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))


def validate(graph: Graph) -> None:
    """Check every graph invariant, raising the first violation found."""
    for i, row in enumerate(graph.adjacency):
        v = i + 1
        if v in row:
            raise SelfLoop(f"self-loop at vertex {v}")
        if len(set(row)) != len(row):
            raise ParallelEdge(f"parallel edge at vertex {v}")
    for i, row in enumerate(graph.adjacency):
        v = i + 1
        for w in row:
            if not 1 <= w <= graph.n:
                raise GraphError(f"vertex {v} lists neighbor {w} outside 1..{graph.n}")
            if v not in graph.adjacency[w - 1]:
                raise AsymmetricAdjacency(f"{w} in adj({v}) but {v} not in adj({w})")
    if int(graph.degrees.sum()) != 2 * graph.m:
        raise AsymmetricAdjacency("degree sum is odd")
    for i, row in enumerate(graph.adjacency):
        if not row and graph.n > 1:
            raise IsolatedVertex(f"vertex {i + 1} has degree 0")
    if graph.n == 0:
        raise Disconnected("empty graph")
    if graph.n == 1:
        raise IsolatedVertex("single vertex graph has no edges")
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for w in graph.neighbors(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != graph.n:
        raise Disconnected(f"graph has {graph.n - len(seen)} vertices unreachable from vertex 1")


def parse_edge_list(text: str, relabel: bool = False) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines format; raises with line numbers.

    With ``relabel=True`` vertex tokens may be arbitrary strings; they are
    mapped to ``1..n`` in order of first appearance.
    """
    header = None
    edges: list[tuple[int, int]] = []
    labels: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected two tokens, got {raw.strip()!r}")
        if relabel and header is not None:
            for tok in parts:
                if tok not in labels:
                    labels[tok] = len(labels) + 1
                    if len(labels) > header[0]:
                        raise EdgeListFormatError(f"line {lineno}: more than n={header[0]} distinct labels")
            a, b = labels[parts[0]], labels[parts[1]]
        else:
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListFormatError(f"line {lineno}: non-integer token in {raw.strip()!r}") from None
        if header is None:
            if a < 1 or b < 0:
                raise EdgeListFormatError(f"line {lineno}: bad header n={a} m={b}")
            header = (a, b, lineno)
            continue
        n = header[0]
        if not (1 <= a <= n and 1 <= b <= n):
            raise EdgeListFormatError(f"line {lineno}: edge ({a}, {b}) outside 1..{n}")
        if a == b:
            raise SelfLoop(f"line {lineno}: self-loop ({a}, {b})")
        edges.append((a, b))
    if header is None:
        raise EdgeListFormatError("missing 'n m' header line")
    n, m, _ = header
    if len(edges) != m:
        raise EdgeListFormatError(f"header declares m={m} but {len(edges)} edge lines follow")
    seen: dict[tuple[int, int], int] = {}
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParallelEdge(f"edge {key} listed twice")
        seen[key] = 1
    return Graph.from_edges(n, edges)


def load_edge_list(path, relabel: bool = False) -> Graph:
    return parse_edge_list(Path(path).read_text(), relabel=relabel)


def format_edge_list(graph: Graph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    lines += [f"{u} {v}" for u, v in graph.edges()]
    return "\n".join(lines) + "\n"
