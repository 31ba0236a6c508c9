"""Exact combinatorial conductance: single cuts and exhaustive minimisation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .graph import Graph, GraphError, VertexSet

BRUTE_FORCE_MAX_N = 24


class EmptySide(GraphError):
    pass


class TooLarge(GraphError):
    pass


@dataclass(frozen=True)
class Cut:
    side: VertexSet
    crossing_edges: int
    conductance: float
    total_volume: int

    @property
    def fraction(self) -> Fraction:
        """Conductance as an exact rational."""
        return Fraction(self.crossing_edges, min(self.side.volume, self.total_volume - self.side.volume))


def crossing_edges(graph: Graph, s: VertexSet) -> int:
    return sum(1 for v in s.members for w in graph.neighbors(v) if w not in s.members)


def make_cut(graph: Graph, members) -> Cut:
    s = members if isinstance(members, VertexSet) else graph.vertex_set(members)
    if len(s) == 0 or len(s) == graph.n:
        raise EmptySide("a cut needs both sides nonempty")
    e = crossing_edges(graph, s)
    denom = min(s.volume, graph.total_volume - s.volume)
    return Cut(s, e, e / denom, graph.total_volume)


def cut_conductance(graph: Graph, s) -> float:
    """E(S, S-bar) / min(vol S, vol S-bar)."""
    return make_cut(graph, s).conductance


def _adjacency_masks(graph: Graph) -> np.ndarray:
    n = graph.n
    masks = np.zeros(n, dtype=np.uint64)
    for v in graph.vertices():
        acc = 0
        for w in graph.neighbors(v):
            acc |= 1 << (n - w)
        masks[v - 1] = acc
    return masks


def _members_from_mask(mask: int, n: int) -> list[int]:
    return [v for v in range(1, n + 1) if (mask >> (n - v)) & 1]


def _scan(graph: Graph):
    if graph.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"exhaustive enumeration capped at n <= {BRUTE_FORCE_MAX_N}, got n={graph.n}")
    if graph.n < 2:
        return None
    cut, vol, key = kernels.scan_min_conductance(_adjacency_masks(graph), graph.degrees)
    if cut < 0:
        return None
    return cut, vol, _members_from_mask(key, graph.n)


def min_conductance_bruteforce(graph: Graph) -> tuple[float, VertexSet]:
    """Minimum cut conductance over all 2^(n-1) cuts.

    The witness has volume at most m; among optimal witnesses the one with the
    lexicographically smallest membership bitstring (vertex 1 first) wins.
    """
    found = _scan(graph)
    if found is None:
        raise EmptySide("graph has no cut with positive volume on both sides")
    cut, vol, members = found
    return cut / vol, graph.vertex_set(members)


def min_cut_bruteforce(graph: Graph) -> Cut:
    _, s = min_conductance_bruteforce(graph)
    return make_cut(graph, s)


def cheeger_constant_lazy(graph: Graph) -> float:
    """Cheeger constant of the lazy walk: half the minimum cut conductance."""
    return min_conductance_bruteforce(graph)[0] / 2.0


def find_low_conductance_set(graph: Graph, threshold: float) -> VertexSet | None:
    """Greedy union of low-conductance cuts.

    Starting from the full vertex set, repeatedly brute-force the induced
    subgraph on the vertices not yet taken for its minimum-conductance cut
    (smaller-volume side, conductance measured inside the induced subgraph).
    While that conductance is at most ``threshold`` the side is added to the
    result. Returns None when the first search already fails.
    """
    if graph.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"exhaustive enumeration capped at n <= {BRUTE_FORCE_MAX_N}, got n={graph.n}")
    taken: set[int] = set()
    remaining = list(graph.vertices())
    while len(remaining) >= 2:
        sub, labels = graph.induced(remaining)
        found = _scan(sub)
        if found is None:
            break
        cut, vol, members = found
        if cut > threshold * vol:
            break
        piece = {labels[i - 1] for i in members}
        taken |= piece
        remaining = [v for v in remaining if v not in piece]
    if not taken:
        return None
    return graph.vertex_set(taken)
