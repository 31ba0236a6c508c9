"""Deterministic test-fixture graph families.

Generator specs use the mini-grammar ``family:param[:param]``:

    complete:N          K_N
    cycle:N             C_N (N >= 3)
    path:N              P_N (N >= 2)
    dumbbell:K          two K_K joined by one edge (n = 2K)
    random_regular:D:N  uniform-ish random D-regular graph, resampled until connected
    barbell_path:K:L    two K_K joined by a path with L edges
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, GraphError, validate, Disconnected

FAMILIES = ("complete", "cycle", "path", "dumbbell", "random_regular", "barbell_path")


class InfeasibleParameters(GraphError):
    pass


def _clique_edges(vertices):
    vs = list(vertices)
    return [(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs))]


def complete(n: int) -> Graph:
    if n < 2:
        raise InfeasibleParameters(f"complete graph needs n >= 2, got {n}")
    return Graph.from_edges(n, _clique_edges(range(1, n + 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise InfeasibleParameters(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path(n: int) -> Graph:
    if n < 2:
        raise InfeasibleParameters(f"path needs n >= 2, got {n}")
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def barbell_path(k: int, length: int) -> Graph:
    """Two copies of K_k whose vertices ``k`` and ``k + length`` are joined by a path."""
    if k < 2 or length < 1:
        raise InfeasibleParameters(f"barbell_path needs k >= 2 and length >= 1, got k={k}, length={length}")
    n = 2 * k + length - 1
    left = range(1, k + 1)
    right = range(k + length, n + 1)
    bridge = [(k + i, k + i + 1) for i in range(length)]
    return Graph.from_edges(n, _clique_edges(left) + bridge + _clique_edges(right))


def dumbbell(k: int) -> Graph:
    """Two K_k joined by the single edge (k, k+1)."""
    return barbell_path(k, 1)


def _pair_stubs(d, n, rng):
    # Repeated random pairing of the leftover stubs; None when stuck.
    edges = set()
    stubs = np.repeat(np.arange(1, n + 1), d)
    while stubs.size:
        rng.shuffle(stubs)
        leftover = []
        for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            e = (a, b) if a < b else (b, a)
            if a != b and e not in edges:
                edges.add(e)
            else:
                leftover += [a, b]
        if len(leftover) == stubs.size:
            remaining = sorted(set(leftover))
            if all(a == b or (min(a, b), max(a, b)) in edges for a in remaining for b in remaining):
                return None
        stubs = np.array(leftover, dtype=np.int64)
    return edges


def random_regular(d: int, n: int, seed: int = 0, max_tries: int = 1000) -> Graph:
    if d < 1 or n <= d or (n * d) % 2:
        raise InfeasibleParameters(f"random_regular needs 1 <= d < n and n*d even, got d={d}, n={n}")
    if d == 1 and n > 2:
        raise InfeasibleParameters("a 1-regular graph on more than 2 vertices is disconnected")
    if d == 2:
        # the only connected 2-regular graph is the cycle
        perm = np.random.default_rng(seed).permutation(n) + 1
        return Graph.from_edges(n, [(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)])
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        edges = _pair_stubs(d, n, rng)
        if edges is None:
            continue
        g = Graph.from_edges(n, sorted(edges), validate_graph=False)
        try:
            validate(g)
        except Disconnected:
            continue
        return g
    raise InfeasibleParameters(f"no connected {d}-regular graph on {n} vertices after {max_tries} tries")


def generate(family: str, n: int | None = None, seed: int = 0, **params) -> Graph:
    """Build a graph from a family name.

    ``n`` is the vertex count for complete/cycle/path/random_regular; for
    dumbbell it must be even (``k = n / 2``) unless ``k`` is given. Extra
    parameters: ``k`` (dumbbell, barbell_path), ``d`` (random_regular),
    ``length`` (barbell_path).
    """
    try:
        if family == "complete":
            return complete(_need(n, "n"))
        if family == "cycle":
            return cycle(_need(n, "n"))
        if family == "path":
            return path(_need(n, "n"))
        if family == "dumbbell":
            k = params.get("k")
            if k is None:
                n = _need(n, "n")
                if n % 2:
                    raise InfeasibleParameters(f"dumbbell needs even n, got {n}")
                k = n // 2
            if k < 2:
                raise InfeasibleParameters(f"dumbbell needs k >= 2, got {k}")
            return dumbbell(k)
        if family == "random_regular":
            return random_regular(_need(params.get("d"), "d"), _need(n, "n"), seed)
        if family == "barbell_path":
            return barbell_path(_need(params.get("k"), "k"), _need(params.get("length"), "length"))
    except InfeasibleParameters:
        raise
    except GraphError as exc:
        raise InfeasibleParameters(str(exc)) from exc
    raise InfeasibleParameters(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def _need(value, name):
    if value is None:
        raise InfeasibleParameters(f"missing parameter {name}")
    return int(value)


def parse_spec(spec: str, seed: int = 0) -> Graph:
    """Build a graph from a ``family:param[:param]`` string."""
    family, *raw = spec.strip().split(":")
    try:
        args = [int(x) for x in raw]
    except ValueError:
        raise InfeasibleParameters(f"non-integer parameter in generator spec {spec!r}") from None
    arity = {"complete": 1, "cycle": 1, "path": 1, "dumbbell": 1, "random_regular": 2, "barbell_path": 2}
    if family not in arity:
        raise InfeasibleParameters(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if len(args) != arity[family]:
        raise InfeasibleParameters(f"{family} takes {arity[family]} parameter(s), got {len(args)}")
    if family == "dumbbell":
        return generate(family, k=args[0])
    if family == "random_regular":
        return generate(family, n=args[1], d=args[0], seed=seed)
    if family == "barbell_path":
        return generate(family, k=args[0], length=args[1])
    return generate(family, n=args[0])
