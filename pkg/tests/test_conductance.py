import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conductest import generators as gen
from conductest.conductance import (
    EmptySide,
    TooLarge,
    cheeger_constant_lazy,
    cut_conductance,
    find_low_conductance_set,
    make_cut,
    min_conductance_bruteforce,
)
from conductest.graph import Graph

from .test_graph import connected_graphs


def naive_min_cut(g: Graph):
    """Plain subset loop with exact rationals; witness volume <= m, smallest bitstring on ties."""
    best = None
    for r in range(1, g.n):
        for side in itertools.combinations(range(1, g.n + 1), r):
            s = set(side)
            vol = sum(g.degree(v) for v in s)
            if vol > g.m:
                continue
            cut = sum(1 for v in s for w in g.neighbors(v) if w not in s)
            bits = "".join("1" if v in s else "0" for v in range(1, g.n + 1))
            cand = (Fraction(cut, vol), bits, sorted(s))
            if best is None or cand[:2] < best[:2]:
                best = cand
    return best


@pytest.mark.parametrize(
    "g, value, witness",
    [
        (gen.complete(4), Fraction(2, 3), [3, 4]),
        (gen.cycle(4), Fraction(1, 2), [3, 4]),
        (gen.complete(2), Fraction(1), [2]),
        (gen.dumbbell(4), Fraction(1, 13), [5, 6, 7, 8]),
        (gen.dumbbell(3), Fraction(1, 7), [4, 5, 6]),
    ],
)
def test_min_conductance_examples(g, value, witness):
    phi, side = min_conductance_bruteforce(g)
    assert phi == pytest.approx(float(value), abs=1e-15)
    assert side.sorted() == witness
    assert make_cut(g, side).fraction == value


@settings(max_examples=80, deadline=None)
@given(connected_graphs(max_n=9))
def test_bruteforce_matches_naive(g):
    value, _, members = naive_min_cut(g)
    phi, side = min_conductance_bruteforce(g)
    assert make_cut(g, side).fraction == value
    assert side.sorted() == members
    assert side.volume <= g.m


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=9))
def test_conductance_in_unit_interval_and_symmetric(g):
    for v in g.vertices():
        s = {v}
        phi = cut_conductance(g, s)
        assert 0 < phi <= 1
        assert phi == cut_conductance(g, set(g.vertices()) - s)


def test_cheeger_constant_is_half(db4):
    assert cheeger_constant_lazy(db4) == pytest.approx(1 / 26)


def test_empty_side_rejected(k4):
    with pytest.raises(EmptySide):
        make_cut(k4, [])
    with pytest.raises(EmptySide):
        make_cut(k4, [1, 2, 3, 4])


def test_too_large():
    with pytest.raises(TooLarge):
        min_conductance_bruteforce(gen.cycle(25))


def test_find_low_conductance_set():
    assert find_low_conductance_set(gen.dumbbell(4), 0.1).sorted() == [5, 6, 7, 8]
    assert find_low_conductance_set(gen.complete(4), 0.1) is None
    assert find_low_conductance_set(gen.cycle(4), 0.5).sorted() == [3, 4]


def test_find_low_collects_several_pieces():
    # three cliques in a row: both outer cliques are cheap to cut off
    edges = [e for base in (0, 4, 8) for e in itertools.combinations(range(base + 1, base + 5), 2)]
    g = Graph.from_edges(12, edges + [(4, 5), (8, 9)])
    s = find_low_conductance_set(g, 0.15)
    assert s is not None and len(s) >= 4
    assert s.volume <= g.total_volume
