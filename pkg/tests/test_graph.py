import random

import pytest
from hypothesis import given, settings, strategies as st

from atomsets.errors import StepBoundExceeded
from atomsets.formula import FALSE, TRUE, conj, equals, iff, implies, variable
from atomsets.graph import (
    Graph, coloring, compose, distinct_pairs, has_cycle, has_equivariant_coloring,
    has_odd_length_cycle, is_coloring_of, overlap_graph, partitions, swap_graph,
    transitive_closure, transitive_closure_steps,
)
from atomsets.nominal import atom, ite, lt_atoms, neq, show, under, variant
from atomsets.sets import (
    atom_pairs, atoms, empty_set, eq_set, from_list, is_subset_of, member, singleton, union,
)
from atomsets.theory import Truth, Verdict, decide, implies_under, using

import harness
import oracles

va, vb, vc = (variable(n) for n in "abc")
a, b, c = (atom(v) for v in (va, vb, vc))
DISTINCT = conj(neq(a, b), neq(b, c), neq(a, c))


def valid(phi):
    return decide(phi) is Verdict.VALID


def test_compose():
    assert show(compose(singleton((a, b)), singleton((b, c)))) == "{(a,c) : ⊤}"
    assert compose(singleton((a, b)), empty_set()) == empty_set()
    square = compose(distinct_pairs(), distinct_pairs())
    assert show(square) == "{(x,y) : ⊤ for x,y}"


def test_compose_matches_pairs_with_filter_example():
    r = from_list([(a, b), (b, c)])
    with under(DISTINCT):
        assert implies_under(DISTINCT, eq_set(compose(r, r), singleton((a, c)))) is Truth.YES


def test_transitive_closure_examples():
    assert transitive_closure(empty_set()) == empty_set()
    with under(DISTINCT):
        tc = transitive_closure(from_list([(a, b), (b, c)]))
    assert implies_under(DISTINCT, member((a, c), tc)) is Truth.YES
    full, steps = transitive_closure_steps(distinct_pairs())
    assert valid(eq_set(full, atom_pairs()))
    assert steps == 2


def test_transitive_closure_step_bound():
    with pytest.raises(StepBoundExceeded):
        transitive_closure_steps(distinct_pairs(), max_iterations=1)


def test_has_cycle_examples():
    assert has_cycle(Graph(atoms(), empty_set())) == FALSE
    assert has_cycle(Graph(atoms(), distinct_pairs())) == TRUE
    g = Graph(from_list([a, b]), singleton((a, b)))
    assert implies_under(neq(a, b), has_cycle(g)) is Truth.NO
    assert valid(iff(has_cycle(g), equals(va, vb)))


def test_has_odd_length_cycle_examples():
    assert has_odd_length_cycle(Graph(atoms(), empty_set())) == FALSE
    triangle = Graph(from_list([a, b, c]), from_list([(a, b), (b, c), (c, a)]))
    with under(DISTINCT):
        odd = has_odd_length_cycle(triangle)
    assert implies_under(DISTINCT, odd) is Truth.YES
    for theory in ("equality", "ordered"):
        with using(theory):
            assert decide(has_odd_length_cycle(swap_graph())) is Verdict.CONTRADICTORY


def test_is_coloring_of_examples():
    g = swap_graph()
    assert is_coloring_of(lambda v: variant(0), g) == FALSE
    assert is_coloring_of(lambda v: variant(0), Graph(g.vertices, empty_set())) == TRUE
    with using("ordered"):
        by_order = is_coloring_of(lambda p: ite(lt_atoms(p[0], p[1]), variant(0), variant(1)), g)
        assert by_order == TRUE


def test_partitions_examples():
    assert show(partitions(3, 2)) == "{[0,0,1] : ⊤, [1,0,0] : ⊤, [1,0,1] : ⊤}"
    for n in range(1, 6):
        assert partitions(n, 1) == singleton([0] * n)
    assert partitions(2, 3) == empty_set()


def _as_tuples(s):
    return {tuple(e.element) for e in s.entries}


@pytest.mark.parametrize("n", range(7))
def test_partitions_are_canonical_colourings(n):
    for k in range(n + 1):
        got = _as_tuples(partitions(n, k))
        assert len(got) == oracles.stirling2(n, k)
        # the recurrence puts new colours first; compare up to colour renaming
        assert {_canonical(p) for p in got} == oracles.canonical_colourings(n, k)


def _canonical(p):
    relabel = {}
    return tuple(relabel.setdefault(x, len(relabel)) for x in p)


def test_coloring_examples():
    assert coloring([], [], a) == variant(0)
    assert coloring([atoms()], [5], a) == variant(5)
    with under(neq(a, b)):
        assert coloring([singleton(b), atoms()], [0, 1], a) == variant(1)
    with pytest.raises(ValueError):
        coloring([atoms()], [], a)


def test_single_orbit_edgeless_graph():
    g = Graph(atoms(), empty_set())
    assert has_equivariant_coloring(g, 1) == TRUE
    assert has_equivariant_coloring(g, 2) == TRUE


@pytest.mark.parametrize("theory", ["equality", "ordered"])
def test_equivariant_coloring_is_antitone_and_monotone(theory):
    with using(theory):
        vertices = distinct_pairs()
        chain = [empty_set(), swap_graph().edges, union(swap_graph().edges, overlap_graph().edges)]
        table = [[valid(has_equivariant_coloring(Graph(vertices, e), k)) for k in (1, 2, 3)]
                 for e in chain]
    for row in table:
        assert row == sorted(row)
    for fewer, more in zip(table, table[1:]):
        assert all(x or not y for x, y in zip(fewer, more))


PARAMS = oracles.atom_names(2, "s")


def _relation(seed, ordered):
    return harness.random_relation(random.Random(seed), PARAMS, ordered)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**9), st.booleans())
def test_closure_operator(s1, s2, ordered):
    with using("ordered" if ordered else "equality"):
        r, extra = _relation(s1, ordered), _relation(s2, ordered)
        tc = transitive_closure(r)
        assert valid(is_subset_of(r, tc))
        assert valid(eq_set(transitive_closure(tc), tc))
        assert valid(is_subset_of(tc, transitive_closure(union(r, extra))))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9), st.booleans())
def test_odd_cycle_implies_cycle(seed, ordered):
    with using("ordered" if ordered else "equality"):
        g = Graph(atoms(), _relation(seed, ordered))
        assert valid(implies(has_odd_length_cycle(g), has_cycle(g)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**9), st.booleans())
def test_closure_matches_finite_closure_on_sample(seed, ordered):
    with using("ordered" if ordered else "equality"):
        assert harness.tc_on_sample(random.Random(seed), ordered, transitive_closure) == (0, 0)
