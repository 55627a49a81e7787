import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from atomsets.errors import StepBoundExceeded
from atomsets.formula import TRUE, FALSE, conj, equals, iff, leq, lt, neg, variable
from atomsets.nominal import Variants, atom, eq, ite, neq, show, when
from atomsets.sets import (
    DefinableSet, SetEntry, atom_pairs, atom_tuples, atoms, empty_set, eq_set, exists_in,
    filter_set, for_all, from_list, insert, intersection, is_empty, is_singleton, map_set,
    member, pairs, pairs_with, singleton, size, sum_set, union,
)
from atomsets.theory import Verdict, decide, using

import harness
import oracles

va, vb, vc, vu, vv, vw = (variable(n) for n in "abcuvw")
a, b, c, u, v, w = (atom(x) for x in (va, vb, vc, vu, vv, vw))


def valid(phi):
    return decide(phi) is Verdict.VALID


def test_basic_constants():
    assert is_empty(empty_set()) == TRUE
    assert is_empty(atoms()) == FALSE
    assert show(atoms()) == "{x : ⊤ for x}"
    assert show(empty_set()) == "{}"


def test_insert():
    assert show(insert(a, empty_set())) == "{a : ⊤}"
    assert valid(eq_set(insert(a, atoms()), atoms()))


def test_map():
    s = filter_set(lambda x: neq(x, a), atoms())
    assert valid(eq_set(map_set(lambda x: x, s), s))
    assert show(map_set(lambda x: (x, x), atoms())) == "{(x,x) : ⊤ for x}"
    nested = sum_set(map_set(lambda x: map_set(lambda y: (x, y), atoms()), atoms()))
    assert show(nested) == "{(x,y) : ⊤ for x,y}"


def test_map_sees_entry_guard_as_context():
    s = filter_set(lambda x: eq(x, a), atoms())
    seen = map_set(lambda x: ite(eq(x, a), 1, 2), s)
    (entry,) = seen.entries
    assert entry.element == 1


def test_sum():
    assert sum_set(singleton(singleton(a))) == singleton(a)
    assert sum_set(empty_set()) == empty_set()
    nested = map_set(lambda x: filter_set(lambda y: neq(y, x), atoms()), atoms())
    (entry,) = sum_set(nested).entries
    assert len(entry.binders) == 2
    x, y = entry.binders
    assert entry.element.variable in (x, y)
    assert valid(iff(entry.guard, neg(equals(x, y))))


def test_sum_renames_clashing_binders():
    x = variable("x")
    inner = DefinableSet([SetEntry(atom(x), neg(equals(x, va)), (x,))])
    outer = DefinableSet([SetEntry(inner, equals(x, va), (x,))])
    flat = sum_set(outer)
    for entry in flat.entries:
        assert len(set(entry.binders)) == len(entry.binders)
    # naive flattening would merge the two x's and leave nothing
    assert valid(eq_set(flat, filter_set(lambda y: neq(y, a), atoms())))


def test_is_empty_ordered():
    with using("ordered"):
        s = filter_set(lambda x: conj(lt(x.variable, vu), lt(vv, x.variable)), atoms())
        e = is_empty(s)
        assert not oracles.has_quantifier(e)
        assert valid(iff(e, leq(vu, vv)))


def test_filter_and_quantifiers():
    assert show(filter_set(lambda x: neq(x, a), atoms())) == "{x : ¬(a = x) for x}"
    assert filter_set(lambda _: FALSE, from_list([a, b])) == empty_set()
    assert exists_in(lambda x: eq(x, a), atoms()) == TRUE
    assert for_all(lambda x: eq(x, a), atoms()) == FALSE
    assert valid(iff(for_all(lambda x: eq(x, a), from_list([a, b])), equals(va, vb)))


def test_member():
    assert member(a, atoms()) == TRUE
    assert member(a, filter_set(lambda x: neq(x, a), atoms())) == FALSE
    with using("ordered"):
        m = member(w, filter_set(lambda x: leq(x.variable, vu), atoms()))
        assert valid(iff(m, leq(vw, vu)))


def test_union_and_intersection():
    assert show(union(singleton(a), singleton(b))) == "{a : ⊤, b : ⊤}"
    assert intersection(from_list([a, b]), empty_set()) == empty_set()
    with using("ordered"):
        below = filter_set(lambda x: leq(x.variable, vu), atoms())
        above = filter_set(lambda x: leq(vu, x.variable), atoms())
        assert valid(eq_set(intersection(below, above), insert(u, empty_set())))


def test_pairs():
    assert show(pairs(atoms(), atoms())) == "{(x,y) : ⊤ for x,y}"
    assert show(atom_pairs()) == "{(x,y) : ⊤ for x,y}"
    assert show(pairs_with(lambda x, y: (y, x), singleton(a), singleton(b))) == "{(b,a) : ⊤}"


def test_is_singleton():
    assert is_singleton(singleton(a)) == TRUE
    assert is_singleton(atoms()) == FALSE
    assert valid(iff(is_singleton(from_list([a, b])), equals(va, vb)))


def test_atom_tuples_stay_compact():
    for n in range(1, 7):
        (entry,) = atom_tuples(n).entries
        assert len(entry.binders) == n
        assert entry.guard == TRUE


def test_size():
    assert size(empty_set()) == Variants.of(0)
    two = size(from_list([a, b]))
    assert two.values == [1, 2]
    (g1, g2) = (g for _, g in two.branches)
    assert valid(iff(g1, equals(va, vb)))
    assert valid(iff(g2, neg(equals(va, vb))))
    distinct = conj(neq(a, b), neq(b, c), neq(a, c))
    assert when(distinct, size(from_list([a, b, c]))) == Variants.of(3)


def test_size_enumerates_equality_types():
    s3 = size(from_list([a, b, c]))
    for t in oracles.equality_types(3):
        val = dict(zip([va, vb, vc], t))
        (n,) = [n for n, g in s3.branches if oracles.holds(g, val, False)]
        assert n == len(set(t))


def test_size_step_bound():
    with pytest.raises(StepBoundExceeded):
        size(atoms(), max_steps=4)


DOMAIN = range(6)


def _denotation(s, valuation):
    """Elements of ``s`` inside the domain, by enumerating binder values."""
    out = set()
    for entry in s.entries:
        for values in itertools.product(DOMAIN, repeat=len(entry.binders)):
            env = {**valuation, **dict(zip(entry.binders, values))}
            if oracles.holds(entry.guard, env, False):
                out.add(env[entry.element.variable])
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_membership_matches_finite_model(seed):
    rng = random.Random(seed)
    params = harness.PARAMS
    s = oracles.random_atom_set(rng, params, False)
    assert all(len(e.binders) <= 3 for e in s.entries)
    probe = variable("probe")
    m = member(atom(probe), s)
    for values in itertools.product(DOMAIN, repeat=len(params)):
        valuation = dict(zip(params, values))
        inside = _denotation(s, valuation)
        for d in DOMAIN:
            assert oracles.holds(m, {**valuation, probe: d}, False) == (d in inside)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9), st.booleans())
def test_set_laws(seed, ordered):
    with using("ordered" if ordered else "equality"):
        for name, law in harness.set_laws(random.Random(seed), ordered):
            assert valid(law), name


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9), st.booleans())
def test_filter_matches_derived_definition(seed, ordered):
    rng = random.Random(seed)
    with using("ordered" if ordered else "equality"):
        s = oracles.random_atom_set(rng, harness.PARAMS, ordered)
        p = oracles.random_atom_predicate(rng, harness.PARAMS, ordered)
        derived = sum_set(map_set(lambda x: ite(p(x), singleton(x), empty_set()), s))
        assert valid(eq_set(filter_set(p, s), derived))
