import random

import pytest
from hypothesis import given, settings, strategies as st

from atomsets.errors import ConditionalError
from atomsets.formula import TRUE, conj, disj, equals, iff, neg, variable
from atomsets.nominal import (
    Atom, Variants, atom, eq, fresh_atom, group_action, ite, iteV, neq, show, support, when,
)
from atomsets.sets import atoms, empty_set, filter_set, from_list, insert, size
from atomsets.theory import Verdict, decide

import oracles

va, vb, vc, vd, ve = (variable(n) for n in "abcde")
a, b, c, d, e = (atom(v) for v in (va, vb, vc, vd, ve))


def valid(phi):
    return decide(phi) is Verdict.VALID


def test_fresh_atoms_are_distinct():
    x, y = fresh_atom(), fresh_atom()
    assert x.variable != y.variable
    assert x.is_single()
    assert decide(eq(x, y)) is Verdict.CONTINGENT


def test_eq_examples():
    assert eq(a, a) == TRUE
    assert eq((a, b), (c, d)) == conj(equals(va, vc), equals(vb, vd))
    phi = equals(vd, ve)
    v = ite(phi, a, b)
    expected = disj(conj(equals(va, vc), phi), conj(equals(vb, vc), neg(phi)))
    assert valid(iff(eq(v, c), expected))


def test_eq_is_symmetric():
    phi = equals(vd, ve)
    x, y = ite(phi, a, b), ite(neg(phi), c, a)
    assert valid(iff(eq(x, y), eq(y, x)))


def test_ite_resolution():
    assert ite(TRUE, a, b) == a
    assert ite(equals(va, va), 1, 2) == 1
    assert ite(neg(equals(va, va)), 1, 2) == 2
    phi = equals(vc, vd)
    v = ite(phi, a, b)
    assert isinstance(v, Atom)
    assert v.branches == ((va, phi), (vb, neg(phi)))


def test_ite_inside_context():
    from atomsets.nominal import under
    with under(equals(vc, vd)):
        assert ite(equals(vd, vc), a, b) == a


def test_ite_on_functions_is_lazy():
    phi = equals(vd, ve)
    calls = []

    def f(v):
        calls.append("f")
        return eq(v, a)

    def g(v):
        calls.append("g")
        return eq(v, b)

    h = ite(phi, f, g)
    assert calls == []
    assert valid(iff(h(c), ite(phi, f(c), g(c))))


def test_ite_on_formulas():
    phi, p, q = equals(va, vb), equals(vb, vc), equals(vc, vd)
    assert valid(iff(ite(phi, p, q), disj(conj(p, phi), conj(q, neg(phi)))))


def test_ite_on_lists():
    phi = equals(va, vb)
    merged = ite(phi, [c, 1], [d, 2])
    assert merged[0] == ite(phi, c, d)
    assert merged[1] == iteV(phi, 1, 2)
    with pytest.raises(ConditionalError):
        ite(phi, [c], [c, d])


def test_iteV_examples():
    phi = eq(a, b)
    v = iteV(phi, 1, 2)
    assert v.branches == ((1, phi), (2, neg(phi)))
    assert show(v) == "1 : a = b | 2 : ¬(a = b)"
    assert iteV(TRUE, 1, 2) == Variants.of(1)
    assert iteV(phi, 7, 7) == Variants.of(7)


def test_when_examples():
    assert when(TRUE, a) == a
    assert when(equals(va, vb), eq(a, b)) == TRUE
    distinct = conj(neq(a, b), neq(b, c), neq(a, c))
    assert when(distinct, size(from_list([a, b, c]))) == Variants.of(3)


def test_when_drops_dead_branches():
    v = iteV(equals(va, vb), 1, 2)
    assert when(neq(a, b), v) == Variants.of(2)


def test_support_examples():
    assert support((a, b)) == [va, vb]
    assert support(atoms()) == []
    assert support(filter_set(lambda x: neq(x, a), atoms())) == [va]
    assert support((a, b, a)) == [va, vb]


def test_group_action_examples():
    assert group_action(lambda v: v, (a, b)) == (a, b)
    assert group_action({va: vb, vb: va}, (a, b)) == (b, a)
    s = filter_set(lambda x: neq(x, a), atoms())
    assert group_action({va: vc}, s) == filter_set(lambda x: neq(x, c), atoms())


def test_variants_dissolve_into_set_entries():
    phi = equals(vc, vd)
    s = insert(ite(phi, a, b), empty_set())
    assert [(en.element, en.guard, en.binders) for en in s.entries] == [
        (a, phi, ()), (b, neg(phi), ())]
    assert show(s) == "{a : c = d, b : ¬(c = d)}"


PARAMS = oracles.atom_names(3, "p")


def _value(rng, ordered):
    kind = rng.randrange(4)
    x, y = (atom(p) for p in rng.sample(PARAMS, 2))
    if kind == 0:
        return x
    if kind == 1:
        return (x, y)
    if kind == 2:
        return oracles.random_guard(rng, PARAMS, ordered)
    return oracles.random_atom_set(rng, PARAMS, ordered)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_ite_of_negation_swaps_branches(seed):
    rng = random.Random(seed)
    x = _value(rng, False)
    y = _same_kind(rng, x)
    c = oracles.random_guard(rng, PARAMS, False)
    assert valid(eq(ite(c, x, y), ite(neg(c), y, x)))


def _same_kind(rng, x):
    while True:
        y = _value(rng, False)
        if type(y) is type(x) or (isinstance(x, Atom) and isinstance(y, Atom)):
            return y


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_identity_action_is_identity(seed):
    x = _value(random.Random(seed), False)
    assert valid(eq(x, group_action(lambda v: v, x)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.permutations(PARAMS))
def test_support_follows_action(seed, image):
    x = _value(random.Random(seed), False)
    m = dict(zip(PARAMS, image))
    assert set(support(group_action(m, x))) == {m[v] for v in support(x)}
