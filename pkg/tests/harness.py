"""Checks shared by the unit tests and the acceptance suite.

Each function returns data to compare against an independent oracle from
:mod:`oracles`, never a verdict computed from the same code path twice.
"""

from __future__ import annotations

import itertools
import random

from atomsets import (
    Truth, atom, atoms, conj, eq_set, equals, filter_set, from_list, implies, implies_under,
    intersection, is_subset_of, map_set, member, pairs, singleton, sum_set, under, union,
)
from atomsets.formula import lt, substitute

from oracles import atom_names, finite_closure, random_atom_function, random_atom_predicate
from oracles import random_atom_set, random_guard

PARAMS = atom_names(3, "p")


def set_laws(rng: random.Random, ordered: bool) -> list[tuple[str, object]]:
    """Named law instances over three random sets; each should decide Valid."""
    s, t, u = (random_atom_set(rng, PARAMS, ordered) for _ in range(3))
    p, q = (random_atom_predicate(rng, PARAMS, ordered) for _ in range(2))
    f, g = (random_atom_function(rng, PARAMS, ordered) for _ in range(2))
    st, tu, su = is_subset_of(s, t), is_subset_of(t, u), is_subset_of(s, u)
    return [
        ("union commutative", eq_set(union(s, t), union(t, s))),
        ("union associative", eq_set(union(union(s, t), u), union(s, union(t, u)))),
        ("union idempotent", eq_set(union(s, s), s)),
        ("intersection distributes", eq_set(intersection(s, union(t, u)),
                                            union(intersection(s, t), intersection(s, u)))),
        ("subset reflexive", is_subset_of(s, s)),
        ("subset antisymmetric", implies(conj(st, is_subset_of(t, s)), eq_set(s, t))),
        ("subset transitive", implies(conj(st, tu), su)),
        ("filter fusion", eq_set(filter_set(p, filter_set(q, s)),
                                 filter_set(lambda x: conj(p(x), q(x)), s))),
        ("sum of singletons", eq_set(sum_set(map_set(singleton, s)), s)),
        ("map composition", eq_set(map_set(lambda x: f(g(x)), s), map_set(f, map_set(g, s)))),
    ]


def sample_context(sample, ordered: bool):
    """Complete description of the sample atoms: all distinct (and increasing)."""
    if ordered:
        return conj(lt(a, b) for a, b in zip(sample, sample[1:]))
    return conj(~equals(a, b) for a, b in itertools.combinations(sample, 2))


def random_relation(rng: random.Random, sample, ordered: bool):
    """A random definable binary relation mentioning two of the sample atoms."""
    slots = atom_names(2, "slot")
    pieces = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.4:
            pieces.append(from_list([(atom(rng.choice(sample)), atom(rng.choice(sample)))
                                     for _ in range(rng.randint(1, 4))]))
        else:
            shape = random_guard(rng, slots + list(sample[:2]), ordered, rng.randint(1, 4))
            pieces.append(filter_set(
                lambda pr, shape=shape: substitute(shape, {slots[0]: pr[0].variable,
                                                           slots[1]: pr[1].variable}),
                pairs(atoms(), atoms())))
    return pieces[0] if len(pieces) == 1 else union(*pieces)


def tc_on_sample(rng: random.Random, ordered: bool, closure, n: int = 5):
    """Restrict a random relation to ``n`` sample atoms, close it with
    ``closure`` and compare membership with the finite transitive closure.

    Returns ``(mismatches, undetermined)`` over the ``n * n`` sample pairs.
    """
    sample = atom_names(n, "s")
    ctx = sample_context(sample, ordered)
    in_sample = from_list([atom(v) for v in sample])
    r = random_relation(rng, sample, ordered)
    with under(ctx):
        restricted = filter_set(lambda pr: conj(member(pr[0], in_sample), member(pr[1], in_sample)), r)
        tc = closure(restricted)

        def holds(rel, i, j):
            return implies_under(ctx, member((atom(sample[i]), atom(sample[j])), rel))

        edges = {(i, j) for i in range(n) for j in range(n) if holds(r, i, j) is Truth.YES}
        want = finite_closure(edges)
        mismatches = undetermined = 0
        for i in range(n):
            for j in range(n):
                got = holds(tc, i, j)
                if got is Truth.UNDETERMINED:
                    undetermined += 1
                elif (got is Truth.YES) != ((i, j) in want):
                    mismatches += 1
    return mismatches, undetermined
