"""Orbits, hulls and supports under the automorphism group of the atoms."""

from __future__ import annotations

import itertools
from typing import Any, Iterator, Sequence

from .formula import (
    TRUE, AtomVariable, Formula, conj, equals, exists_all, fresh_variable, iff, leq, lt,
)
from .nominal import Atom, ambient, rename, support
from .sets import (
    DefinableSet, SetEntry, _entries, eq_set, intersection, is_singleton, map_set, sum_set,
)
from .theory import AtomTheory, Truth, current_theory, implies_under, satisfiable

__all__ = [
    "orbit", "hull", "supports", "least_support", "set_orbit", "set_orbits",
    "atomic_diagrams",
]


def _variables(supp: Sequence[Atom | AtomVariable]) -> list[AtomVariable]:
    out = []
    for a in supp:
        out.append(a.variable if isinstance(a, Atom) else a)
    return list(dict.fromkeys(out))


def _relations(theory: AtomTheory):
    if theory is AtomTheory.ORDERED:
        return (equals, leq)
    return (equals,)


def orbit(supp: Sequence[Atom | AtomVariable], x: Any) -> DefinableSet:
    """All images of ``x`` under automorphisms fixing ``supp`` pointwise."""
    fixed = _variables(supp)
    own = support(x)
    moved = [fresh_variable() for _ in own]
    relations = _relations(current_theory())
    parts = []
    for r in relations:
        for i, j in itertools.permutations(range(len(own)), 2):
            parts.append(iff(r(moved[i], moved[j]), r(own[i], own[j])))
        for i, a in itertools.product(range(len(own)), fixed):
            parts.append(iff(r(moved[i], a), r(own[i], a)))
    image = rename(x, dict(zip(own, moved)))
    return DefinableSet(_entries(image, conj(parts), tuple(moved)))


def hull(supp: Sequence[Atom | AtomVariable], s: DefinableSet) -> DefinableSet:
    """Closure of ``s`` under automorphisms fixing ``supp``."""
    return sum_set(map_set(lambda x: orbit(supp, x), s))


def supports(supp: Sequence[Atom | AtomVariable], x: Any) -> Formula:
    return is_singleton(orbit(supp, x))


def least_support(x: Any) -> list[AtomVariable]:
    """A minimal support of ``x``, found by greedily dropping atoms from its
    free variables (last first).  Over equality atoms this is the least one."""
    supp = support(x)
    ctx = ambient()
    for a in reversed(list(supp)):
        candidate = [b for b in supp if b != a]
        if implies_under(ctx, supports(candidate, x)) is Truth.YES:
            supp = candidate
    return supp


def set_orbit(s: DefinableSet, x: Any) -> DefinableSet:
    """The orbit of ``x`` inside ``s``."""
    return intersection(orbit([], x), s)


def _ordered_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    for size in range(1, len(items) + 1):
        for first in itertools.combinations(items, size):
            rest = [i for i in items if i not in first]
            for tail in _ordered_partitions(rest):
                yield [list(first)] + tail


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]
        yield [[head]] + part


def atomic_diagrams(variables: Sequence[AtomVariable],
                    theory: AtomTheory | None = None) -> Iterator[Formula]:
    """Complete descriptions of how ``variables`` relate: one formula per
    equality type (equality atoms) or order type (ordered atoms)."""
    theory = theory or current_theory()
    variables = list(variables)
    if theory is AtomTheory.ORDERED:
        for blocks in _ordered_partitions(variables):
            parts = [equals(b[0], v) for b in blocks for v in b[1:]]
            parts += [lt(p[0], q[0]) for p, q in zip(blocks, blocks[1:])]
            yield conj(parts)
    else:
        for blocks in _set_partitions(variables):
            parts = [equals(b[0], v) for b in blocks for v in b[1:]]
            parts += [~equals(p[0], q[0]) for p, q in itertools.combinations(blocks, 2)]
            yield conj(parts)


def set_orbits(s: DefinableSet) -> DefinableSet:
    """The set of orbits of ``s`` (under automorphisms fixing its free atoms).

    Each entry is split by every atomic diagram over its binders and the free
    atoms of ``s``; the part of the diagram that speaks only about the free
    atoms becomes the guard of the orbit in the result.
    """
    params = support(s)
    found: list[tuple[Formula, DefinableSet]] = []
    for entry in s.entries:
        entry = entry.opened()
        for diagram in atomic_diagrams(list(entry.binders) + params):
            guard = conj(entry.guard, diagram)
            if not satisfiable(exists_all(entry.binders, guard)):
                continue
            outer = _parameter_part(diagram, params)
            piece = DefinableSet(_entries(entry.element, guard, entry.binders))
            if any(c.key == outer.key and implies_under(outer, eq_set(p, piece)) is Truth.YES
                   for c, p in found):
                continue
            found.append((outer, piece))
    return DefinableSet(SetEntry(p, c, ()) for c, p in found)


def _parameter_part(diagram: Formula, params: list[AtomVariable]) -> Formula:
    # the diagram restricted to parameters is the diagram of the parameters
    if not params:
        return TRUE
    for candidate in atomic_diagrams(params):
        if implies_under(diagram, candidate) is Truth.YES:
            return candidate
    raise AssertionError("diagram does not determine its parameters")
