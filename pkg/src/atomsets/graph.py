"""Definable graphs: relational composition, transitive closure, cycle
detection and equivariant colouring."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .errors import StepBoundExceeded
from .formula import TRUE, Formula, conj, neg
from .nominal import Variants, ambient, eq, ite, maybe_if, neq, variant
from .orbit import set_orbits
from .sets import (
    DefinableSet, atoms, compact, empty_set, exists_in, filter_set, for_all, from_list,
    intersection, is_empty, map_set, member, pairs_with, pairs_with_filter, replicate_set,
    singleton, sum_set, union,
)
from .theory import Truth, implies_under

log = logging.getLogger(__name__)

__all__ = [
    "Graph", "compose", "transitive_closure", "transitive_closure_steps", "has_cycle",
    "has_odd_length_cycle", "is_coloring_of", "partitions", "coloring",
    "has_equivariant_coloring", "distinct_pairs", "swap_graph", "overlap_graph",
]


@dataclass(frozen=True)
class Graph:
    vertices: DefinableSet
    edges: DefinableSet


def compose(r: DefinableSet, s: DefinableSet) -> DefinableSet:
    """Relational composition ``{(a, d) | (a, b) ∈ r, (b, d) ∈ s}``."""
    joined = pairs_with_filter(lambda p, q: maybe_if(eq(p[1], q[0]), (p[0], q[1])), r, s)
    return compact(joined)


def transitive_closure_steps(r: DefinableSet,
                             max_iterations: int | None = None) -> tuple[DefinableSet, int]:
    """Transitive closure together with the number of ``r ∪ r∘r`` steps taken.

    The loop stops once a step adds nothing, which is decided semantically
    (under the ambient context) rather than by comparing representations.
    """
    ctx = ambient()
    iterations = 0
    while True:
        if max_iterations is not None and iterations >= max_iterations:
            raise StepBoundExceeded(f"transitive closure: no fixpoint after {iterations} steps")
        step = compact(union(r, compose(r, r)))
        iterations += 1
        log.debug("closure step %d: %d entries", iterations, len(step.entries))
        if step == r or implies_under(ctx, eq(r, step)) is Truth.YES:
            return r, iterations
        r = step


def transitive_closure(r: DefinableSet, max_iterations: int | None = None) -> DefinableSet:
    return transitive_closure_steps(r, max_iterations)[0]


def has_cycle(g: Graph) -> Formula:
    return exists_in(lambda p: eq(p[0], p[1]), transitive_closure(g.edges))


def has_odd_length_cycle(g: Graph) -> Formula:
    swapped = map_set(lambda p: (p[1], p[0]), g.edges)
    even = transitive_closure(compose(g.edges, g.edges))
    return neg(is_empty(intersection(swapped, even)))


def is_coloring_of(c: Callable[[Any], Any], g: Graph) -> Formula:
    return for_all(lambda e: neq(c(e[0]), c(e[1])), g.edges)


def partitions(n: int, k: int) -> DefinableSet:
    """Colourings of ``n`` items using exactly the colours ``0..k-1``, one per
    partition of the items into ``k`` blocks."""
    if n == k:
        return singleton(list(range(n)))
    if k < 1 or n < k:
        return empty_set()
    if k == 1:
        return singleton([0] * n)
    return union(map_set(lambda p: [k - 1] + p, partitions(n - 1, k - 1)),
                 pairs_with(lambda c, p: [c] + p, from_list(range(k)), partitions(n - 1, k)))


def coloring(orbits: Sequence[DefinableSet], assignment: Sequence[int], x: Any) -> Variants:
    """Colour of ``x``: the colour assigned to the first orbit containing it,
    or 0 if none does."""
    if len(orbits) != len(assignment):
        raise ValueError("orbits and assignment differ in length")
    if not orbits:
        return variant(0)
    return ite(member(x, orbits[0]), variant(assignment[0]),
               coloring(orbits[1:], assignment[1:], x))


def has_equivariant_coloring(g: Graph, k: int) -> Formula:
    """Whether some colouring with at most ``k`` colours that is constant on
    each vertex orbit is a proper colouring of ``g``."""
    orbits = set_orbits(g.vertices)
    n = len(orbits.entries)
    palettes = empty_set()
    for used in range(1, k + 1):
        palettes = union(palettes, partitions(n, used))
    checks = pairs_with(lambda os, ps: is_coloring_of(lambda v: coloring(os, ps, v), g),
                        replicate_set(n, orbits), palettes)
    return member(TRUE, checks)


# -- example graphs ---------------------------------------------------------------

def distinct_pairs() -> DefinableSet:
    return sum_set(map_set(lambda x: map_set(lambda y: (x, y),
                                             filter_set(lambda y: neq(x, y), atoms())),
                           atoms()))


def swap_graph() -> Graph:
    """Vertices are pairs of distinct atoms; each is joined to its swap."""
    vertices = distinct_pairs()
    return Graph(vertices, map_set(lambda p: (p, (p[1], p[0])), vertices))


def overlap_graph() -> Graph:
    """Vertices are pairs of distinct atoms; ``(a, b)`` and ``(b, c)`` are
    adjacent (in both directions) whenever ``a, b, c`` are distinct.  It has
    no equivariant 3-colouring."""
    vertices = distinct_pairs()

    def edges_from(p):
        a, b = p
        third = filter_set(lambda c: conj(neq(c, a), neq(c, b)), atoms())
        return map_set(lambda c: ((a, b), (b, c)), third)

    forward = sum_set(map_set(edges_from, vertices))
    backward = map_set(lambda e: (e[1], e[0]), forward)
    return Graph(vertices, union(forward, backward))
