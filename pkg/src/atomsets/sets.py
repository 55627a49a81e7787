"""Definable sets: finite lists of guarded entries ``e : φ for x₁,…,x_k``.

An entry denotes all instances of the element ``e`` over atom values of its
binders satisfying the guard ``φ``; a set denotes the union of its entries.
Binders are bound names: whenever an operation works inside an entry it first
renames the entry's binders to fresh variables, so values supplied by the
caller can never be captured.

The representation is not canonical.  Two sets with the same denotation may
print differently; :func:`eq_set` decides semantic equality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .errors import StepBoundExceeded
from .formula import (
    FALSE, TRUE, AtomVariable, Formula, conj, disj, exists_all, formula_key,
    fresh_variable, neg, ordered_free_variables, pretty, substitute,
)
from .nominal import (
    Maybe, Variants, _cond, _eq, _when, ambient, atom, eq, free_atoms,
    nominal_key, rename, show, simplify_under, split_variants, under, when,
)
from .theory import Truth, eliminate_quantifiers, implies_under, satisfiable

log = logging.getLogger(__name__)

__all__ = [
    "SetEntry", "DefinableSet", "empty_set", "atoms", "singleton", "insert",
    "from_list", "map_set", "filter_set", "sum_set", "is_empty", "exists_in",
    "for_all", "member", "is_subset_of", "eq_set", "union", "intersection",
    "pairs", "pairs_with", "pairs_with_filter", "product", "atom_pairs",
    "atom_tuples", "replicate_set", "size", "is_singleton", "compact",
]


@dataclass(frozen=True)
class SetEntry:
    element: Any
    guard: Formula
    binders: tuple[AtomVariable, ...]

    def binder_order(self) -> list[AtomVariable]:
        """Binders in order of first occurrence (element first, then guard)."""
        bound = set(self.binders)
        seen: dict[AtomVariable, None] = {}
        for v in free_atoms(self.element):
            if v in bound:
                seen.setdefault(v)
        for v in ordered_free_variables(self.guard):
            if v in bound:
                seen.setdefault(v)
        return list(seen)

    def free(self) -> list[AtomVariable]:
        bound = set(self.binders)
        out = dict.fromkeys(v for v in free_atoms(self.element) if v not in bound)
        out.update(dict.fromkeys(v for v in ordered_free_variables(self.guard) if v not in bound))
        return list(out)

    def key(self, env: dict | None = None, depth: int = 0) -> tuple:
        env = dict(env or {})
        order = self.binder_order()
        for i, v in enumerate(order):
            env[v] = depth + 1 + i
        depth += len(order)
        return (len(order), nominal_key(self.element, env, depth), formula_key(self.guard, env, depth))

    def opened(self) -> SetEntry:
        """The same entry with its binders renamed to fresh variables."""
        if not self.binders:
            return self
        mapping = {b: fresh_variable() for b in self.binders}
        return SetEntry(rename(self.element, mapping), substitute(self.guard, mapping),
                        tuple(mapping.values()))


def _entries(element: Any, guard: Formula, binders: Sequence[AtomVariable]) -> list[SetEntry]:
    """Normalised entries for one guarded element: variants are dissolved,
    unused binders dropped and unsatisfiable guards pruned."""
    out = []
    for value, g in split_variants(element):
        g = conj(guard, g)
        if g == FALSE:
            continue
        used = set(free_atoms(value)) | g.free
        bs = tuple(b for b in binders if b in used)
        if g != TRUE and not satisfiable(exists_all(bs, g)):
            continue
        out.append(SetEntry(value, g, bs))
    return out


class DefinableSet:
    """A possibly infinite set given by guarded entries.

    ``==`` compares representations; use :func:`eq_set` for semantic equality.
    """

    __slots__ = ("entries", "_key")

    def __init__(self, entries: Iterable[SetEntry] = ()):
        unique: dict[tuple, SetEntry] = {}
        for e in entries:
            unique.setdefault(e.key(), e)
        object.__setattr__(self, "entries", tuple(unique[k] for k in sorted(unique)))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("definable sets are immutable")

    def key(self, env: dict | None = None, depth: int = 0) -> tuple:
        if env:
            return ("S", tuple(sorted(e.key(env, depth) for e in self.entries)))
        if self._key is None:
            object.__setattr__(self, "_key", ("S", tuple(e.key() for e in self.entries)))
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DefinableSet):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"DefinableSet({show(self)})"

    def __str__(self) -> str:
        return show(self)

    # method spellings of the module-level operations
    def map(self, f: Callable[[Any], Any]) -> DefinableSet:
        return map_set(f, self)

    def filter(self, p: Callable[[Any], Formula]) -> DefinableSet:
        return filter_set(p, self)

    def is_empty(self) -> Formula:
        return is_empty(self)

    def contains(self, x: Any) -> Formula:
        return member(x, self)

    def __or__(self, other: DefinableSet) -> DefinableSet:
        return union(self, other)

    def __and__(self, other: DefinableSet) -> DefinableSet:
        return intersection(self, other)


# -- registration with the generic operations --------------------------------------

@free_atoms.register
def _(x: DefinableSet):
    seen: dict[AtomVariable, None] = {}
    for entry in x.entries:
        seen.update(dict.fromkeys(entry.free()))
    return iter(list(seen))


@rename.register
def _(x: DefinableSet, mapping) -> DefinableSet:
    out = []
    for entry in x.entries:
        m = {k: v for k, v in mapping.items() if k not in entry.binders}
        if not m:
            out.append(entry)
            continue
        if set(m.values()) & set(entry.binders):
            entry = entry.opened()
        out.append(SetEntry(rename(entry.element, m), substitute(entry.guard, m), entry.binders))
    return DefinableSet(out)


@nominal_key.register
def _(x: DefinableSet, env=None, depth=0) -> tuple:
    return x.key(env, depth)


@_eq.register
def _(x: DefinableSet, y) -> Formula:
    if not isinstance(y, DefinableSet):
        raise TypeError("a set can only be compared with a set")
    return eq_set(x, y)


@_cond.register
def _(x: DefinableSet, c, y) -> DefinableSet:
    if not isinstance(y, DefinableSet):
        raise TypeError("a set can only be merged with a set")
    out = []
    for part, guard in ((x, c), (y, neg(c))):
        for entry in part.entries:
            entry = entry.opened()
            out.extend(_entries(entry.element, conj(entry.guard, guard), entry.binders))
    return DefinableSet(out)


@_when.register
def _(x: DefinableSet, ctx) -> DefinableSet:
    out = []
    for entry in x.entries:
        entry = entry.opened()
        if not satisfiable(conj(ctx, entry.guard)):
            continue
        guard = simplify_under(ctx, entry.guard)
        element = _when(entry.element, conj(ctx, entry.guard))
        out.extend(_entries(element, guard, entry.binders))
    return DefinableSet(out)


_DISPLAY = ["x", "y", "z", "w", "v", "u", "s", "t", "p", "q", "r"]


def _display_names(count: int, taken: set[str]) -> list[str]:
    names: list[str] = []
    suffix = 0
    while len(names) < count:
        for base in _DISPLAY:
            candidate = base if suffix == 0 else f"{base}{suffix}"
            if candidate not in taken:
                names.append(candidate)
                taken.add(candidate)
                if len(names) == count:
                    break
        suffix += 1
    return names


@show.register
def _(x: DefinableSet, names=None) -> str:
    names = dict(names or {})
    parts = []
    for entry in x.entries:
        order = entry.binder_order()
        taken = set(names.values()) | {v.name for v in entry.free() if v not in names}
        local = dict(names)
        local.update(zip(order, _display_names(len(order), taken)))
        text = f"{show(entry.element, local)} : {pretty(entry.guard, local)}"
        if order:
            text += " for " + ",".join(local[b] for b in order)
        parts.append(text)
    return "{" + ", ".join(parts) + "}"


# -- constructors ---------------------------------------------------------------------

def empty_set() -> DefinableSet:
    return DefinableSet()


def atoms() -> DefinableSet:
    """The set of all atoms."""
    v = fresh_variable()
    return DefinableSet([SetEntry(atom(v), TRUE, (v,))])


def insert(x: Any, s: DefinableSet) -> DefinableSet:
    return DefinableSet(_entries(x, TRUE, ()) + list(s.entries))


def singleton(x: Any) -> DefinableSet:
    return insert(x, empty_set())


def from_list(xs: Iterable[Any]) -> DefinableSet:
    out: list[SetEntry] = []
    for x in xs:
        out.extend(_entries(x, TRUE, ()))
    return DefinableSet(out)


# -- core operations ---------------------------------------------------------------

def map_set(f: Callable[[Any], Any], s: DefinableSet) -> DefinableSet:
    """Apply ``f`` to every element; ``f`` runs with the entry guard added to
    the ambient context."""
    out = []
    for entry in s.entries:
        entry = entry.opened()
        with under(entry.guard):
            value = f(entry.element)
        out.extend(_entries(value, entry.guard, entry.binders))
    return DefinableSet(out)


def filter_set(p: Callable[[Any], Formula | bool], s: DefinableSet) -> DefinableSet:
    out = []
    for entry in s.entries:
        entry = entry.opened()
        with under(entry.guard):
            c = _as_formula(p(entry.element))
        out.extend(_entries(entry.element, conj(entry.guard, c), entry.binders))
    return DefinableSet(out)


def _as_formula(c: Formula | bool) -> Formula:
    if isinstance(c, bool):
        return TRUE if c else FALSE
    if not isinstance(c, Formula):
        raise TypeError(f"predicate returned {type(c).__name__}, expected a formula")
    return c


def sum_set(s: DefinableSet) -> DefinableSet:
    """Union of a set of sets."""
    out = []
    for outer in s.entries:
        inner_set = outer.element
        if not isinstance(inner_set, DefinableSet):
            raise TypeError("sum expects a set of sets")
        avoid = set(outer.binders) | outer.guard.free
        for inner in inner_set.entries:
            if avoid & set(inner.binders):
                inner = inner.opened()
            out.extend(_entries(inner.element, conj(inner.guard, outer.guard),
                                inner.binders + outer.binders))
    return DefinableSet(out)


def is_empty(s: DefinableSet) -> Formula:
    """Quantifier-free formula stating that ``s`` has no elements."""
    return conj(neg(eliminate_quantifiers(exists_all(e.binders, e.guard))) for e in s.entries)


def exists_in(p: Callable[[Any], Formula | bool], s: DefinableSet) -> Formula:
    return neg(is_empty(filter_set(p, s)))


def for_all(p: Callable[[Any], Formula | bool], s: DefinableSet) -> Formula:
    return is_empty(filter_set(lambda x: neg(_as_formula(p(x))), s))


def member(x: Any, s: DefinableSet) -> Formula:
    return exists_in(lambda y: eq(x, y), s)


def is_subset_of(s: DefinableSet, t: DefinableSet) -> Formula:
    return for_all(lambda x: member(x, t), s)


def eq_set(s: DefinableSet, t: DefinableSet) -> Formula:
    return conj(is_subset_of(s, t), is_subset_of(t, s))


def union(s: DefinableSet, t: DefinableSet) -> DefinableSet:
    return DefinableSet(s.entries + t.entries)


def intersection(s: DefinableSet, t: DefinableSet) -> DefinableSet:
    return filter_set(lambda x: member(x, t), s)


def is_singleton(s: DefinableSet) -> Formula:
    return exists_in(lambda x: for_all(lambda y: eq(x, y), s), s)


# -- pairs and tuples -----------------------------------------------------------------

def _pairwise(s: DefinableSet, t: DefinableSet, combine) -> DefinableSet:
    out = []
    for a in s.entries:
        a = a.opened()
        for b in t.entries:
            b = b.opened()
            guard = conj(a.guard, b.guard)
            if guard == FALSE:
                continue
            with under(guard):
                value, extra = combine(a.element, b.element)
            out.extend(_entries(value, conj(guard, extra), a.binders + b.binders))
    return DefinableSet(out)


def pairs(s: DefinableSet, t: DefinableSet) -> DefinableSet:
    return _pairwise(s, t, lambda x, y: ((x, y), TRUE))


def pairs_with(f: Callable[[Any, Any], Any], s: DefinableSet, t: DefinableSet) -> DefinableSet:
    return _pairwise(s, t, lambda x, y: (f(x, y), TRUE))


def pairs_with_filter(f: Callable[[Any, Any], Maybe], s: DefinableSet,
                      t: DefinableSet) -> DefinableSet:
    """Pairs mapped through ``f``, keeping a result only where the returned
    :class:`~atomsets.nominal.Maybe` is present."""
    def combine(x, y):
        m = f(x, y)
        if not isinstance(m, Maybe):
            raise TypeError("pairs_with_filter expects the function to return a Maybe")
        return m.value, m.guard
    return _pairwise(s, t, combine)


def product(*sets: DefinableSet) -> DefinableSet:
    """Set of tuples with one component from each argument."""
    result = singleton(())
    for s in reversed(sets):
        result = pairs_with(lambda x, rest: (x,) + rest, s, result)
    return result


def atom_pairs() -> DefinableSet:
    return sum_set(map_set(lambda x: map_set(lambda y: (x, y), atoms()), atoms()))


def atom_tuples(n: int) -> DefinableSet:
    """All ``n``-tuples of atoms, built by nested map and sum."""
    if n == 0:
        return singleton(())
    rest = atom_tuples(n - 1)
    return sum_set(map_set(lambda x: map_set(lambda t: (x,) + t, rest), atoms()))


def replicate_set(n: int, s: DefinableSet) -> DefinableSet:
    """Lists of length ``n`` with elements from ``s``."""
    result = singleton([])
    for _ in range(n):
        result = pairs_with(lambda x, rest: [x] + rest, s, result)
    return result


# -- size ---------------------------------------------------------------------------

def _at_least(n: int, s: DefinableSet) -> Formula:
    if n == 1:
        return neg(is_empty(s))

    def distinct(xs: list) -> Formula:
        return conj(neg(eq(xs[i], xs[j])) for i in range(n) for j in range(i + 1, n))

    return exists_in(distinct, replicate_set(n, s))


def size(s: DefinableSet, max_steps: int | None = None) -> Variants:
    """Number of elements, as a variant over the possible cardinalities.

    Only terminates for sets that are finite under the ambient context;
    ``max_steps`` bounds the cardinalities tried before giving up.
    """
    ctx = ambient()
    bounds = [TRUE]
    n = 1
    while True:
        if max_steps is not None and n > max_steps:
            raise StepBoundExceeded(f"size: more than {max_steps} elements")
        at_least = _at_least(n, s)
        if implies_under(ctx, at_least) is Truth.NO:
            break
        bounds.append(at_least)
        n += 1
    bounds.append(at_least)
    result = Variants([(i, conj(bounds[i], neg(bounds[i + 1]))) for i in range(len(bounds) - 1)])
    return when(ctx, result) if ctx != TRUE else result


# -- compaction ---------------------------------------------------------------------

def compact(s: DefinableSet) -> DefinableSet:
    """Equivalent, usually smaller representation.

    Binders that occur only in the guard are quantified away, and entries whose
    elements agree up to renaming of binders are merged by disjoining guards.
    """
    groups: dict[tuple, list[SetEntry]] = {}
    for entry in s.entries:
        in_element = set(free_atoms(entry.element))
        keep = tuple(b for b in entry.binders if b in in_element)
        drop = [b for b in entry.binders if b not in in_element]
        guard = eliminate_quantifiers(exists_all(drop, entry.guard)) if drop else entry.guard
        entry = SetEntry(entry.element, guard, keep)
        groups.setdefault(_element_key(entry), []).append(entry)
    out = []
    for members in groups.values():
        base = members[0].opened()
        order = base.binder_order()
        guards = [base.guard]
        for other in members[1:]:
            mapping = dict(zip(other.binder_order(), order))
            guards.append(substitute(other.guard, mapping))
        out.extend(_entries(base.element, disj(guards), base.binders))
    return DefinableSet(out)


def _element_key(entry: SetEntry) -> tuple:
    env = {}
    order = [v for v in dict.fromkeys(free_atoms(entry.element)) if v in entry.binders]
    for i, v in enumerate(order):
        env[v] = i + 1
    return (len(order), nominal_key(entry.element, env, len(order)))
