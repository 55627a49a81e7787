"""Atoms, variants, conditionals and the generic operations every set element
type supports.

Value types understood by this module: :class:`Atom`, :class:`Variants`,
:class:`Maybe`, :class:`~atomsets.formula.Formula` (booleans), ``int``,
``str``, ``tuple`` and ``list`` of supported values, and definable sets (their
handlers are registered by :mod:`atomsets.sets`).  Python callables take part in
:func:`ite` only.

Every operation runs relative to an *ambient context*, a formula over the free
atom variables in scope.  It starts as ``⊤`` and is extended by :func:`under`
and by the set operations while they work on an entry.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from contextvars import ContextVar
from functools import singledispatch
from typing import Any, Callable, Iterable, Iterator, Mapping

from .errors import ConditionalError
from .formula import (
    FALSE, TRUE, And, AtomVariable, Exists, ForAll, Formula, Not, Or, conj, disj, equals,
    formula_key, fresh_variable, iff, leq, map_literals, neg, ordered_free_variables,
    pretty, substitute, var_key,
)
from .theory import Truth, implies_under, satisfiable

__all__ = [
    "Atom", "Variants", "Maybe", "atom", "fresh_atom", "variant", "maybe_if",
    "nothing", "ambient", "under", "eq", "neq", "leq_atoms", "lt_atoms", "ite",
    "iteV", "cond", "when", "simplify_under", "support", "group_action",
    "rename", "free_atoms", "nominal_key", "split_variants", "show",
]

_ambient: ContextVar[Formula] = ContextVar("atomsets_ambient", default=TRUE)


def ambient() -> Formula:
    """The formula currently assumed about the free atom variables."""
    return _ambient.get()


@contextmanager
def under(phi: Formula) -> Iterator[Formula]:
    """Evaluate the block with ``phi`` added to the ambient context."""
    ctx = conj(_ambient.get(), phi)
    token = _ambient.set(ctx)
    try:
        yield ctx
    finally:
        _ambient.reset(token)


# -- value types ----------------------------------------------------------------

class Variants:
    """A single value whose identity depends on which guard holds.

    Branches are kept sorted, with equal values merged (guards disjoined) and
    branches with unsatisfiable guards dropped, unless that would leave none.
    """

    __slots__ = ("branches",)

    def __init__(self, branches: Iterable[tuple[Any, Formula]]):
        object.__setattr__(self, "branches", _normalize_branches(branches))

    def __setattr__(self, name, value):
        raise AttributeError("variants are immutable")

    @classmethod
    def of(cls, value: Any) -> Variants:
        return cls([(value, TRUE)])

    @property
    def values(self) -> list[Any]:
        return [v for v, _ in self.branches]

    def is_single(self) -> bool:
        return len(self.branches) == 1 and self.branches[0][1] == TRUE

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return nominal_key(self) == nominal_key(other)

    def __hash__(self) -> int:
        return hash(nominal_key(self))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({show(self)})"

    def __str__(self) -> str:
        return show(self)


class Atom(Variants):
    """An atom: a variant over atom variables.  A plain variable is the
    one-branch variant with guard ``⊤``."""

    __slots__ = ()

    @property
    def variable(self) -> AtomVariable:
        if not self.is_single():
            raise ValueError(f"{self} is not a single atom variable")
        return self.branches[0][0]


def _normalize_branches(branches: Iterable[tuple[Any, Formula]]) -> tuple:
    original = list(branches)
    if not original:
        raise ValueError("a variant needs at least one branch")
    merged: dict[tuple, list] = {}
    for value, guard in original:
        k = nominal_key(value)
        if k in merged:
            merged[k][1] = disj(merged[k][1], guard)
        else:
            merged[k] = [value, guard]
    alive = {k: vg for k, vg in merged.items() if vg[1] != FALSE and satisfiable(vg[1])}
    if not alive:
        alive = merged
    return tuple((alive[k][0], alive[k][1]) for k in sorted(alive))


def atom(v: AtomVariable | str) -> Atom:
    if isinstance(v, str):
        from .formula import variable
        v = variable(v)
    return Atom([(v, TRUE)])


def fresh_atom() -> Atom:
    """An atom over a never-before-used variable."""
    return atom(fresh_variable())


def variant(value: Any) -> Variants:
    return Variants.of(value)


class Maybe:
    """An optional value: present exactly when ``guard`` holds."""

    __slots__ = ("value", "guard")

    def __init__(self, value: Any, guard: Formula):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "guard", guard)

    def __setattr__(self, name, value):
        raise AttributeError("Maybe is immutable")

    def __repr__(self) -> str:
        return f"Maybe({show(self.value)} : {pretty(self.guard)})"


def maybe_if(c: Formula | bool, x: Any) -> Maybe:
    return Maybe(x, _as_formula(c))


def nothing() -> Maybe:
    return Maybe(None, FALSE)


def _as_formula(c: Formula | bool) -> Formula:
    if isinstance(c, Formula):
        return c
    if isinstance(c, bool):
        return TRUE if c else FALSE
    raise TypeError(f"expected a formula, got {type(c).__name__}")


# -- generic capabilities ---------------------------------------------------------

@singledispatch
def free_atoms(x: Any) -> Iterator[AtomVariable]:
    """Free atom variables of ``x`` in order of occurrence (with repeats)."""
    if isinstance(x, (int, str)) or x is None:
        return iter(())
    raise TypeError(f"{type(x).__name__} is not a nominal type")


@free_atoms.register
def _(x: Formula) -> Iterator[AtomVariable]:
    return iter(ordered_free_variables(x))


@free_atoms.register
def _(x: Variants) -> Iterator[AtomVariable]:
    for value, guard in x.branches:
        if isinstance(value, AtomVariable):
            yield value
        else:
            yield from free_atoms(value)
        yield from ordered_free_variables(guard)


@free_atoms.register(tuple)
@free_atoms.register(list)
def _(x) -> Iterator[AtomVariable]:
    for item in x:
        yield from free_atoms(item)


@free_atoms.register
def _(x: Maybe) -> Iterator[AtomVariable]:
    yield from ordered_free_variables(x.guard)
    if x.guard != FALSE:
        yield from free_atoms(x.value)


def support(x: Any) -> list[AtomVariable]:
    """Free atom variables of ``x``, deduplicated, in order of occurrence.
    They form a support of ``x``."""
    return list(dict.fromkeys(free_atoms(x)))


@singledispatch
def rename(x: Any, mapping: Mapping[AtomVariable, AtomVariable]) -> Any:
    """Replace free atom variables according to ``mapping`` (capture-avoiding)."""
    if isinstance(x, (int, str)) or x is None:
        return x
    raise TypeError(f"{type(x).__name__} is not a nominal type")


@rename.register
def _(x: Formula, mapping) -> Formula:
    return substitute(x, mapping)


@rename.register
def _(x: Variants, mapping) -> Variants:
    branches = []
    for value, guard in x.branches:
        if isinstance(value, AtomVariable):
            value = mapping.get(value, value)
        else:
            value = rename(value, mapping)
        branches.append((value, substitute(guard, mapping)))
    return type(x)(branches)


@rename.register
def _(x: tuple, mapping) -> tuple:
    return tuple(rename(i, mapping) for i in x)


@rename.register
def _(x: list, mapping) -> list:
    return [rename(i, mapping) for i in x]


@rename.register
def _(x: Maybe, mapping) -> Maybe:
    return Maybe(rename(x.value, mapping), substitute(x.guard, mapping))


def group_action(f: Callable[[AtomVariable], AtomVariable] | Mapping[AtomVariable, AtomVariable],
                 x: Any) -> Any:
    """Apply the atom renaming ``f`` to every free atom variable of ``x``.

    ``f`` should be injective on the support of ``x``.
    """
    if isinstance(f, Mapping):
        mapping = {v: f.get(v, v) for v in support(x)}
    else:
        mapping = {v: _as_variable(f(v)) for v in support(x)}
    return rename(x, mapping)


def _as_variable(v: AtomVariable | Atom) -> AtomVariable:
    return v.variable if isinstance(v, Atom) else v


@singledispatch
def nominal_key(x: Any, env: Mapping[AtomVariable, int] | None = None, depth: int = 0) -> tuple:
    """Total-order key, invariant under renaming of bound variables.

    ``env`` maps bound variables to their binding level; ``depth`` is the
    current level."""
    if isinstance(x, bool):
        return ("F", formula_key(_as_formula(x), env or {}, depth))
    if isinstance(x, int):
        return ("i", x)
    if isinstance(x, str):
        return ("s", x)
    if x is None:
        return ("_",)
    raise TypeError(f"{type(x).__name__} is not a nominal type")


@nominal_key.register
def _(x: AtomVariable, env=None, depth=0) -> tuple:
    return ("v", var_key(x, env or {}, depth))


@nominal_key.register
def _(x: Formula, env=None, depth=0) -> tuple:
    return ("F", formula_key(x, env or {}, depth))


@nominal_key.register
def _(x: Variants, env=None, depth=0) -> tuple:
    tag = "A" if isinstance(x, Atom) else "V"
    return (tag, tuple((nominal_key(v, env, depth), formula_key(g, env or {}, depth))
                       for v, g in x.branches))


@nominal_key.register
def _(x: tuple, env=None, depth=0) -> tuple:
    return ("t", tuple(nominal_key(i, env, depth) for i in x))


@nominal_key.register
def _(x: list, env=None, depth=0) -> tuple:
    return ("l", tuple(nominal_key(i, env, depth) for i in x))


@nominal_key.register
def _(x: Maybe, env=None, depth=0) -> tuple:
    if x.guard == FALSE:
        return ("m",)
    return ("m", formula_key(x.guard, env or {}, depth), nominal_key(x.value, env, depth))


@singledispatch
def split_variants(x: Any) -> list[tuple[Any, Formula]]:
    """Break a value into variant-free alternatives with their guards; this is
    how variants dissolve when they become set elements."""
    return [(x, TRUE)]


@split_variants.register
def _(x: Variants) -> list[tuple[Any, Formula]]:
    out = []
    for value, guard in x.branches:
        if isinstance(x, Atom):
            out.append((atom(value), guard))
        else:
            out.extend((v, conj(guard, g)) for v, g in split_variants(value))
    return out


def _split_sequence(items, build) -> list[tuple[Any, Formula]]:
    parts = [split_variants(i) for i in items]
    if all(len(p) == 1 and p[0][1] == TRUE for p in parts):
        return [(build(p[0][0] for p in parts), TRUE)]
    return [(build(v for v, _ in combo), conj(g for _, g in combo))
            for combo in itertools.product(*parts)]


@split_variants.register
def _(x: tuple) -> list[tuple[Any, Formula]]:
    return _split_sequence(x, tuple)


@split_variants.register
def _(x: list) -> list[tuple[Any, Formula]]:
    return _split_sequence(x, list)


# -- equality -------------------------------------------------------------------

def eq(x: Any, y: Any) -> Formula:
    """The formula stating that ``x`` and ``y`` denote the same value."""
    if isinstance(x, bool) or isinstance(y, bool):
        x, y = _bool_to_formula(x), _bool_to_formula(y)
    if isinstance(x, Variants) and not isinstance(x, Atom) or \
            isinstance(y, Variants) and not isinstance(y, Atom):
        xs = x if isinstance(x, Variants) else Variants.of(x)
        ys = y if isinstance(y, Variants) else Variants.of(y)
        return disj(conj(_eq(v, w), g, h) for v, g in xs.branches for w, h in ys.branches)
    return _eq(x, y)


def _bool_to_formula(x):
    return _as_formula(x) if isinstance(x, bool) else x


def neq(x: Any, y: Any) -> Formula:
    return neg(eq(x, y))


@singledispatch
def _eq(x: Any, y: Any) -> Formula:
    if isinstance(x, (int, str)) or x is None:
        return TRUE if type(x) is type(y) and x == y else FALSE
    raise TypeError(f"{type(x).__name__} is not a nominal type")


@_eq.register
def _(x: AtomVariable, y) -> Formula:
    return equals(x, y)


@_eq.register
def _(x: Atom, y) -> Formula:
    if not isinstance(y, Atom):
        raise TypeError("an atom can only be compared with an atom")
    return disj(conj(equals(a, b), g, h) for a, g in x.branches for b, h in y.branches)


@_eq.register
def _(x: Formula, y) -> Formula:
    return iff(x, _as_formula(y))


def _eq_sequence(x, y) -> Formula:
    if type(x) is not type(y) or len(x) != len(y):
        return FALSE
    return conj(eq(a, b) for a, b in zip(x, y))


_eq.register(tuple, _eq_sequence)
_eq.register(list, _eq_sequence)


@_eq.register
def _(x: Maybe, y) -> Formula:
    both = conj(x.guard, y.guard)
    present = conj(both, eq(x.value, y.value)) if both != FALSE else FALSE
    return disj(present, conj(neg(x.guard), neg(y.guard)))


def leq_atoms(x: Atom, y: Atom) -> Formula:
    """``x ≤ y`` for (possibly variant) atoms; ordered atoms only."""
    return disj(conj(leq(a, b), g, h) for a, g in x.branches for b, h in y.branches)


def lt_atoms(x: Atom, y: Atom) -> Formula:
    return conj(leq_atoms(x, y), neq(x, y))


# -- conditionals -----------------------------------------------------------------

def ite(c: Formula | bool, x: Any, y: Any) -> Any:
    """Choose ``x`` or ``y`` by ``c``.

    The ambient context is consulted first; when it settles ``c`` the plain
    branch is returned, otherwise the two values are merged by :func:`cond`.
    """
    c = _as_formula(c)
    truth = implies_under(ambient(), c)
    if truth is Truth.YES:
        return x
    if truth is Truth.NO:
        return y
    return cond(c, x, y)


def iteV(c: Formula | bool, x: Any, y: Any) -> Variants:
    """Two-branch variant ``x : c | y : ¬c`` (no context resolution)."""
    c = _as_formula(c)
    return Variants([(x, c), (y, neg(c))])


def cond(c: Formula, x: Any, y: Any) -> Any:
    """Type-directed merge of ``x`` and ``y`` under an undetermined ``c``."""
    if isinstance(x, Variants) or isinstance(y, Variants):
        if isinstance(x, Atom) and isinstance(y, Atom):
            return Atom(_guarded(c, x) + _guarded(neg(c), y))
        xs = x if isinstance(x, Variants) else Variants.of(x)
        ys = y if isinstance(y, Variants) else Variants.of(y)
        return Variants(_guarded(c, xs) + _guarded(neg(c), ys))
    if callable(x) and callable(y):
        return lambda *args: ite(c, x(*args), y(*args))
    return _cond(x, c, y)


def _guarded(c: Formula, v: Variants) -> list[tuple[Any, Formula]]:
    return [(value, conj(guard, c)) for value, guard in v.branches]


@singledispatch
def _cond(x: Any, c: Formula, y: Any) -> Any:
    if isinstance(x, (int, str)) or x is None:
        return iteV(c, x, y)
    raise ConditionalError(f"cannot merge values of type {type(x).__name__}")


@_cond.register
def _(x: Formula, c, y) -> Formula:
    y = _as_formula(y)
    return disj(conj(c, x), conj(neg(c), y))


@_cond.register
def _(x: tuple, c, y) -> tuple:
    if not isinstance(y, tuple) or len(x) != len(y):
        raise ConditionalError("cannot merge tuples of different lengths")
    return tuple(cond(c, a, b) for a, b in zip(x, y))


@_cond.register
def _(x: list, c, y) -> list:
    if not isinstance(y, list) or len(x) != len(y):
        raise ConditionalError("cannot merge lists of different lengths")
    return [cond(c, a, b) for a, b in zip(x, y)]


@_cond.register
def _(x: Maybe, c, y) -> Maybe:
    if not isinstance(y, Maybe):
        raise ConditionalError("cannot merge Maybe with another type")
    if y.guard == FALSE:
        return Maybe(x.value, conj(c, x.guard))
    if x.guard == FALSE:
        return Maybe(y.value, conj(neg(c), y.guard))
    return Maybe(cond(c, x.value, y.value),
                 disj(conj(c, x.guard), conj(neg(c), y.guard)))


# -- contexts ---------------------------------------------------------------------

def simplify_under(ctx: Formula, phi: Formula) -> Formula:
    """``phi`` simplified on the assumption that ``ctx`` holds.

    The result is ``⊤``/``⊥`` when ``ctx`` settles ``phi``; otherwise, for a
    quantifier-free ``phi``, every relation settled by ``ctx`` is replaced by
    its truth value.  The result agrees with ``phi`` wherever ``ctx`` holds.
    """
    truth = implies_under(ctx, phi)
    if truth is Truth.YES:
        return TRUE
    if truth is Truth.NO:
        return FALSE
    if ctx == TRUE or _has_quantifier(phi):
        return phi

    def settle(r: Formula) -> Formula:
        if not r.free <= ctx.free:
            return r
        t = implies_under(ctx, r)
        return TRUE if t is Truth.YES else FALSE if t is Truth.NO else r

    return map_literals(phi, settle)


def _has_quantifier(phi: Formula) -> bool:
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Exists, ForAll)):
            return True
        if isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
    return False


def when(ctx: Formula | bool, x: Any) -> Any:
    """Specialise ``x`` to the situations where ``ctx`` holds: guards and
    formulas settled by ``ctx`` become ``⊤``/``⊥`` and dead branches vanish."""
    return _when(x, _as_formula(ctx))


@singledispatch
def _when(x: Any, ctx: Formula) -> Any:
    if callable(x):
        return lambda *args: when(ctx, x(*args))
    return x


@_when.register
def _(x: Formula, ctx) -> Formula:
    return simplify_under(ctx, x)


@_when.register
def _(x: Variants, ctx) -> Variants:
    branches = []
    for value, guard in x.branches:
        g = simplify_under(ctx, guard)
        if g == FALSE:
            continue
        if not isinstance(value, AtomVariable):
            value = _when(value, conj(ctx, guard))
        branches.append((value, g))
    if not branches:
        return x
    return type(x)(branches)


@_when.register
def _(x: tuple, ctx) -> tuple:
    return tuple(_when(i, ctx) for i in x)


@_when.register
def _(x: list, ctx) -> list:
    return [_when(i, ctx) for i in x]


@_when.register
def _(x: Maybe, ctx) -> Maybe:
    g = simplify_under(ctx, x.guard)
    if g == FALSE:
        return nothing()
    return Maybe(_when(x.value, conj(ctx, x.guard)), g)


# -- printing ---------------------------------------------------------------------

@singledispatch
def show(x: Any, names: Mapping[AtomVariable, str] | None = None) -> str:
    """Render a value; ``names`` renames particular variables for display."""
    if isinstance(x, bool):
        return "⊤" if x else "⊥"
    return str(x)


@show.register
def _(x: AtomVariable, names=None) -> str:
    return (names or {}).get(x, x.name)


@show.register
def _(x: Formula, names=None) -> str:
    return pretty(x, names)


@show.register
def _(x: Variants, names=None) -> str:
    if x.is_single():
        return show(x.branches[0][0], names)
    return " | ".join(f"{show(v, names)} : {pretty(g, names)}" for v, g in x.branches)


@show.register
def _(x: tuple, names=None) -> str:
    inner = ",".join(show(i, names) for i in x)
    return f"({inner},)" if len(x) == 1 else f"({inner})"


@show.register
def _(x: list, names=None) -> str:
    return "[" + ",".join(show(i, names) for i in x) + "]"


@show.register
def _(x: Maybe, names=None) -> str:
    if x.guard == FALSE:
        return "nothing"
    return f"just {show(x.value, names)} : {pretty(x.guard, names)}"
