"""First-order formulas over atom variables.

The signature is relational only: ``=`` (both atom theories) and ``≤`` (ordered
atoms).  Formulas are immutable and are always built through the smart
constructors below (:func:`equals`, :func:`leq`, :func:`conj`, :func:`disj`,
:func:`neg`, :func:`exists`, :func:`forall`), which keep them in a local normal
form: ``∧``/``∨`` operands are flattened, deduplicated and sorted, identities
with ``⊤``/``⊥`` are applied and reflexive relations collapse to ``⊤``.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping

__all__ = [
    "AtomVariable", "Formula", "Top", "Bottom", "Rel", "Not", "And", "Or",
    "Exists", "ForAll", "TRUE", "FALSE", "EQ", "LEQ",
    "fresh_variable", "reset_names", "variable",
    "equals", "leq", "lt", "neg", "conj", "disj", "implies", "iff",
    "exists", "forall", "exists_all", "forall_all",
    "free_variables", "ordered_free_variables", "substitute", "formula_key",
    "var_key", "closure_key", "alpha_key", "alpha_equivalent", "evaluate",
    "map_literals", "rename_bound", "simplify",
    "pretty", "parse_formula", "FormulaSyntaxError",
]

EQ = "="
LEQ = "≤"

_FRESH_PATTERN = re.compile(r"a\d+\Z")
_NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True, order=True)
class AtomVariable:
    """An atom variable.  Compare and hash by name."""

    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"AtomVariable({self.name!r})"


class _NameSupply:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counter = itertools.count()

    def next(self) -> AtomVariable:
        with self._lock:
            return AtomVariable(f"a{next(self._counter)}")

    def reset(self) -> None:
        with self._lock:
            self._counter = itertools.count()


_supply = _NameSupply()


def fresh_variable() -> AtomVariable:
    """Return an atom variable never returned before in this process (since the
    last :func:`reset_names`)."""
    return _supply.next()


def reset_names() -> None:
    """Restart the fresh-name counter.

    Only safe when no values built before the reset are used afterwards; the
    command line driver calls it at the start of every run so that output is
    reproducible.
    """
    _supply.reset()


def variable(name: str) -> AtomVariable:
    """A named atom variable chosen by the caller.

    Names of the form ``a<digits>`` are reserved for the fresh-name supply.
    """
    if not _NAME_PATTERN.match(name):
        raise ValueError(f"invalid atom variable name {name!r}")
    if _FRESH_PATTERN.match(name):
        raise ValueError(f"{name!r} is reserved for fresh variables")
    return AtomVariable(name)


class Formula:
    """Base class of formula nodes."""

    __slots__ = ()

    @cached_property
    def free(self) -> frozenset[AtomVariable]:
        return frozenset(_free(self))

    @cached_property
    def key(self) -> tuple:
        """Structural sort key; bound variables are keyed by binder distance,
        so α-equivalent formulas share a key."""
        return _formula_key(self, {}, 0)

    def __and__(self, other: Formula) -> Formula:
        return conj(self, other)

    def __or__(self, other: Formula) -> Formula:
        return disj(self, other)

    def __invert__(self) -> Formula:
        return neg(self)

    def __str__(self) -> str:
        return pretty(self)

    def __lt__(self, other: Formula) -> bool:
        return self.key < other.key


@dataclass(frozen=True, eq=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "TRUE"


@dataclass(frozen=True, eq=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "FALSE"


@dataclass(frozen=True, eq=True)
class Rel(Formula):
    rel: str
    lhs: AtomVariable
    rhs: AtomVariable


@dataclass(frozen=True, eq=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, eq=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, eq=True)
class Exists(Formula):
    var: AtomVariable
    body: Formula


@dataclass(frozen=True, eq=True)
class ForAll(Formula):
    var: AtomVariable
    body: Formula


def _cached_hash(self) -> int:
    # trees are hashed often (solver caches); remember the structural hash per node
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self.__dataclass_fields__))
        self.__dict__["_hash"] = h
    return h


for _cls in (Top, Bottom, Rel, Not, And, Or, Exists, ForAll):
    _cls.__hash__ = _cached_hash

TRUE: Formula = Top()
FALSE: Formula = Bottom()


# -- keys ---------------------------------------------------------------------

def var_key(v: AtomVariable, env: Mapping[AtomVariable, int], depth: int) -> tuple:
    level = env.get(v)
    if level is None:
        return ("f", v.name)
    return ("b", depth - level)


def formula_key(f: Formula, env: dict, depth: int) -> tuple:
    if not env or not (f.free & env.keys()):
        # closed relative to env: the key does not depend on it, so use the cached one
        return f.key
    return _formula_key(f, env, depth)


def _formula_key(f: Formula, env: dict, depth: int) -> tuple:
    match f:
        case Top():
            return ("0T",)
        case Bottom():
            return ("0F",)
        case Rel(rel, lhs, rhs):
            a, b = var_key(lhs, env, depth), var_key(rhs, env, depth)
            if rel == EQ and b < a:
                a, b = b, a
            return ("1R", rel, a, b)
        case Not(arg):
            return ("2N", formula_key(arg, env, depth))
        case And(args):
            return ("3A", tuple(sorted(formula_key(a, env, depth) for a in args)))
        case Or(args):
            return ("4O", tuple(sorted(formula_key(a, env, depth) for a in args)))
        case Exists(var, body) | ForAll(var, body):
            tag = "5E" if isinstance(f, Exists) else "6U"
            inner = dict(env)
            inner[var] = depth + 1
            return (tag, formula_key(body, inner, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


def alpha_key(f: Formula) -> tuple:
    return f.key


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return f.key == g.key


def closure_key(f: Formula) -> tuple:
    """Key that also forgets the names of free variables (in order of first
    occurrence).  Two formulas with equal closure keys have equivalent
    universal (and existential) closures."""
    order = list(_ordered_free(f))
    env = {v: i + 1 for i, v in enumerate(order)}
    return formula_key(f, env, len(order)) if env else f.key


# -- free variables -------------------------------------------------------------

def _free(f: Formula) -> set[AtomVariable]:
    match f:
        case Rel(_, lhs, rhs):
            return {lhs, rhs}
        case Not(arg):
            return set(arg.free)
        case And(args) | Or(args):
            out: set[AtomVariable] = set()
            for a in args:
                out |= a.free
            return out
        case Exists(var, body) | ForAll(var, body):
            return set(body.free - {var})
    return set()


def _ordered_free(f: Formula, bound: frozenset = frozenset()) -> Iterator[AtomVariable]:
    seen: set[AtomVariable] = set()
    for v in _walk_vars(f, bound):
        if v not in seen:
            seen.add(v)
            yield v


def _walk_vars(f: Formula, bound: frozenset) -> Iterator[AtomVariable]:
    match f:
        case Rel(_, lhs, rhs):
            if lhs not in bound:
                yield lhs
            if rhs not in bound:
                yield rhs
        case Not(arg):
            yield from _walk_vars(arg, bound)
        case And(args) | Or(args):
            for a in args:
                yield from _walk_vars(a, bound)
        case Exists(var, body) | ForAll(var, body):
            yield from _walk_vars(body, bound | {var})


def free_variables(f: Formula) -> frozenset[AtomVariable]:
    return f.free


def ordered_free_variables(f: Formula) -> list[AtomVariable]:
    """Free variables in order of first occurrence."""
    return list(_ordered_free(f))


# -- smart constructors ---------------------------------------------------------

def _check_signature(rel: str) -> None:
    from .theory import current_theory, AtomTheory

    if rel == LEQ and current_theory() is not AtomTheory.ORDERED:
        from .errors import SignatureError
        raise SignatureError("≤ is only available over ordered atoms")


def equals(a: AtomVariable, b: AtomVariable) -> Formula:
    if a == b:
        return TRUE
    if b < a:
        a, b = b, a
    return Rel(EQ, a, b)


def leq(a: AtomVariable, b: AtomVariable, *, check: bool = True) -> Formula:
    if check:
        _check_signature(LEQ)
    if a == b:
        return TRUE
    return Rel(LEQ, a, b)


def lt(a: AtomVariable, b: AtomVariable) -> Formula:
    """Strict order, encoded as ``a ≤ b ∧ ¬(a = b)``."""
    return conj(leq(a, b), neg(equals(a, b)))


def neg(f: Formula) -> Formula:
    match f:
        case Top():
            return FALSE
        case Bottom():
            return TRUE
        case Not(arg):
            return arg
    return Not(f)


def _complement_key(f: Formula) -> tuple:
    return f.arg.key if isinstance(f, Not) else ("2N", f.key)


def _assoc(kind: type, unit: Formula, zero: Formula, fs: Iterable[Formula]) -> Formula:
    flat: dict[tuple, Formula] = {}
    for f in fs:
        if f == unit:
            continue
        if f == zero:
            return zero
        parts = f.args if isinstance(f, kind) else (f,)
        for p in parts:
            flat.setdefault(p.key, p)
    if not flat:
        return unit
    for k, f in flat.items():
        if _complement_key(f) in flat:
            return zero
    dual = Or if kind is And else And
    if any(isinstance(f, dual) for f in flat.values()):
        # absorption: p ∧ (p ∨ q) = p, p ∨ (p ∧ q) = p
        flat = {k: f for k, f in flat.items()
                if not (isinstance(f, dual) and any(a.key in flat for a in f.args))}
    if len(flat) == 1:
        return next(iter(flat.values()))
    return kind(tuple(flat[k] for k in sorted(flat)))


def conj(*fs: Formula | Iterable[Formula]) -> Formula:
    return _assoc(And, TRUE, FALSE, _spread(fs))


def disj(*fs: Formula | Iterable[Formula]) -> Formula:
    return _assoc(Or, FALSE, TRUE, _spread(fs))


def _spread(fs) -> Iterator[Formula]:
    for f in fs:
        if isinstance(f, Formula):
            yield f
        else:
            yield from f


def implies(f: Formula, g: Formula) -> Formula:
    return disj(neg(f), g)


def iff(f: Formula, g: Formula) -> Formula:
    if f.key == g.key:
        return TRUE
    if f == TRUE:
        return g
    if g == TRUE:
        return f
    if f == FALSE:
        return neg(g)
    if g == FALSE:
        return neg(f)
    return disj(conj(f, g), conj(neg(f), neg(g)))


def exists(v: AtomVariable, body: Formula) -> Formula:
    if v not in body.free:
        return body
    return Exists(v, body)


def forall(v: AtomVariable, body: Formula) -> Formula:
    if v not in body.free:
        return body
    return ForAll(v, body)


def exists_all(vs: Iterable[AtomVariable], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = exists(v, body)
    return body


def forall_all(vs: Iterable[AtomVariable], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = forall(v, body)
    return body


# -- substitution ---------------------------------------------------------------

def substitute(f: Formula, mapping: Mapping[AtomVariable, AtomVariable]) -> Formula:
    """Capture-avoiding simultaneous substitution of atom variables."""
    mapping = {k: v for k, v in mapping.items() if k != v and k in f.free}
    if not mapping:
        return f
    return _subst(f, mapping)


def _subst(f: Formula, m: Mapping[AtomVariable, AtomVariable]) -> Formula:
    match f:
        case Rel(rel, lhs, rhs):
            a, b = m.get(lhs, lhs), m.get(rhs, rhs)
            return equals(a, b) if rel == EQ else leq(a, b, check=False)
        case Not(arg):
            return neg(_subst(arg, m))
        case And(args):
            return conj(_subst(a, m) for a in args)
        case Or(args):
            return disj(_subst(a, m) for a in args)
        case Exists(var, body) | ForAll(var, body):
            inner = {k: v for k, v in m.items() if k != var and k in body.free}
            if not inner:
                return f
            if var in inner.values():
                fresh = fresh_variable()
                body = _subst(body, {var: fresh})
                var = fresh
            make = exists if isinstance(f, Exists) else forall
            return make(var, _subst(body, inner))
    return f


def rename_bound(f: Formula) -> Formula:
    """Rename every bound variable to a fresh one."""
    match f:
        case Not(arg):
            return neg(rename_bound(arg))
        case And(args):
            return conj(rename_bound(a) for a in args)
        case Or(args):
            return disj(rename_bound(a) for a in args)
        case Exists(var, body) | ForAll(var, body):
            fresh = fresh_variable()
            make = exists if isinstance(f, Exists) else forall
            return make(fresh, rename_bound(_subst(body, {var: fresh})))
    return f


# -- simplification -------------------------------------------------------------

def simplify(f: Formula) -> Formula:
    """Rebuild ``f`` bottom-up through the smart constructors.

    Purely syntactic: sound in every atom theory, never calls a solver.
    """
    match f:
        case Rel(rel, lhs, rhs):
            return equals(lhs, rhs) if rel == EQ else leq(lhs, rhs, check=False)
        case Not(arg):
            return neg(simplify(arg))
        case And(args):
            return conj(simplify(a) for a in args)
        case Or(args):
            return disj(simplify(a) for a in args)
        case Exists(var, body):
            return exists(var, simplify(body))
        case ForAll(var, body):
            return forall(var, simplify(body))
    return f


def map_literals(f: Formula, fn: Callable[[Rel], Formula]) -> Formula:
    """Rebuild a quantifier-free formula with every relation replaced by
    ``fn(relation)``."""
    match f:
        case Rel():
            return fn(f)
        case Not(arg):
            return neg(map_literals(arg, fn))
        case And(args):
            return conj(map_literals(a, fn) for a in args)
        case Or(args):
            return disj(map_literals(a, fn) for a in args)
        case Exists() | ForAll():
            raise ValueError("map_literals expects a quantifier-free formula")
    return f


def evaluate(f: Formula, valuation: Mapping[AtomVariable, object],
             domain: Callable[[Mapping[AtomVariable, object]], Iterable[object]] | None = None) -> bool:
    """Truth value of ``f`` under ``valuation`` (values compared with ``==`` and
    ``<=``).  Quantifiers range over ``domain(valuation)``."""
    match f:
        case Top():
            return True
        case Bottom():
            return False
        case Rel(rel, lhs, rhs):
            a, b = valuation[lhs], valuation[rhs]
            return a == b if rel == EQ else a <= b
        case Not(arg):
            return not evaluate(arg, valuation, domain)
        case And(args):
            return all(evaluate(a, valuation, domain) for a in args)
        case Or(args):
            return any(evaluate(a, valuation, domain) for a in args)
        case Exists(var, body) | ForAll(var, body):
            if domain is None:
                raise ValueError("quantified formula needs a domain")
            test = any if isinstance(f, Exists) else all
            return test(evaluate(body, {**valuation, var: d}, domain)
                        for d in list(domain(valuation)))
    raise TypeError(f"not a formula: {f!r}")


# -- printing and parsing ---------------------------------------------------------

def pretty(f: Formula, names: Mapping[AtomVariable, str] | None = None) -> str:
    """Render ``f``; ``names`` overrides how particular variables are shown."""
    names = names or {}

    def show(v: AtomVariable) -> str:
        return names.get(v, v.name)

    def operand(g: Formula) -> str:
        s = go(g)
        return f"({s})" if isinstance(g, (And, Or, Exists, ForAll)) else s

    def go(g: Formula) -> str:
        match g:
            case Top():
                return "⊤"
            case Bottom():
                return "⊥"
            case Rel(rel, lhs, rhs):
                return f"{show(lhs)} {rel} {show(rhs)}"
            case Not(arg):
                return f"¬({go(arg)})"
            case And(args):
                return " ∧ ".join(operand(a) for a in args)
            case Or(args):
                return " ∨ ".join(operand(a) for a in args)
            case Exists(var, body) | ForAll(var, body):
                q = "∃" if isinstance(g, Exists) else "∀"
                return f"{q}{show(var)}. {go(body)}"
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


class FormulaSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<sym>⊤|⊥|¬|∧|∨|∃|∀|≤|≠|<=|!=|/\\|\\/|[()=<.~&|!])
    | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
    )""", re.VERBOSE)

_ALIASES = {
    "<=": "≤", "!=": "≠", "/\\": "∧", "&": "∧", "\\/": "∨", "|": "∨",
    "~": "¬", "!": "¬", "true": "⊤", "false": "⊥", "not": "¬", "and": "∧",
    "or": "∨", "exists": "∃", "forall": "∀",
}


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        tok = m.group("sym") or m.group("name")
        out.append(_ALIASES.get(tok, tok))
        pos = m.end()
    return out


def parse_formula(text: str, variables: Mapping[str, AtomVariable] | None = None) -> Formula:
    """Parse the notation produced by :func:`pretty`.

    Unknown names become atom variables of that name.  ASCII spellings
    (``true``, ``~``, ``&``, ``|``, ``<=``, ``!=``, ``exists x.``) are accepted.
    """
    toks = _tokenize(text)
    env = dict(variables or {})
    pos = 0

    def peek() -> str | None:
        return toks[pos] if pos < len(toks) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaSyntaxError(f"expected {expected or 'token'}, got {tok!r}")
        pos += 1
        return tok

    def var(name: str) -> AtomVariable:
        if not _NAME_PATTERN.match(name) or name in _ALIASES:
            raise FormulaSyntaxError(f"bad variable {name!r}")
        return env.get(name) or AtomVariable(name)

    def p_or() -> Formula:
        parts = [p_and()]
        while peek() == "∨":
            take()
            parts.append(p_and())
        return disj(parts) if len(parts) > 1 else parts[0]

    def p_and() -> Formula:
        parts = [p_unary()]
        while peek() == "∧":
            take()
            parts.append(p_unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def p_unary() -> Formula:
        tok = peek()
        if tok == "¬":
            take()
            return neg(p_unary())
        if tok in ("∃", "∀"):
            take()
            v = var(take())
            take(".")
            body = p_or()
            return exists(v, body) if tok == "∃" else forall(v, body)
        if tok == "(":
            take()
            inner = p_or()
            take(")")
            return inner
        if tok == "⊤":
            take()
            return TRUE
        if tok == "⊥":
            take()
            return FALSE
        a = var(take())
        op = take()
        b = var(take())
        if op == "=":
            return equals(a, b)
        if op == "≠":
            return neg(equals(a, b))
        if op == "≤":
            return leq(a, b)
        if op == "<":
            return lt(a, b)
        raise FormulaSyntaxError(f"unknown relation {op!r}")

    result = p_or()
    if pos != len(toks):
        raise FormulaSyntaxError(f"trailing input: {' '.join(toks[pos:])}")
    return result
