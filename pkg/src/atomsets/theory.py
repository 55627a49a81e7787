"""Deciding formulas over equality atoms (ℕ, =) and ordered atoms (ℚ, ≤).

Two backends are available.  The internal one eliminates quantifiers by
virtual substitution of test points and reads off the truth value of the
resulting closed formula.  The SMT-LIB one still eliminates quantifiers
internally (solvers handle quantified pure-order formulas poorly) and then asks
an external solver executable for satisfiability, encoding equality atoms in
``LIA`` and ordered atoms in ``LRA``.
"""

from __future__ import annotations

import enum
import logging
import os
import subprocess
import tempfile
import threading
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import SignatureError, SolverError
from .formula import (
    EQ, LEQ, FALSE, TRUE, And, AtomVariable, Bottom, Exists, ForAll, Formula, Not,
    Or, Rel, Top, closure_key, conj, disj, equals,
    leq, map_literals, neg, substitute,
)

log = logging.getLogger(__name__)

__all__ = [
    "AtomTheory", "Verdict", "Truth", "SatResult", "Backend", "InternalBackend",
    "SmtLibBackend", "INTERNAL", "Config", "current_config", "current_theory",
    "current_backend", "configure", "using", "eliminate_quantifiers", "decide",
    "satisfiable", "implies_under", "smt_check_sat", "smtlib_script",
    "clear_caches",
]


class AtomTheory(enum.Enum):
    EQUALITY = "equality"
    ORDERED = "ordered"

    @property
    def logic(self) -> str:
        return "LIA" if self is AtomTheory.EQUALITY else "LRA"

    @property
    def sort(self) -> str:
        return "Int" if self is AtomTheory.EQUALITY else "Real"

    @property
    def relations(self) -> tuple[str, ...]:
        return (EQ,) if self is AtomTheory.EQUALITY else (EQ, LEQ)


class Verdict(enum.Enum):
    VALID = "valid"
    CONTRADICTORY = "contradictory"
    CONTINGENT = "contingent"


class Truth(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDETERMINED = "undetermined"


class SatResult(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"


class Backend:
    cache_id: str = ""


@dataclass(frozen=True)
class InternalBackend(Backend):
    cache_id: str = "internal"


@dataclass(frozen=True)
class SmtLibBackend(Backend):
    """An SMT-LIB v2 solver run as one subprocess per query.

    The script is written to a temporary file whose path is appended to
    ``args``; every mainstream solver (z3, cvc5, yices-smt2) accepts that.
    """

    executable: str
    args: tuple[str, ...] = ()
    timeout: float = 60.0

    @property
    def cache_id(self) -> str:
        return f"smtlib:{self.executable}"

    def check_sat(self, phi: Formula, theory: AtomTheory) -> SatResult:
        return smt_check_sat(phi, theory, self.executable, args=self.args, timeout=self.timeout)


INTERNAL = InternalBackend()


@dataclass(frozen=True)
class Config:
    theory: AtomTheory = AtomTheory.EQUALITY
    backend: Backend = INTERNAL


_default = [Config()]
_override: ContextVar[Config | None] = ContextVar("atomsets_config", default=None)


def current_config() -> Config:
    return _override.get() or _default[0]


def current_theory() -> AtomTheory:
    return current_config().theory


def current_backend() -> Backend:
    return current_config().backend


def _as_theory(theory: AtomTheory | str | None) -> AtomTheory | None:
    if theory is None or isinstance(theory, AtomTheory):
        return theory
    return AtomTheory(theory)


def configure(theory: AtomTheory | str | None = None, backend: Backend | None = None) -> None:
    """Change the process-wide default theory and/or backend."""
    cfg = _default[0]
    _default[0] = Config(_as_theory(theory) or cfg.theory, backend or cfg.backend)


@contextmanager
def using(theory: AtomTheory | str | None = None, backend: Backend | None = None) -> Iterator[Config]:
    """Temporarily select a theory and/or backend for the current context."""
    cfg = current_config()
    new = Config(_as_theory(theory) or cfg.theory, backend or cfg.backend)
    token = _override.set(new)
    try:
        yield new
    finally:
        _override.reset(token)


# -- quantifier elimination -----------------------------------------------------

def _check_signature(phi: Formula, theory: AtomTheory) -> None:
    if theory is AtomTheory.ORDERED:
        return
    stack = [phi]
    while stack:
        f = stack.pop()
        match f:
            case Rel(rel, _, _) if rel == LEQ:
                raise SignatureError("≤ occurs in a formula over equality atoms")
            case Not(arg):
                stack.append(arg)
            case And(args) | Or(args):
                stack.extend(args)
            case Exists(_, body) | ForAll(_, body):
                stack.append(body)


def eliminate_quantifiers(phi: Formula, theory: AtomTheory | str | None = None) -> Formula:
    """Return a quantifier-free formula equivalent to ``phi`` over ``theory``
    whose free variables are among those of ``phi``."""
    theory = _as_theory(theory) or current_theory()
    _check_signature(phi, theory)
    return _qe(phi, theory)


@lru_cache(maxsize=65536)
def _qe(f: Formula, theory: AtomTheory) -> Formula:
    match f:
        case Exists(var, body):
            return _elim(var, _qe(body, theory), theory)
        case ForAll(var, body):
            return neg(_elim(var, neg(_qe(body, theory)), theory))
        case Not(arg):
            return neg(_qe(arg, theory))
        case And(args):
            return conj(_qe(a, theory) for a in args)
        case Or(args):
            return disj(_qe(a, theory) for a in args)
        case Rel(rel, a, b):
            return equals(a, b) if rel == EQ else _leq(a, b)
    return f


@lru_cache(maxsize=65536)
def nnf(f: Formula) -> Formula:
    """Negation normal form of a quantifier-free formula."""
    match f:
        case Not(And(args)):
            return disj(nnf(neg(a)) for a in args)
        case Not(Or(args)):
            return conj(nnf(neg(a)) for a in args)
        case And(args):
            return conj(nnf(a) for a in args)
        case Or(args):
            return disj(nnf(a) for a in args)
    return f


def _leq(a: AtomVariable, b: AtomVariable) -> Formula:
    return leq(a, b, check=False)


def _lt(a: AtomVariable, b: AtomVariable) -> Formula:
    return conj(_leq(a, b), neg(equals(a, b)))


def _literals(f: Formula, positive: bool = True) -> Iterator[tuple[Rel, bool]]:
    match f:
        case Rel():
            yield f, positive
        case Not(arg):
            yield from _literals(arg, not positive)
        case And(args) | Or(args):
            for a in args:
                yield from _literals(a, positive)


def _other(rel: Rel, v: AtomVariable) -> AtomVariable:
    return rel.rhs if rel.lhs == v else rel.lhs


@lru_cache(maxsize=65536)
def _elim(v: AtomVariable, body: Formula, theory: AtomTheory) -> Formula:
    """Eliminate ``∃v`` from a quantifier-free ``body``."""
    if v not in body.free:
        return body
    body = nnf(body)
    match body:
        case Or(args):
            return disj(_elim(v, a, theory) for a in args)
        case And(args):
            inner = [a for a in args if v in a.free]
            outer = [a for a in args if v not in a.free]
            if outer:
                return conj(*outer, _elim(v, conj(inner), theory))
            for a in inner:
                if isinstance(a, Rel) and a.rel == EQ:
                    # ∃v. v = t ∧ φ  ≡  φ[t/v]
                    return substitute(conj(inner), {v: _other(a, v)})
            for a in inner:
                if isinstance(a, Or) and any(_pins(d, v) for d in a.args):
                    # split on a disjunction that fixes v in some branch
                    rest = [b for b in inner if b is not a]
                    return disj(_elim(v, conj(*rest, d), theory) for d in a.args)
        case Rel(rel, _, _) if rel == EQ:
            return TRUE
    if theory is AtomTheory.EQUALITY:
        return _elim_equality(v, body)
    return _elim_dense(v, body)


def _pins(f: Formula, v: AtomVariable) -> bool:
    """Whether ``f`` is, or conjoins, a positive equation on ``v``."""
    parts = f.args if isinstance(f, And) else (f,)
    return any(isinstance(p, Rel) and p.rel == EQ and v in (p.lhs, p.rhs) for p in parts)


def _elim_equality(v: AtomVariable, body: Formula) -> Formula:
    # v either equals a term it is positively compared with, or differs from all
    points = sorted({_other(r, v) for r, pos in _literals(body) if pos and v in (r.lhs, r.rhs)})
    fresh = map_literals(body, lambda r: FALSE if v in (r.lhs, r.rhs) else r)
    return disj([substitute(body, {v: t}) for t in points] + [fresh])


def _elim_dense(v: AtomVariable, body: Formula) -> Formula:
    exact: set[AtomVariable] = set()
    above: set[AtomVariable] = set()
    for r, pos in _literals(body):
        if v not in (r.lhs, r.rhs):
            continue
        t = _other(r, v)
        if r.rel == EQ:
            (exact if pos else above).add(t)
        elif r.rhs == v:            # t ≤ v: weak lower bound
            if pos:
                exact.add(t)
        elif not pos:               # ¬(v ≤ t): strict lower bound
            above.add(t)

    def minus_infinity(r: Rel) -> Formula:
        if v not in (r.lhs, r.rhs):
            return r
        if r.rel == EQ:
            return FALSE
        return TRUE if r.lhs == v else FALSE

    def just_above(t: AtomVariable):
        def sub(r: Rel) -> Formula:
            if v not in (r.lhs, r.rhs):
                return r
            s = _other(r, v)
            if r.rel == EQ:
                return FALSE
            if r.lhs == v:          # t+ε ≤ s
                return _lt(t, s)
            return _leq(s, t)       # s ≤ t+ε
        return sub

    cases = [map_literals(body, minus_infinity)]
    cases += [substitute(body, {v: t}) for t in sorted(exact)]
    cases += [map_literals(body, just_above(t)) for t in sorted(above)]
    return disj(cases)


# -- satisfiability of quantifier-free formulas ------------------------------------

Literal = tuple[Rel, bool]


def _consistent(lits: Iterable[Literal], theory: AtomTheory) -> bool:
    """Whether a conjunction of literals has a model."""
    lits = list(lits)
    if theory is AtomTheory.EQUALITY:
        parent: dict[AtomVariable, AtomVariable] = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x

        for r, pos in lits:
            if pos:
                parent[find(r.lhs)] = find(r.rhs)
        return all(find(r.lhs) != find(r.rhs) for r, pos in lits if not pos)

    # dense order: x ≤ y edges, strict y < x edges from ¬(x ≤ y)
    succ: dict[AtomVariable, set[AtomVariable]] = {}
    strict: list[tuple[AtomVariable, AtomVariable]] = []
    apart: list[tuple[AtomVariable, AtomVariable]] = []
    for r, pos in lits:
        a, b = r.lhs, r.rhs
        if r.rel == EQ and pos:
            succ.setdefault(a, set()).add(b)
            succ.setdefault(b, set()).add(a)
        elif r.rel == EQ:
            apart.append((a, b))
        elif pos:
            succ.setdefault(a, set()).add(b)
        else:
            succ.setdefault(b, set()).add(a)
            strict.append((b, a))

    reach: dict[AtomVariable, set[AtomVariable]] = {}

    def reachable(x):
        if x not in reach:
            seen, todo = {x}, [x]
            while todo:
                for y in succ.get(todo.pop(), ()):
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            reach[x] = seen
        return reach[x]

    if any(u in reachable(v) for u, v in strict):
        return False
    return not any(b in reachable(a) and a in reachable(b) for a, b in apart)


def _status(lits: list[Literal], lit: Literal, theory: AtomTheory) -> bool | None:
    """``True`` if ``lits`` entail ``lit``, ``False`` if they refute it."""
    r, pos = lit
    if not _consistent(lits + [(r, not pos)], theory):
        return True
    if not _consistent(lits + [lit], theory):
        return False
    return None


def _atoms(f: Formula, counts: dict[Rel, int]) -> None:
    match f:
        case Rel():
            counts[f] = counts.get(f, 0) + 1
        case Not(arg):
            _atoms(arg, counts)
        case And(args) | Or(args):
            for a in args:
                _atoms(a, counts)


def _units(f: Formula) -> list[Literal]:
    parts = f.args if isinstance(f, And) else (f,)
    out = []
    for p in parts:
        if isinstance(p, Rel):
            out.append((p, True))
        elif isinstance(p, Not) and isinstance(p.arg, Rel):
            out.append((p.arg, False))
    return out


def _dpll(f: Formula, lits: list[Literal], theory: AtomTheory) -> bool:
    while True:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        units = _units(f)
        if units:
            lits = lits + units
            if not _consistent(lits, theory):
                return False
        counts: dict[Rel, int] = {}
        _atoms(f, counts)
        settled = {}
        for r in counts:
            status = _status(lits, (r, True), theory)
            if status is not None:
                settled[r] = TRUE if status else FALSE
        if not settled:
            break
        f = map_literals(f, lambda r: settled.get(r, r))
    pivot = max(counts, key=lambda r: (counts[r], r.key))
    for value in (True, False):
        branch = lits + [(pivot, value)]
        if _consistent(branch, theory) and \
                _dpll(map_literals(f, lambda r: (TRUE if value else FALSE) if r == pivot else r),
                      branch, theory):
            return True
    return False


def _qf_satisfiable(f: Formula, theory: AtomTheory) -> bool:
    return _dpll(f, [], theory)


# -- deciding -------------------------------------------------------------------

_cache_lock = threading.Lock()
_sat_cache: dict[tuple, bool] = {}


def clear_caches() -> None:
    with _cache_lock:
        _sat_cache.clear()
    _qe.cache_clear()
    _elim.cache_clear()
    nnf.cache_clear()


def _resolve(theory, backend) -> tuple[AtomTheory, Backend]:
    cfg = current_config()
    return _as_theory(theory) or cfg.theory, backend or cfg.backend


def satisfiable(phi: Formula, theory: AtomTheory | str | None = None,
                backend: Backend | None = None) -> bool:
    """Whether some valuation of the free variables satisfies ``phi``."""
    theory, backend = _resolve(theory, backend)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    key = (theory, backend.cache_id, closure_key(phi))
    with _cache_lock:
        hit = _sat_cache.get(key)
    if hit is not None:
        return hit
    _check_signature(phi, theory)
    qf = _qe(phi, theory)
    if isinstance(backend, SmtLibBackend) and qf.free:
        result = backend.check_sat(qf, theory) is SatResult.SAT
    else:
        result = _qf_satisfiable(qf, theory)
    with _cache_lock:
        _sat_cache[key] = result
    return result


def decide(phi: Formula, theory: AtomTheory | str | None = None,
           backend: Backend | None = None) -> Verdict:
    """Classify ``phi`` as valid, contradictory or contingent (free variables
    read universally)."""
    if not satisfiable(neg(phi), theory, backend):
        return Verdict.VALID
    if not satisfiable(phi, theory, backend):
        return Verdict.CONTRADICTORY
    return Verdict.CONTINGENT


def implies_under(context: Formula, phi: Formula, theory: AtomTheory | str | None = None,
                  backend: Backend | None = None) -> Truth:
    """Whether ``context`` settles ``phi`` one way or the other."""
    if isinstance(phi, Top):
        return Truth.YES
    if not satisfiable(conj(context, neg(phi)), theory, backend):
        return Truth.YES
    if not satisfiable(conj(context, phi), theory, backend):
        return Truth.NO
    return Truth.UNDETERMINED


# -- SMT-LIB --------------------------------------------------------------------

_SMT_SIMPLE = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789~!@$%^&*_-+=<>.?/")


def _smt_symbol(v: AtomVariable) -> str:
    name = v.name
    if name and not name[0].isdigit() and set(name) <= _SMT_SIMPLE:
        return name
    return f"|{name}|"


def _smt_term(f: Formula) -> str:
    match f:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Rel(rel, lhs, rhs):
            op = "=" if rel == EQ else "<="
            return f"({op} {_smt_symbol(lhs)} {_smt_symbol(rhs)})"
        case Not(arg):
            return f"(not {_smt_term(arg)})"
        case And(args):
            return "(and " + " ".join(_smt_term(a) for a in args) + ")"
        case Or(args):
            return "(or " + " ".join(_smt_term(a) for a in args) + ")"
    raise ValueError("SMT-LIB encoding needs a quantifier-free formula")


def smtlib_script(phi: Formula, theory: AtomTheory | str) -> str:
    """The satisfiability query for a quantifier-free ``phi``."""
    theory = _as_theory(theory)
    _check_signature(phi, theory)
    lines = [f"(set-logic {theory.logic})"]
    for v in sorted(phi.free):
        lines.append(f"(declare-const {_smt_symbol(v)} {theory.sort})")
    lines.append(f"(assert {_smt_term(phi)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def smt_check_sat(phi: Formula, theory: AtomTheory | str, executable: str,
                  args: tuple[str, ...] = (), timeout: float = 60.0) -> SatResult:
    """Run one solver subprocess on ``phi`` and read its single answer."""
    script = smtlib_script(phi, theory)
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(script)
        path = fh.name
    try:
        proc = subprocess.run([executable, *args, path], capture_output=True,
                              text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise SolverError(f"could not run {executable}: {exc}") from exc
    finally:
        os.unlink(path)
    tokens = proc.stdout.split()
    if proc.returncode != 0 or len(tokens) != 1 or tokens[0] not in ("sat", "unsat"):
        detail = (proc.stdout + proc.stderr).strip()
        raise SolverError(f"{executable} exited with {proc.returncode}: {detail or 'no output'}")
    log.debug("%s -> %s", script.replace("\n", " "), tokens[0])
    return SatResult(tokens[0])
