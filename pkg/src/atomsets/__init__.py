"""Computing with first-order definable sets over equality or ordered atoms."""

from .errors import (
    AtomSetsError, ConditionalError, SignatureError, SolverError, StepBoundExceeded,
)
from .formula import (
    FALSE, TRUE, AtomVariable, Formula, conj, disj, equals, exists, forall, fresh_variable,
    iff, implies, leq, lt, neg, parse_formula, pretty, reset_names, variable,
)
from .graph import (
    Graph, coloring, compose, distinct_pairs, has_cycle, has_equivariant_coloring,
    has_odd_length_cycle, is_coloring_of, overlap_graph, partitions, swap_graph,
    transitive_closure, transitive_closure_steps,
)
from .nominal import (
    Atom, Maybe, Variants, ambient, atom, cond, eq, fresh_atom, group_action, ite, iteV,
    leq_atoms, lt_atoms, maybe_if, neq, nothing, show, support, under, variant, when,
)
from .orbit import hull, least_support, orbit, set_orbit, set_orbits, supports
from .sets import (
    DefinableSet, SetEntry, atom_pairs, atom_tuples, atoms, compact, empty_set, eq_set,
    exists_in, filter_set, for_all, from_list, insert, intersection, is_empty, is_singleton,
    is_subset_of, map_set, member, pairs, pairs_with, pairs_with_filter, product,
    replicate_set, singleton, size, sum_set, union,
)
from .theory import (
    INTERNAL, AtomTheory, SmtLibBackend, Truth, Verdict, configure, decide,
    eliminate_quantifiers, implies_under, satisfiable, using,
)

__all__ = [
    "Atom", "AtomSetsError", "AtomTheory", "AtomVariable", "ConditionalError",
    "DefinableSet", "FALSE", "Formula", "Graph", "INTERNAL", "Maybe", "SetEntry",
    "SignatureError", "SmtLibBackend", "SolverError", "StepBoundExceeded", "TRUE",
    "Truth", "Variants", "Verdict", "ambient", "atom", "atom_pairs", "atom_tuples",
    "atoms", "coloring", "compact", "compose", "cond", "configure", "conj", "decide",
    "disj", "distinct_pairs", "eliminate_quantifiers", "empty_set", "eq", "eq_set",
    "equals", "exists", "exists_in", "filter_set", "for_all", "forall", "fresh_atom",
    "fresh_variable", "from_list", "group_action", "has_cycle",
    "has_equivariant_coloring", "has_odd_length_cycle", "hull", "iff", "implies",
    "implies_under", "insert", "intersection", "is_coloring_of", "is_empty",
    "is_singleton", "is_subset_of", "ite", "iteV", "least_support", "leq", "leq_atoms",
    "lt", "lt_atoms", "map_set", "maybe_if", "member", "neg", "neq", "nothing", "orbit",
    "overlap_graph", "pairs", "pairs_with", "pairs_with_filter", "parse_formula",
    "partitions", "pretty", "product", "replicate_set", "reset_names", "satisfiable",
    "set_orbit", "set_orbits", "show", "singleton", "size", "sum_set", "support",
    "supports", "swap_graph", "transitive_closure", "transitive_closure_steps", "under",
    "union", "using", "variable", "variant", "when",
]
