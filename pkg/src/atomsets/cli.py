"""Command-line runner for the bundled demos.

Exit codes: 0 success, 1 usage error, 2 solver failure, 3 step bound exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
from typing import Callable, Iterator

from .errors import SolverError, StepBoundExceeded
from .formula import Formula, reset_names
from .graph import (
    distinct_pairs, has_cycle, has_equivariant_coloring, has_odd_length_cycle, overlap_graph, swap_graph,
    transitive_closure_steps,
)
from .nominal import atom, neq, show, when
from .orbit import hull, set_orbits
from .sets import atom_pairs, from_list, singleton, size
from .theory import INTERNAL, AtomTheory, SmtLibBackend, Verdict, decide, using

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_STEPS = 0, 1, 2, 3


def render(phi: Formula) -> str:
    """``true``/``false`` for closed formulas, the formula itself otherwise."""
    if not phi.free:
        return "true" if decide(phi) is Verdict.VALID else "false"
    return show(phi)


def demo_atom_pairs(args) -> Iterator[str]:
    yield show(atom_pairs())


def demo_transitive_closure(args) -> Iterator[str]:
    closure, steps = transitive_closure_steps(distinct_pairs(), args.step_bound)
    yield show(closure)
    yield f"iterations: {steps}"


def demo_has_cycle(args) -> Iterator[str]:
    yield render(has_cycle(swap_graph()))


def demo_odd_cycle(args) -> Iterator[str]:
    yield render(has_odd_length_cycle(swap_graph()))


def demo_orbits(args) -> Iterator[str]:
    orbits = set_orbits(atom_pairs())
    for entry in orbits.entries:
        yield show(entry.element)
    yield f"orbits: {len(orbits.entries)}"


def demo_hull(args) -> Iterator[str]:
    a, b = atom("a"), atom("b")
    yield show(hull([], singleton(a)))
    yield show(when(neq(a, b), hull([b], singleton(a))))


def demo_equivariant_coloring(args) -> Iterator[str]:
    yield render(has_equivariant_coloring(swap_graph(), args.k if args.k is not None else 2))


def demo_satan_graph(args) -> Iterator[str]:
    yield render(has_equivariant_coloring(overlap_graph(), args.k if args.k is not None else 3))


def demo_size(args) -> Iterator[str]:
    a, b, c = atom("a"), atom("b"), atom("c")
    yield show(size(from_list([a, b, c]), args.step_bound))


DEMOS: dict[str, Callable[[argparse.Namespace], Iterator[str]]] = {
    "atom-pairs": demo_atom_pairs,
    "transitive-closure": demo_transitive_closure,
    "has-cycle": demo_has_cycle,
    "odd-cycle": demo_odd_cycle,
    "orbits": demo_orbits,
    "hull": demo_hull,
    "equivariant-coloring": demo_equivariant_coloring,
    "satan-graph": demo_satan_graph,
    "size-demo": demo_size,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="atomsets", description="Run demos over definable sets of atoms.")
    p.add_argument("--theory", choices=[t.value for t in AtomTheory], default="equality")
    p.add_argument("--backend", choices=["internal", "smtlib"], default="internal")
    p.add_argument("--solver-path", default=os.environ.get("NLAM_SOLVER"),
                   help="SMT-LIB solver executable (default: $NLAM_SOLVER)")
    p.add_argument("--demo", choices=sorted(DEMOS), required=True)
    p.add_argument("--k", type=_positive, help="number of colours for colouring demos")
    p.add_argument("--step-bound", type=_positive,
                   help="cap on size and closure iterations")
    p.add_argument("--verbose", "-v", action="count", default=0)
    return p


def _backend(args, parser):
    if args.backend == "internal":
        return INTERNAL
    path = args.solver_path
    resolved = shutil.which(path) if path else None
    if not resolved:
        parser.error("--backend smtlib needs an executable --solver-path or NLAM_SOLVER")
    return SmtLibBackend(resolved)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    backend = _backend(args, parser)
    reset_names()
    try:
        with using(args.theory, backend):
            for line in DEMOS[args.demo](args):
                print(line)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except StepBoundExceeded as exc:
        print(f"step bound exceeded: {exc}", file=sys.stderr)
        return EXIT_STEPS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
