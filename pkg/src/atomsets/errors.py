class AtomSetsError(Exception):
    """Base class for errors raised by this package."""


class SignatureError(AtomSetsError):
    """A relation is used outside the atom theory that provides it."""


class SolverError(AtomSetsError):
    """The external SMT solver failed or answered something other than
    ``sat``/``unsat``."""


class StepBoundExceeded(AtomSetsError):
    """An iterative computation (size, transitive closure) hit its step cap."""


class ConditionalError(AtomSetsError):
    """Two values cannot be merged under an undetermined condition."""
