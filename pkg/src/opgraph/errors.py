"""Exception taxonomy shared by all modules."""


class OpGraphError(Exception):
    """Base class for everything this package raises on purpose."""


class InputError(OpGraphError):
    """Caller handed in something malformed (bad id, absent edge, bad flag)."""


class ConstructionViolation(OpGraphError):
    """A mathematical precondition of a construction does not hold."""


class BudgetError(OpGraphError):
    """Refusal: the requested work exceeds a stated budget or ceiling."""


class IntegrityError(OpGraphError):
    """A recheck contradicted a guarantee the build is supposed to carry.

    This is a panic signal: it means the artifact is broken, not that the
    caller misused it.
    """


class InconclusiveError(OpGraphError):
    """A search exhausted its budget without producing a witness.

    Deliberately distinct from "no witness exists"; callers must not read a
    positive claim into it.
    """
