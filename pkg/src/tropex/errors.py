"""Exception hierarchy shared across tropex."""

from __future__ import annotations


class TropexError(Exception):
    """Base class for all tropex errors."""


class InputError(TropexError):
    """The user-supplied data is malformed or violates a precondition."""


class LatticeError(InputError):
    """A lattice construction was asked for something it cannot provide."""


class TorsionError(LatticeError):
    """Quotient by a non-saturated sublattice.

    ``factors`` holds the invariant factors larger than one.
    """

    def __init__(self, message: str, factors: list[int]):
        super().__init__(message)
        self.factors = list(factors)


class ConeError(InputError):
    """Invalid cone data (non-primitive ray, redundant ray, not strictly convex)."""


class FanError(InputError):
    """Cones that do not fit together as a fan."""


class ValidationFailure(InputError):
    """An expansion failed one or more of its defining conditions.

    ``issues`` is a list of ``(kind, cone_id, detail)`` triples so that callers
    can report every offender rather than just the first one.
    """

    def __init__(self, issues: list[tuple[str, int, str]]):
        self.issues = list(issues)
        lines = [f"{kind}: cone {cid}: {detail}" for kind, cid, detail in self.issues]
        super().__init__("; ".join(lines) if lines else "validation failed")


class StructuralError(TropexError):
    """Internal consistency check failed on data that passed validation."""


class SearchBudgetExhausted(TropexError):
    """The isomorphism search visited more nodes than allowed."""

    def __init__(self, nodes: int):
        super().__init__(f"isomorphism search exhausted its budget after {nodes} nodes")
        self.nodes = nodes
