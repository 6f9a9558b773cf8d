"""Tropical expansions of toroidal embeddings, computed on cone complexes.

The package validates expansions Υ -> Σ x τ, computes fibre fans and
position maps at each vertex, decides the toric variety bundle criterion,
computes mixing collections with piecewise-linear divisor calculus and
packages GIT presentations of the fibre.
"""

from __future__ import annotations

from importlib import resources

from .errors import (
    ConeError,
    FanError,
    InputError,
    LatticeError,
    SearchBudgetExhausted,
    StructuralError,
    TorsionError,
    TropexError,
    ValidationFailure,
)

__version__ = "0.1.0"

FIXTURES = ("figure1", "figure2", "final_example")


def fixture_path(name: str):
    """Path of a bundled fixture document, e.g. ``fixture_path("figure1")``."""
    if name not in FIXTURES:
        raise InputError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files(__name__).joinpath("fixtures", f"{name}.json")


__all__ = [
    "ConeError",
    "FanError",
    "FIXTURES",
    "InputError",
    "LatticeError",
    "SearchBudgetExhausted",
    "StructuralError",
    "TorsionError",
    "TropexError",
    "ValidationFailure",
    "fixture_path",
    "__version__",
]
