"""Cones, fans and abstract cone complexes."""

from __future__ import annotations

from .cone import Cone, double_description
from .fan import (
    ABSTRACT,
    FAN,
    ConeComplex,
    IsotropicComplex,
    build_fan,
    fan_from_cones,
    intersect_cones,
    product_complex,
    quotient_complex,
    star_subdivide,
)
from .iso import (
    ComplexIso,
    IsoSearchResult,
    find_isomorphism_over_base,
    search_limit,
    verify_isomorphism,
)


def faces(c: Cone) -> list[Cone]:
    """All faces of a cone, from the zero face up to the cone itself."""
    return c.faces()


def is_smooth(c: Cone) -> bool:
    return c.is_smooth()


def star(sigma: ConeComplex, cid: int) -> IsotropicComplex:
    return sigma.star(cid)


__all__ = [
    "ABSTRACT",
    "FAN",
    "ComplexIso",
    "Cone",
    "ConeComplex",
    "IsoSearchResult",
    "IsotropicComplex",
    "build_fan",
    "double_description",
    "faces",
    "fan_from_cones",
    "find_isomorphism_over_base",
    "intersect_cones",
    "is_smooth",
    "product_complex",
    "quotient_complex",
    "search_limit",
    "star",
    "star_subdivide",
    "verify_isomorphism",
]
