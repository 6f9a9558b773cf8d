"""Isomorphisms of cone complexes compatible with projections to a base."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import InputError, SearchBudgetExhausted
from ..lattice import IntMatrix, coordinates, independent_subset, rational_inverse
from .fan import ConeComplex

DEFAULT_SEARCH_LIMIT = 10**6


def search_limit() -> int:
    """Node budget for the isomorphism search (``TROPEX_SEARCH_LIMIT``)."""
    raw = os.environ.get("TROPEX_SEARCH_LIMIT")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEARCH_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"TROPEX_SEARCH_LIMIT must be an integer, got {raw!r}") from None
    if value <= 0:
        raise InputError("TROPEX_SEARCH_LIMIT must be positive")
    return value


@dataclass
class ComplexIso:
    """An isomorphism A -> B.

    ``linear_maps[c]`` is the matrix of the map N_c -> N_{c'} in the lattice
    bases ``A.cone(c).lattice_basis`` and ``B.cone(c').lattice_basis``.
    """

    cone_bijection: dict[int, int]
    ray_map: dict[int, int]
    linear_maps: dict[int, IntMatrix] = field(default_factory=dict)
    nodes: int = 0


@dataclass
class IsoSearchResult:
    iso: Optional[ComplexIso]
    obstruction: Optional[str]
    nodes: int


def _projection_ok(P: Optional[IntMatrix], A: ConeComplex) -> IntMatrix:
    if P is None:
        return IntMatrix.zeros(0, A.rank)
    if P.ncols != A.rank:
        raise ValueError("projection matrix does not match the complex rank")
    return P


def _ray_signature(X: ConeComplex, P: IntMatrix, ray: int) -> tuple:
    rc = X.ray_cone_id(ray)
    around = Counter(X.fingerprints[c] for c in X.cofaces[rc])
    return (P @ X.rays[ray], tuple(sorted(around.items())))


def cone_linear_map(A: ConeComplex, ca: int, B: ConeComplex, cb: int, ray_map: dict[int, int]) -> Optional[IntMatrix]:
    """Unimodular matrix N_ca -> N_cb sending each ray to its image, if one exists."""
    src_rays = sorted(A.cone_keys[ca])
    ba = A.cone(ca).lattice_basis
    bb = B.cone(cb).lattice_basis
    d = A.dim(ca)
    if d != B.dim(cb):
        return None
    if d == 0:
        return IntMatrix.zeros(0, 0)
    X = [coordinates(ba, A.rays[r]) for r in src_rays]
    Y = [coordinates(bb, B.rays[ray_map[r]]) for r in src_rays]
    if any(v is None for v in X) or any(v is None for v in Y):
        return None
    basis = independent_subset(X)
    Xs = IntMatrix.from_columns([X[i] for i in basis], d)
    Ys = IntMatrix.from_columns([Y[i] for i in basis], d)
    inv = rational_inverse(Xs)
    if inv is None:
        return None
    T = []
    for i in range(d):
        row = []
        for j in range(d):
            v = sum(Fraction(Ys[i, k]) * inv[k][j] for k in range(d))
            if v.denominator != 1:
                return None
            row.append(int(v))
        T.append(row)
    T = IntMatrix.from_rows(T, ncols=d)
    if abs(T.det()) != 1:
        return None
    for x, y in zip(X, Y):
        if T @ x != y:
            return None
    return T


def find_isomorphism_over_base(
    A: ConeComplex,
    B: ConeComplex,
    proj_A: Optional[IntMatrix] = None,
    proj_B: Optional[IntMatrix] = None,
    limit: Optional[int] = None,
) -> IsoSearchResult:
    """Search for an isomorphism A -> B with proj_B ∘ iso = proj_A.

    The projections are single matrices from each ambient lattice to a common
    base lattice; pass ``None`` for the trivial base.  Returns the iso or an
    obstruction string.  Raises :class:`SearchBudgetExhausted` when more than
    ``limit`` nodes are visited.
    """
    limit = search_limit() if limit is None else limit
    PA = _projection_ok(proj_A, A)
    PB = _projection_ok(proj_B, B)
    if PA.nrows != PB.nrows:
        return IsoSearchResult(None, "projections land in lattices of different rank", 0)
    if len(A) != len(B):
        return IsoSearchResult(None, f"cone counts differ ({len(A)} vs {len(B)})", 0)
    if Counter(A.fingerprints) != Counter(B.fingerprints):
        return IsoSearchResult(None, "cone fingerprints differ (dimension, ray count, smoothness, multiplicity)", 0)
    nA = len(A.rays)
    if nA != len(B.rays):
        return IsoSearchResult(None, "ray counts differ", 0)

    sig_A = [_ray_signature(A, PA, r) for r in range(nA)]
    sig_B = [_ray_signature(B, PB, r) for r in range(nA)]
    if Counter(sig_A) != Counter(sig_B):
        return IsoSearchResult(None, "ray signatures differ (projection or surrounding cones)", 0)
    candidates = [[b for b in range(nA) if sig_B[b] == sig_A[a]] for a in range(nA)]

    # assign the most constrained rays first, then those sharing many cones
    order = sorted(range(nA), key=lambda a: (len(candidates[a]), a))
    position = {a: i for i, a in enumerate(order)}
    # cones of A that become fully assigned after each step
    completes: list[list[int]] = [[] for _ in range(nA)]
    for c in A:
        rays = A.cone_keys[c]
        if rays:
            completes[max(position[r] for r in rays)].append(c)

    ray_map: dict[int, int] = {}
    used: set[int] = set()
    cone_map: dict[int, int] = {A.zero_id: B.zero_id}
    lin: dict[int, IntMatrix] = {}
    nodes = 0

    def step(i: int) -> bool:
        nonlocal nodes
        if i == nA:
            return True
        a = order[i]
        for b in candidates[a]:
            if b in used:
                continue
            nodes += 1
            if nodes > limit:
                raise SearchBudgetExhausted(nodes)
            ray_map[a] = b
            used.add(b)
            ok = True
            added = []
            for c in completes[i]:
                img = frozenset(ray_map[r] for r in A.cone_keys[c])
                cb = B.index.get(img)
                if cb is None or A.fingerprints[c] != B.fingerprints[cb]:
                    ok = False
                    break
                T = cone_linear_map(A, c, B, cb, ray_map)
                if T is None:
                    ok = False
                    break
                cone_map[c] = cb
                lin[c] = T
                added.append(c)
            if ok and step(i + 1):
                return True
            for c in added:
                del cone_map[c]
                del lin[c]
            del ray_map[a]
            used.discard(b)
        return False

    found = step(0)
    if not found:
        return IsoSearchResult(None, f"exhaustive search found no isomorphism ({nodes} nodes)", nodes)
    lin[A.zero_id] = IntMatrix.zeros(0, 0)
    iso = ComplexIso(dict(sorted(cone_map.items())), dict(sorted(ray_map.items())), dict(sorted(lin.items())), nodes)
    problems = verify_isomorphism(A, B, iso, proj_A, proj_B)
    if problems:
        raise AssertionError("isomorphism failed re-verification: " + "; ".join(problems))
    return IsoSearchResult(iso, None, nodes)


def verify_isomorphism(
    A: ConeComplex,
    B: ConeComplex,
    iso: ComplexIso,
    proj_A: Optional[IntMatrix] = None,
    proj_B: Optional[IntMatrix] = None,
) -> list[str]:
    """Independently check an isomorphism; returns a list of problems (empty if valid)."""
    problems: list[str] = []
    PA = _projection_ok(proj_A, A)
    PB = _projection_ok(proj_B, B)
    cm = iso.cone_bijection
    if sorted(cm) != list(A) or sorted(cm.values()) != list(B):
        return ["cone map is not a bijection"]
    for c in A:
        for f in A:
            if A.is_face(f, c) != B.is_face(cm[f], cm[c]):
                problems.append(f"face relation between cones {f} and {c} not preserved")
    if problems:
        return problems
    for c in A:
        cb = cm[c]
        T = iso.linear_maps.get(c)
        d = A.dim(c)
        if T is None or T.shape != (d, d) or B.dim(cb) != d:
            problems.append(f"cone {c}: missing or mis-shaped linear map")
            continue
        if d and abs(T.det()) != 1:
            problems.append(f"cone {c}: linear map is not unimodular")
        ba = A.cone(c).lattice_basis
        bb = B.cone(cb).lattice_basis
        # ambient form of the map on the span of the cone
        images = set()
        for r in A.ray_vectors(c):
            x = coordinates(ba, r)
            y = T @ x if d else ()
            images.add(bb @ y if d else (0,) * B.rank)
        if images != set(B.ray_vectors(cb)):
            problems.append(f"cone {c}: rays are not carried onto the rays of cone {cb}")
        lhs = PA @ ba if d else None
        rhs = PB @ (bb @ T) if d else None
        if d and lhs != rhs:
            problems.append(f"cone {c}: projections are not compatible")
        for f in A.faces_of(c):
            if f == c or A.dim(f) == 0:
                continue
            Tf = iso.linear_maps.get(f)
            if Tf is None:
                continue
            bf = A.cone(f).lattice_basis
            inc = IntMatrix.from_columns([coordinates(ba, col) for col in bf.columns()], d)
            inc_b = IntMatrix.from_columns([coordinates(bb, col) for col in B.cone(cm[f]).lattice_basis.columns()], d)
            if T @ inc != inc_b @ Tf:
                problems.append(f"cone {c}: linear map does not restrict to the map on face {f}")
    return problems
