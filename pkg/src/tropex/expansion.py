"""Tropical expansions: validation, vertices, position maps and slices.

Coordinates throughout are the product coordinates N_Σ x N_τ = Z^n x Z^m, so
a cone of the expansion Υ is a cone in Z^(n+m), ``r`` keeps the first n
coordinates and ``p`` keeps the last m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .complex import Cone, ConeComplex, build_fan, product_complex
from .errors import InputError, StructuralError, ValidationFailure
from .lattice import (
    IntMatrix,
    Lattice,
    QuotientLattice,
    Vector,
    block_diagonal,
    clear_denominators,
    coordinates,
    invariant_factors,
    is_saturated,
    left_inverse,
    quotient,
    rank,
    rational_inverse,
    solve_rational,
)

Point = tuple[Fraction, ...]


def projection_r(n: int, m: int) -> IntMatrix:
    return IntMatrix.identity(n).hstack(IntMatrix.zeros(n, m))


def projection_p(n: int, m: int) -> IntMatrix:
    return IntMatrix.zeros(m, n).hstack(IntMatrix.identity(m))


def tau_fan(tau: Cone, names: Optional[Sequence[str]] = None) -> ConeComplex:
    """The face complex of τ."""
    names = list(names) if names is not None else [f"t{i}" for i in range(len(tau.rays))]
    return build_fan(tau.n, dict(zip(names, tau.rays)), [names] if tau.rays else [])


@dataclass
class SubdivisionMap:
    """Υ together with its inclusion into Σ x τ.

    ``assignment[ω]`` is the id of the smallest cone of Σ x τ containing ω.
    """

    source: ConeComplex
    target: ConeComplex
    assignment: dict[int, int]
    n: int
    m: int
    support_surjective: bool


@dataclass
class VertexData:
    """A vertex of the expansion.

    Attributes:
        name: Automatic name ``v0, v1, ...``.
        omega_v: Υ-cone mapped isomorphically onto τ.
        sigma_v: Smallest Σ-cone containing r(ω_v).
        phi_v: Position map N_τ -> N_{σ_v}, in the coordinates of ``sigma_basis``.
        sigma_basis: Basis of N_{σ_v} in Z^n (the ray generators when σ_v is smooth).
        identification: The map (x, t) ↦ x - φ_v(t) from N_{σ_v} x N_τ to N_{σ_v},
            written on ambient coordinates Z^n x Z^m; only meaningful on N_{σ_v} x N_τ.
        quotient_iso: The quotient (N_{σ_v} x N_τ)/N_{ω_v} computed by Smith form,
            in the coordinates of ``sigma_basis`` and the standard basis of N_τ.
        alias: Ray names of ω_v joined by ``+``.
    """

    name: str
    omega_v: int
    sigma_v: int
    phi_v: IntMatrix
    sigma_basis: IntMatrix
    identification: IntMatrix
    quotient_iso: QuotientLattice
    alias: str = ""
    generators: tuple[Vector, ...] = field(default=())


@dataclass
class SlicePolyhedron:
    omega: int
    dim: int
    vertices: tuple[int, ...]
    rays: tuple[Vector, ...]
    sigma_P: int


@dataclass
class SliceEdge:
    omega: int
    tail: int
    head: Optional[int]
    slope: Vector
    sigma_E: int


@dataclass
class PolyhedralSlice:
    """The polyhedral complex Υ_f in N_Σ ⊗ Q."""

    f: Point
    kappa: frozenset[int]
    vertices: list[Point]
    vertex_cones: list[int]
    polyhedra: list[SlicePolyhedron]
    edges: list[SliceEdge]


class TropicalExpansion:
    """A validated expansion Υ -> Σ x τ.

    Build one with :func:`build_expansion` or :func:`validate_expansion`.
    """

    def __init__(self, sigma: ConeComplex, tau: Cone, tau_names: Sequence[str], sub: SubdivisionMap,
                 kappa: dict[int, frozenset[int]], divisor_names: Optional[dict[str, str]] = None):
        self.sigma = sigma
        names = divisor_names or {}
        self.divisor_names: tuple[str, ...] = tuple(names.get(r, r) for r in sigma.ray_names)
        self.tau = tau
        self.tau_names = tuple(tau_names)
        self.sub = sub
        self.upsilon = sub.source
        self.n = sub.n
        self.m = sub.m
        self.R = projection_r(self.n, self.m)
        self.P = projection_p(self.n, self.m)
        self.kappa = kappa
        self.vertices: list[VertexData] = compute_vertices(self)

    def divisor_symbol(self, ray: int) -> str:
        """Formal symbol of the boundary divisor of a Σ-ray."""
        return self.divisor_names[ray]

    def sigma_of(self, omega: int) -> int:
        """Smallest Σ-cone containing r(ω)."""
        t = self.sub.assignment[omega]
        return self.sub.target.origin[t][0]

    def vertex(self, name: str) -> VertexData:
        """Look a vertex up by automatic name or by the ray names of ω_v."""
        hits = {id(v): v for v in self.vertices if v.name == name or v.alias == name}
        if not hits:
            known = ", ".join(f"{v.name} ({v.alias})" for v in self.vertices)
            raise InputError(f"unknown vertex {name!r}; vertices are {known}")
        if len(hits) > 1:
            raise InputError(f"vertex name {name!r} is ambiguous")
        return next(iter(hits.values()))

    @property
    def support_surjective(self) -> bool:
        return self.sub.support_surjective


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_open_subdivision(upsilon: ConeComplex, target: ConeComplex) -> SubdivisionMap:
    """Check that Υ is an open subdivision of the product Σ x τ."""
    if upsilon.rank != target.rank:
        raise InputError(f"Υ has rank {upsilon.rank} but Σ x τ has rank {target.rank}")
    m = getattr(target, "tau_rank", None)
    n = target.rank - m if m is not None else target.rank
    issues = []
    assignment = {}
    for w in upsilon:
        c = upsilon.cone(w)
        t = target.minimal_cone_containing(c.relint_point())
        if t is None or not target.cone(t).contains_cone(c):
            issues.append(("containment", w, f"{upsilon.cone_label(w)} is not contained in any cone of Σ x τ"))
            continue
        assignment[w] = t
        if c.has_custom_lattice and not is_saturated(c.lattice_basis, Lattice(upsilon.rank)):
            factors = [d for d in invariant_factors(c.lattice_basis) if d > 1]
            issues.append(("saturation", w, f"{upsilon.cone_label(w)} has a non-saturated lattice "
                                             f"(invariant factors {factors})"))
    if issues:
        raise ValidationFailure(issues)
    return SubdivisionMap(upsilon, target, assignment, n, target.rank - n, _support_surjective(upsilon, target, assignment))


def _support_surjective(upsilon: ConeComplex, target: ConeComplex, assignment: dict[int, int]) -> bool:
    """Whether |Υ| = |Σ x τ|, by a pseudo-manifold test in each maximal target cone."""
    for T in target.maximal_cones():
        tc = target.cone(T)
        d = tc.dim
        inside = [w for w, t in assignment.items() if target.is_face(t, T)]
        tops = [w for w in inside if upsilon.dim(w) == d]
        if not tops:
            return False
        for w in inside:
            if upsilon.dim(w) != d - 1:
                continue
            around = [u for u in tops if upsilon.is_face(w, u)]
            boundary = assignment[w] != T
            if len(around) != (1 if boundary else 2):
                return False
    return True


def expansion_issues(sub: SubdivisionMap, tau: Cone) -> tuple[list[tuple[str, int, str]], dict[int, frozenset[int]]]:
    """Flatness and reducedness offenders, plus the face κ = p(ω) of each cone."""
    ups = sub.source
    P = projection_p(sub.n, sub.m)
    faces = {frozenset(tau.rays[i] for i in S): S for S in tau.face_ray_sets}
    issues = []
    kappa = {}
    for w in ups:
        c = ups.cone(w)
        img = c.image(P) if c.rays else Cone.zero(sub.m)
        key = frozenset(img.rays)
        if key not in faces:
            issues.append(("flatness", w, f"{ups.cone_label(w)} maps onto {[list(r) for r in img.rays]}, "
                                          "which is not a face of τ"))
            continue
        kappa[w] = faces[key]
        B = c.lattice_basis
        PB = P @ B
        fs = invariant_factors(PB)
        if len(fs) != img.dim or any(d != 1 for d in fs):
            index = 1
            for d in fs:
                index *= d
            issues.append(("reducedness", w, f"lattice of {ups.cone_label(w)} maps onto a sublattice of "
                                             f"index {index} in the lattice of its image"))
    return issues, kappa


def product_target(sigma: ConeComplex, tau: Cone, tau_names: Sequence[str]) -> ConeComplex:
    target = product_complex(sigma, tau_fan(tau, tau_names))
    target.tau_rank = tau.n  # type: ignore[attr-defined]
    return target


def validate_expansion(sub: SubdivisionMap, sigma: ConeComplex, tau: Cone,
                       tau_names: Optional[Sequence[str]] = None,
                       divisor_names: Optional[dict[str, str]] = None) -> TropicalExpansion:
    """Check flatness and reducedness and compute the vertices."""
    if tau.dim != tau.n:
        raise InputError("τ must be full-dimensional in its lattice")
    issues, kappa = expansion_issues(sub, tau)
    if issues:
        raise ValidationFailure(issues)
    names = tau_names if tau_names is not None else [f"t{i}" for i in range(len(tau.rays))]
    return TropicalExpansion(sigma, tau, names, sub, kappa, divisor_names)


def build_expansion(sigma: ConeComplex, tau: Cone, upsilon: Optional[ConeComplex],
                    tau_names: Optional[Sequence[str]] = None,
                    divisor_names: Optional[dict[str, str]] = None) -> TropicalExpansion:
    """Validate Υ against Σ x τ; ``upsilon=None`` means the trivial expansion."""
    names = list(tau_names) if tau_names is not None else [f"t{i}" for i in range(len(tau.rays))]
    if tau.dim != tau.n:
        raise InputError("τ must be full-dimensional in its lattice")
    target = product_target(sigma, tau, names)
    if upsilon is None:
        upsilon = ConeComplex(target.rank, target.rays, [target.cone_keys[c] for c in target.maximal_cones()],
                              ray_names=target.ray_names)
    sub = validate_open_subdivision(upsilon, target)
    return validate_expansion(sub, sigma, tau, names, divisor_names)


def trivial_expansion(sigma: ConeComplex, tau: Cone, tau_names: Optional[Sequence[str]] = None) -> TropicalExpansion:
    return build_expansion(sigma, tau, None, tau_names)


# ---------------------------------------------------------------------------
# Vertices and position maps
# ---------------------------------------------------------------------------

def compute_vertices(exp: TropicalExpansion) -> list[VertexData]:
    ups = exp.upsilon
    full = frozenset(range(len(exp.tau.rays)))
    found = [w for w in ups if exp.kappa[w] == full and ups.dim(w) == exp.m]
    found.sort(key=lambda w: sorted(ups.ray_vectors(w)))
    return [_vertex_data(exp, w, f"v{i}") for i, w in enumerate(found)]


def _vertex_data(exp: TropicalExpansion, w: int, name: str) -> VertexData:
    ups = exp.upsilon
    n, m = exp.n, exp.m
    W = ups.cone(w).lattice_basis
    PW = exp.P @ W
    if not PW.is_unimodular():
        raise StructuralError(f"vertex cone {ups.cone_label(w)} does not map isomorphically onto τ")
    s = exp.sigma_of(w)
    sc = exp.sigma.cone(s)
    d = sc.dim
    if sc.is_smooth():
        Bs = sc.ray_matrix()
    else:
        Bs = sc.lattice_basis
    C = left_inverse(Bs) if d else IntMatrix.zeros(0, n)
    PWinv = rational_inverse(PW)
    RW = exp.R @ W
    phi_amb = []
    for i in range(n):
        phi_amb.append([sum(Fraction(RW[i, k]) * PWinv[k][j] for k in range(m)) for j in range(m)])
    if any(x.denominator != 1 for row in phi_amb for x in row):
        raise StructuralError("position map is not integral")
    phi_amb_m = IntMatrix.from_rows([[int(x) for x in row] for row in phi_amb], ncols=m)
    phi = C @ phi_amb_m if d else IntMatrix.zeros(0, m)
    if d and Bs @ phi != phi_amb_m:
        raise StructuralError("position map does not land in N_σ")
    if not d and not phi_amb_m.is_zero():
        raise StructuralError("position map of a vertex over the zero cone is nonzero")
    ident = (C.hstack(-phi)) if d else IntMatrix.zeros(0, n + m)
    if not (ident @ W).is_zero():
        raise StructuralError("identification does not vanish on N_ω")

    # cross-check against the Smith-form quotient of N_σ x N_τ by N_ω
    amb = Lattice(d + m)
    emb = block_diagonal(Bs, IntMatrix.identity(m))
    Cfull = block_diagonal(C, IntMatrix.identity(m))
    sub = Cfull @ W
    if emb @ sub != W:
        raise StructuralError("ω_v does not lie in N_σ x N_τ")
    q = quotient(amb, sub)
    J = ident @ emb
    G = J @ q.section if d else IntMatrix.zeros(0, 0)
    if d and (not G.is_unimodular() or G @ q.projection != J):
        raise StructuralError("position map does not identify the quotient lattice")
    alias = "+".join(ups.cone_names(w))
    return VertexData(name, w, s, phi, Bs, ident, q, alias, tuple(sorted(ups.ray_vectors(w))))


def vertices(exp: TropicalExpansion) -> list[VertexData]:
    return list(exp.vertices)


# ---------------------------------------------------------------------------
# Slices
# ---------------------------------------------------------------------------

def parse_point(values: Sequence, m: int) -> Point:
    pt = tuple(Fraction(x) for x in values)
    if len(pt) != m:
        raise InputError(f"slice point has {len(pt)} coordinates, τ has rank {m}")
    return pt


def _face_of_tau(tau: Cone, f: Point) -> frozenset[int]:
    den = 1
    for x in f:
        den = den * x.denominator
    fi = tuple(int(x * den) for x in f)
    if not tau.contains(fi):
        raise InputError(f"point {[str(x) for x in f]} is not in τ")
    return tau.minimal_face_containing(fi)


def _solve_point(basis_vectors: list[Vector], P: IntMatrix, R: IntMatrix, f: Point) -> Point:
    """r(y) for the unique y in the span of ``basis_vectors`` with p(y) = f."""
    A = [[sum(P[i, k] * v[k] for k in range(P.ncols)) for v in basis_vectors] for i in range(P.nrows)]
    c = solve_rational(A, f)
    if c is None:
        raise StructuralError("slice vertex equation has no solution")
    y = [sum(ci * v[k] for ci, v in zip(c, basis_vectors)) for k in range(P.ncols)]
    return tuple(Fraction(sum(R[i, k] * y[k] for k in range(len(y)))) for i in range(R.nrows))


def slice_expansion(exp: TropicalExpansion, f: Sequence) -> PolyhedralSlice:
    """The polyhedral complex Υ_f = {ω ∩ p⁻¹(f)} seen in N_Σ ⊗ Q."""
    f = parse_point(f, exp.m)
    kappa = _face_of_tau(exp.tau, f)
    ups = exp.upsilon
    members = [w for w in ups if exp.kappa[w] == kappa]
    dk = exp.tau.face(kappa).dim
    vertex_cones = [w for w in members if ups.dim(w) == dk]
    verts = []
    for w in vertex_cones:
        c = ups.cone(w)
        verts.append(_solve_point(c.lattice_basis.columns(), exp.P, exp.R, f))
    vindex = {w: i for i, w in enumerate(vertex_cones)}
    polys = []
    edges = []
    for w in members:
        c = ups.cone(w)
        vs = tuple(sorted(vindex[u] for u in ups.faces_of(w) if u in vindex))
        rays = tuple(sorted(exp.R @ u for u in c.rays if not any(exp.P @ u)))
        dim = _affine_dim([verts[i] for i in vs], rays)
        if dim != c.dim - dk:
            raise StructuralError(f"slice of {ups.cone_label(w)} has dimension {dim}, expected {c.dim - dk}")
        rel = _relint_point([verts[i] for i in vs], rays)
        sP = _minimal_sigma_cone(exp.sigma, rel)
        polys.append(SlicePolyhedron(w, dim, vs, rays, sP))
        if dim == 1:
            if len(vs) == 2:
                a, b = vs
                if verts[b] < verts[a]:
                    a, b = b, a
                slope = clear_denominators([y - x for x, y in zip(verts[a], verts[b])])
                edges.append(SliceEdge(w, a, b, slope, sP))
            else:
                edges.append(SliceEdge(w, vs[0], None, rays[0], sP))
    return PolyhedralSlice(f, kappa, verts, vertex_cones, polys, edges)


def _affine_dim(points: list[Point], rays: Sequence[Vector]) -> int:
    if not points:
        return -1
    vecs = [tuple(a - b for a, b in zip(p, points[0])) for p in points[1:]] + [tuple(Fraction(x) for x in r) for r in rays]
    return rank(vecs) if vecs else 0


def _relint_point(points: list[Point], rays: Sequence[Vector]) -> Point:
    k = len(points)
    n = len(points[0])
    return tuple(sum(p[i] for p in points) / k + sum(r[i] for r in rays) for i in range(n))


def _minimal_sigma_cone(sigma: ConeComplex, x: Point) -> int:
    xi = clear_denominators(x) if any(x) else tuple(0 for _ in x)
    c = sigma.minimal_cone_containing(xi)
    if c is None:
        raise StructuralError("slice polyhedron leaves the support of Σ")
    return c


# ---------------------------------------------------------------------------
# Combinatorial types
# ---------------------------------------------------------------------------

def slice_type(exp: TropicalExpansion, sl: PolyhedralSlice) -> tuple:
    """A hashable description of a slice that does not depend on f itself.

    Vertices are named by the Υ-cone they come from; polyhedra carry their
    vertex names, recession rays, σ_P, and (for edges) the oriented slope.
    Vertex containment is recomputed geometrically from the coordinates.
    """
    ups = exp.upsilon
    records = []
    for poly in sl.polyhedra:
        c = ups.cone(poly.omega)
        inside = []
        for i, x in enumerate(sl.vertices):
            den = 1
            for t in tuple(x) + tuple(sl.f):
                den = den * t.denominator
            pt = tuple(int(t * den) for t in tuple(x) + tuple(sl.f))
            if c.contains(pt):
                inside.append(sl.vertex_cones[i])
        records.append((poly.omega, poly.dim, tuple(sorted(inside)), poly.rays, poly.sigma_P))
    edge_records = []
    for e in sl.edges:
        tail = sl.vertex_cones[e.tail]
        head = sl.vertex_cones[e.head] if e.head is not None else None
        slope = e.slope
        # orientation by coordinates may differ between points; compare up to it
        if head is not None and head < tail:
            tail, head, slope = head, tail, tuple(-x for x in slope)
        edge_records.append((e.omega, tail, head, slope, e.sigma_E))
    return (tuple(sorted(records)), tuple(sorted(edge_records, key=repr)))


def canonical_point(tau: Cone, kappa: frozenset[int], weighted: bool = False) -> Point:
    m = tau.n
    pt = [Fraction(0)] * m
    for k, i in enumerate(sorted(kappa)):
        w = k + 1 if weighted else 1
        for j in range(m):
            pt[j] += w * tau.rays[i][j]
    return tuple(pt)


def combinatorial_type(exp: TropicalExpansion, kappa: Sequence[int] | frozenset[int]) -> tuple[PolyhedralSlice, tuple]:
    """Slice at the canonical interior point of κ, re-checked at a second interior point."""
    kappa = frozenset(kappa)
    if not exp.tau.is_face_set(kappa):
        raise InputError("not a face of τ")
    first = slice_expansion(exp, canonical_point(exp.tau, kappa))
    second = slice_expansion(exp, canonical_point(exp.tau, kappa, weighted=True))
    t1, t2 = slice_type(exp, first), slice_type(exp, second)
    if t1 != t2:
        raise StructuralError("combinatorial type changes inside a face of τ")
    return first, t1
