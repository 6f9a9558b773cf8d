"""Per-vertex structure: fibre fans, the bundle criterion and stratum flatness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .complex import (
    ABSTRACT,
    FAN,
    ComplexIso,
    Cone,
    ConeComplex,
    find_isomorphism_over_base,
    product_complex,
    quotient_complex,
    verify_isomorphism,
)
from .errors import ConeError, FanError, SearchBudgetExhausted, StructuralError
from .expansion import TropicalExpansion, VertexData
from .lattice import IntMatrix, Lattice, Vector, block_diagonal, left_inverse, primitive, quotient


@dataclass
class FibreFan:
    """Φ_v in N_{σ_v}, with each cone traced back to the Υ-cone it came from."""

    vertex: VertexData
    fan: ConeComplex
    provenance: dict[int, int]
    psi_v: list[int]

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.fan.rank)

    def ray_provenance(self) -> dict[int, int]:
        """Fan ray id -> Υ-cone of dimension dim τ + 1 it is the image of."""
        return {r: self.provenance[self.fan.ray_cone_id(r)] for r in range(len(self.fan.rays))}


def fibre_fan(exp: TropicalExpansion, v: VertexData) -> FibreFan:
    """Φ_v = {ω/ω_v : ω ⊇ ω_v, r(ω) ⊆ σ_v}, computed through the position map."""
    ups = exp.upsilon
    w0 = v.omega_v
    sv_faces = exp.sigma.faces_of(v.sigma_v)
    psi = sorted(
        (w for w in ups.cofaces[w0] if exp.sigma_of(w) in sv_faces),
        key=lambda w: (ups.dim(w), sorted(ups.cone_keys[w])),
    )
    J = v.identification
    d = J.nrows
    base_rays = ups.cone_keys[w0]
    step = [w for w in psi if ups.dim(w) == exp.m + 1]
    vectors: list[Vector] = []
    names = []
    for w in step:
        extra = sorted(ups.cone_keys[w] - base_rays)
        img = primitive(J @ ups.cone(w).relint_point())
        if not any(img):
            raise StructuralError(f"{ups.cone_label(w)} maps to zero in N_σ")
        vectors.append(img)
        names.append("+".join(ups.ray_names[i] for i in extra))
    gens = []
    origin = {}
    ray_of = {w: i for i, w in enumerate(step)}
    for w in psi:
        g = frozenset(ray_of[u] for u in step if ups.is_face(u, w))
        gens.append(g)
        origin[g] = w
    try:
        fan = ConeComplex(d, vectors, gens, FAN, ray_names=names, origin=origin)
    except (FanError, ConeError) as exc:
        raise StructuralError(f"fibre fan at {v.name} is not a fan: {exc}") from None
    for c in fan:
        w = fan.origin[c]
        if fan.dim(c) != ups.dim(w) - exp.m:
            raise StructuralError(f"fibre fan cone from {ups.cone_label(w)} has the wrong dimension")
        img = [J @ r for r in ups.cone(w).rays]
        expect = Cone.generated_by(img, d) if any(any(x) for x in img) else Cone.zero(d)
        if set(expect.rays) != set(fan.cone(c).rays):
            raise StructuralError(f"fibre fan cone from {ups.cone_label(w)} is not the image of ω")
    if len(fan) != len(psi):
        raise StructuralError("fibre fan cones do not match Ψ_v")
    return FibreFan(v, fan, dict(fan.origin), psi)


# ---------------------------------------------------------------------------
# Bundle criterion
# ---------------------------------------------------------------------------

@dataclass
class BundleSetup:
    """The complexes and projections compared by the bundle criterion."""

    star_quotient: ConeComplex
    base: ConeComplex
    product: ConeComplex
    fibre: FibreFan
    proj_star: IntMatrix
    proj_product: IntMatrix


@dataclass
class BundleVerdict:
    status: str  # "bundle", "not_bundle" or "inconclusive"
    witness: Optional[ComplexIso] = None
    obstruction: Optional[str] = None
    setup: Optional[BundleSetup] = None
    nodes: int = 0
    verified: bool = False

    @property
    def is_bundle(self) -> bool:
        return self.status == "bundle"


def bundle_setup(exp: TropicalExpansion, v: VertexData, phi: Optional[FibreFan] = None) -> BundleSetup:
    ups = exp.upsilon
    phi = phi or fibre_fan(exp, v)
    A = quotient_complex(ups, v.omega_v)
    base = quotient_complex(exp.sigma, v.sigma_v)
    B = product_complex(base, phi.fan)
    Qw = A.quotient_map  # type: ignore[attr-defined]
    Qs = base.quotient_map  # type: ignore[attr-defined]
    W = ups.cone(v.omega_v).lattice_basis
    QR = Qs.projection @ exp.R
    if not (QR @ W).is_zero():
        raise StructuralError("projection to Σ/σ_v does not vanish on N_ω")
    P = QR @ Qw.section
    if P @ Qw.projection != QR:
        raise StructuralError("projection Υ/ω_v -> Σ/σ_v is not well defined")
    k = base.rank
    PB = IntMatrix.identity(k).hstack(IntMatrix.zeros(k, phi.fan.rank))
    return BundleSetup(A, base, B, phi, P, PB)


def bundle_criterion(exp: TropicalExpansion, v: VertexData, limit: Optional[int] = None) -> BundleVerdict:
    """Decide whether Υ/ω_v ≅ Σ/σ_v x Φ_v over Σ/σ_v."""
    setup = bundle_setup(exp, v)
    try:
        res = find_isomorphism_over_base(setup.star_quotient, setup.product, setup.proj_star, setup.proj_product,
                                         limit=limit)
    except SearchBudgetExhausted as exc:
        return BundleVerdict("inconclusive", None, f"inconclusive: budget exhausted after {exc.nodes} nodes",
                             setup, exc.nodes)
    if res.iso is None:
        return BundleVerdict("not_bundle", None, res.obstruction, setup, res.nodes)
    problems = verify_isomorphism(setup.star_quotient, setup.product, res.iso, setup.proj_star, setup.proj_product)
    if problems:
        raise StructuralError("bundle witness failed verification: " + "; ".join(problems))
    return BundleVerdict("bundle", res.iso, None, setup, res.nodes, True)


# ---------------------------------------------------------------------------
# Stratum flatness
# ---------------------------------------------------------------------------

@dataclass
class FlatnessOffender:
    omega: int
    label: str
    image_rays: list[Vector]


@dataclass
class FlatnessResult:
    flat: bool
    offenders: list[FlatnessOffender] = field(default_factory=list)


def check_stratum_flatness(exp: TropicalExpansion, v: VertexData) -> FlatnessResult:
    """Every cone of Υ/ω_v must map onto a cone of Σ/σ_v."""
    setup = bundle_setup(exp, v)
    A, base, P = setup.star_quotient, setup.base, setup.proj_star
    base_cones = {frozenset(base.cone(c).rays) for c in base}
    offenders = []
    for c in A:
        imgs = [P @ r for r in A.cone(c).rays]
        img = Cone.generated_by(imgs, base.rank) if any(any(x) for x in imgs) else Cone.zero(base.rank)
        if frozenset(img.rays) not in base_cones:
            w = A.origin[c]
            offenders.append(FlatnessOffender(w, exp.upsilon.cone_label(w), sorted(img.rays)))
    return FlatnessResult(not offenders, offenders)


# ---------------------------------------------------------------------------
# Cut and paste
# ---------------------------------------------------------------------------

@dataclass
class StratumComponent:
    omega0: int
    cones: list[int]
    fan: ConeComplex


@dataclass
class StratumRecord:
    sigma: int
    label: str
    cones: list[int]
    components: list[StratumComponent]


@dataclass
class StratumDecomposition:
    vertex: VertexData
    records: list[StratumRecord]


def cut_and_paste(exp: TropicalExpansion, v: VertexData) -> StratumDecomposition:
    """Group the star of ω_v by the stratum of Σ/σ_v each cone lies over.

    Over the stratum of σ ⊇ σ_v the cones ω with σ(ω) = σ split into pieces,
    one per inclusion-minimal such cone ω0; each piece's fan is
    {ω/ω0 : ω ⊇ ω0} in (N_σ x N_τ)/N_{ω0}.  Over σ_v itself this is Φ_v.
    """
    ups = exp.upsilon
    sig = exp.sigma
    star = sorted(ups.cofaces[v.omega_v])
    phi = fibre_fan(exp, v)
    records = []
    for s in sorted(sig.cofaces[v.sigma_v], key=lambda c: (sig.dim(c), sorted(sig.cone_keys[c]))):
        over = [w for w in star if exp.sigma_of(w) == s]
        over.sort(key=lambda w: (ups.dim(w), sorted(ups.cone_keys[w])))
        minimal = [w for w in over if not any(u != w and ups.is_face(u, w) for u in over)]
        comps = []
        for w0 in minimal:
            members = [w for w in over if ups.is_face(w0, w)]
            if s == v.sigma_v:
                fan = phi.fan
            else:
                fan = _component_fan(exp, s, w0, members)
            comps.append(StratumComponent(w0, members, fan))
        records.append(StratumRecord(s, sig.cone_label(s), over, comps))
    covered = sorted(w for r in records for w in r.cones)
    if covered != star:
        raise StructuralError("stratum records do not partition the star of ω_v")
    return StratumDecomposition(v, records)


def _component_fan(exp: TropicalExpansion, s: int, w0: int, members: list[int]) -> ConeComplex:
    ups = exp.upsilon
    sc = exp.sigma.cone(s)
    Bs = sc.lattice_basis
    m = exp.m
    # coordinates on N_σ x N_τ
    C = block_diagonal(left_inverse(Bs), IntMatrix.identity(m))
    W0 = ups.cone(w0).lattice_basis
    q = quotient(Lattice(sc.dim + m), C @ W0)
    step = [w for w in members if ups.dim(w) == ups.dim(w0) + 1]
    vectors = [primitive(q.project(C @ ups.cone(w).relint_point())) for w in step]
    names = ["+".join(ups.ray_names[i] for i in sorted(ups.cone_keys[w] - ups.cone_keys[w0])) for w in step]
    gens = []
    origin = {}
    for w in members:
        g = frozenset(i for i, u in enumerate(step) if ups.is_face(u, w))
        gens.append(g)
        origin[g] = w
    return ConeComplex(q.quotient.rank, vectors, gens, ABSTRACT, ray_names=names, origin=origin)


# ---------------------------------------------------------------------------
# The open part Y_v°
# ---------------------------------------------------------------------------

@dataclass
class YvBullet:
    fibre_fan: FibreFan
    torus_rank: int
    mixing: str = "standard"


def describe_Yv_bullet(exp: TropicalExpansion, v: VertexData) -> YvBullet:
    """Fibre fan, structure-torus rank dim σ_v, and the standard mixing marker."""
    return YvBullet(fibre_fan(exp, v), exp.sigma.dim(v.sigma_v), "standard")
