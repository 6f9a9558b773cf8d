"""Cone complexes: embedded fans and abstract complexes.

A complex is stored as a list of ray vectors plus a list of cones, each cone
being the set of ray indices it contains.  Faces are sub-ray-sets, so the face
maps are inclusions and there is at most one face map between two cones.

Abstract complexes (quotients of stars, products) keep the same encoding;
the only difference from an embedded fan is that their cones are not
required to meet along common faces in the ambient lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from ..errors import ConeError, FanError
from ..lattice import (
    IntMatrix,
    Lattice,
    QuotientLattice,
    Vector,
    coordinates,
    primitive,
    quotient,
    saturation_basis,
)
from .cone import Cone, double_description

FAN = "fan"
ABSTRACT = "abstract"


class ConeComplex:
    """A finite cone complex whose cones are determined by their rays.

    Args:
        rank: Rank of the ambient lattice.
        rays: Primitive ray vectors; position in this list is the ray id.
        generators: Ray-id sets of cones; all their faces are added.
        flavor: ``"fan"`` (intersection condition enforced) or ``"abstract"``.
        ray_names: Optional display names, one per ray.
        lattices: Optional explicit cone lattices keyed by generating ray-id set.
        origin: Optional provenance, keyed by generating ray-id set.
        check: Verify the fan condition for the ``"fan"`` flavor.
    """

    def __init__(
        self,
        rank: int,
        rays: Sequence[Sequence[int]],
        generators: Iterable[Iterable[int]],
        flavor: str = FAN,
        ray_names: Optional[Sequence[str]] = None,
        lattices: Optional[Mapping[frozenset, IntMatrix]] = None,
        origin: Optional[Mapping[frozenset, Hashable]] = None,
        check: bool = True,
    ):
        if flavor not in (FAN, ABSTRACT):
            raise ValueError(f"unknown complex flavor {flavor!r}")
        self.rank = int(rank)
        self.flavor = flavor
        all_rays = [tuple(int(x) for x in r) for r in rays]
        gens = [frozenset(g) for g in generators]
        for g in gens:
            for i in g:
                if not 0 <= i < len(all_rays):
                    raise FanError(f"cone refers to unknown ray index {i}")
        # keep only rays that occur in some cone, in their original order
        used = sorted(set().union(*gens)) if gens else []
        remap = {old: new for new, old in enumerate(used)}
        self.rays: tuple[Vector, ...] = tuple(all_rays[i] for i in used)
        self.ray_names: tuple[str, ...] = tuple(
            ray_names[i] if ray_names is not None else f"r{new}" for new, i in enumerate(used)
        )
        gens = [frozenset(remap[i] for i in g) for g in gens]
        lattices = {frozenset(remap[i] for i in k): v for k, v in (lattices or {}).items()}
        origin_in = {frozenset(remap[i] for i in k): v for k, v in (origin or {}).items()}
        if flavor == FAN and len(set(self.rays)) != len(self.rays):
            raise FanError("two rays of a fan have the same primitive generator")

        cones: dict[frozenset, Cone] = {}
        for g in gens:
            key = g
            try:
                c = Cone([self.rays[i] for i in sorted(g)], self.rank, lattice_basis=lattices.get(g))
            except ConeError as exc:
                names = ", ".join(self.ray_names[i] for i in sorted(g))
                raise ConeError(f"cone ({names}): {exc}") from None
            if key not in cones or c.has_custom_lattice:
                cones[key] = c
            order = sorted(g)
            for S in c.face_ray_sets:
                fkey = frozenset(order[i] for i in S)
                if fkey not in cones:
                    cones[fkey] = _face_cone(c, S)
        if not cones:
            cones[frozenset()] = Cone.zero(self.rank)
        keys = sorted(cones, key=lambda k: (cones[k].dim, len(k), sorted(k)))
        self.cone_keys: tuple[frozenset, ...] = tuple(keys)
        self._cones: tuple[Cone, ...] = tuple(cones[k] for k in keys)
        self.index: dict[frozenset, int] = {k: i for i, k in enumerate(keys)}
        self.origin: dict[int, Hashable] = {self.index[k]: v for k, v in origin_in.items() if k in self.index}

        faces = []
        for cid, k in enumerate(keys):
            order = sorted(k)
            fs = set()
            for S in self._cones[cid].face_ray_sets:
                fkey = frozenset(order[i] for i in S)
                if fkey not in self.index:
                    raise FanError("face of a cone is missing from the complex")
                fs.add(self.index[fkey])
            faces.append(frozenset(fs))
        self._faces: tuple[frozenset[int], ...] = tuple(faces)
        if flavor == FAN and check:
            self._check_fan()

    # -- accessors -------------------------------------------------------

    def __len__(self) -> int:
        return len(self._cones)

    def __iter__(self):
        return iter(range(len(self._cones)))

    @property
    def ambient(self) -> Lattice:
        return Lattice(self.rank)

    def cone(self, cid: int) -> Cone:
        return self._cones[cid]

    def cone_rays(self, cid: int) -> frozenset[int]:
        """Ray ids of a cone."""
        return self.cone_keys[cid]

    def dim(self, cid: int) -> int:
        return self._cones[cid].dim

    def faces_of(self, cid: int) -> frozenset[int]:
        """Ids of all faces of a cone, including the cone itself."""
        return self._faces[cid]

    def is_face(self, face: int, cid: int) -> bool:
        return face in self._faces[cid]

    @cached_property
    def cofaces(self) -> tuple[frozenset[int], ...]:
        up: list[set[int]] = [set() for _ in self._cones]
        for cid, fs in enumerate(self._faces):
            for f in fs:
                up[f].add(cid)
        return tuple(frozenset(u) for u in up)

    @property
    def zero_id(self) -> int:
        return self.index[frozenset()]

    def ray_cone_id(self, ray: int) -> int:
        return self.index[frozenset({ray})]

    def find(self, ray_ids: Iterable[int]) -> Optional[int]:
        return self.index.get(frozenset(ray_ids))

    def maximal_cones(self) -> list[int]:
        return [c for c in self if len(self.cofaces[c]) == 1]

    def cone_label(self, cid: int) -> str:
        names = [self.ray_names[i] for i in sorted(self.cone_keys[cid])]
        return "{" + ",".join(names) + "}" if names else "{0}"

    def cone_names(self, cid: int) -> list[str]:
        return [self.ray_names[i] for i in sorted(self.cone_keys[cid])]

    def ray_vectors(self, cid: int) -> list[Vector]:
        return [self.rays[i] for i in sorted(self.cone_keys[cid])]

    def is_smooth(self) -> bool:
        return all(c.is_smooth() for c in self._cones)

    @cached_property
    def fingerprints(self) -> tuple[tuple, ...]:
        return tuple(c.fingerprint() for c in self._cones)

    def dimension(self) -> int:
        return max(c.dim for c in self._cones)

    # -- geometry (fans) -------------------------------------------------

    def cones_containing_point(self, x: Sequence) -> list[int]:
        return [cid for cid, c in enumerate(self._cones) if c.relint_contains(x)]

    def minimal_cone_containing(self, x: Sequence) -> Optional[int]:
        """The cone whose relative interior contains x (a fan has at most one)."""
        hits = self.cones_containing_point(x)
        if not hits:
            return None
        return min(hits, key=lambda c: self._cones[c].dim)

    def minimal_cone_containing_cone(self, c: Cone) -> Optional[int]:
        return self.minimal_cone_containing(c.relint_point())

    def star(self, cid: int) -> "IsotropicComplex":
        if not 0 <= cid < len(self):
            raise KeyError(f"unknown cone id {cid}")
        return IsotropicComplex(self, cid, self.cofaces[cid])

    def _check_fan(self) -> None:
        maxes = self.maximal_cones()
        for a, b in combinations(maxes, 2):
            inter = intersect_cones(self._cones[a], self._cones[b])
            ka, kb = self.cone_keys[a], self.cone_keys[b]
            common = ka & kb
            common_cone = Cone([self.rays[i] for i in sorted(common)], self.rank) if common else Cone.zero(self.rank)
            if set(inter.rays) != set(common_cone.rays) or self.index.get(common) is None \
                    or not (self.index[common] in self._faces[a] and self.index[common] in self._faces[b]):
                raise FanError(
                    f"cones {self.cone_label(a)} and {self.cone_label(b)} meet in a cone "
                    f"spanned by {[list(r) for r in inter.rays]}, which is not a common face")

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "rays": {n: list(r) for n, r in zip(self.ray_names, self.rays)},
            "cones": [self.cone_names(c) for c in self.maximal_cones()],
        }

    def __repr__(self) -> str:
        return f"ConeComplex(rank={self.rank}, cones={len(self)}, flavor={self.flavor!r})"


def _face_cone(c: Cone, S: Iterable[int]) -> Cone:
    rays = [c.rays[i] for i in sorted(S)]
    if not c.has_custom_lattice or not rays:
        return Cone(rays, c.n)
    # the face lattice is the parent lattice intersected with the face span
    B = c.lattice_basis
    coords = [coordinates(B, r) for r in rays]
    sat = saturation_basis(coords, B.ncols)
    return Cone(rays, c.n, lattice_basis=B @ sat)


def intersect_cones(a: Cone, b: Cone) -> Cone:
    """Intersection of two cones in the same ambient lattice."""
    ineqs = list(a.inequalities) + list(b.inequalities)
    for e in list(a.equations) + list(b.equations):
        ineqs.append(e)
        ineqs.append(tuple(-x for x in e))
    lin, rays = double_description(ineqs, a.n)
    if lin:
        raise ConeError("intersection of strictly convex cones has lineality")
    return Cone.generated_by(rays, a.n) if rays else Cone.zero(a.n)


@dataclass(frozen=True)
class IsotropicComplex:
    """The star of a cone: all cones having ``apex_id`` as a face."""

    base: ConeComplex
    apex_id: int
    members: frozenset[int]

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def build_fan(rank: int, rays: Mapping[str, Sequence[int]] | Sequence[Sequence[int]],
              cones: Iterable[Iterable], lattices: Optional[Mapping[int, IntMatrix]] = None) -> ConeComplex:
    """Build an embedded fan from named rays and cones given by ray names (or indices).

    ``lattices`` optionally maps the position of a cone in ``cones`` to an
    explicit basis for its lattice.
    """
    if isinstance(rays, Mapping):
        names = list(rays.keys())
        vectors = [tuple(rays[n]) for n in names]
    else:
        vectors = [tuple(r) for r in rays]
        names = [f"r{i}" for i in range(len(vectors))]
    pos = {n: i for i, n in enumerate(names)}
    for n, v in zip(names, vectors):
        if len(v) != rank:
            raise FanError(f"ray {n} has {len(v)} coordinates, expected {rank}")
        if not any(v):
            raise ConeError(f"ray {n} is zero")
        if primitive(v) != v:
            raise ConeError(f"ray {n} = {list(v)} is not primitive")
    gens = []
    lat = {}
    for k, c in enumerate(cones):
        ids = []
        for r in c:
            if isinstance(r, str):
                if r not in pos:
                    raise FanError(f"cone {k} refers to unknown ray {r!r}")
                ids.append(pos[r])
            else:
                ids.append(int(r))
        g = frozenset(ids)
        gens.append(g)
        if lattices and k in lattices:
            lat[g] = lattices[k]
    return ConeComplex(rank, vectors, gens, FAN, ray_names=names, lattices=lat)


def fan_from_cones(rank: int, cones: Iterable[Cone], flavor: str = FAN, check: bool = True) -> ConeComplex:
    """Build a complex from Cone objects, identifying rays by their vectors."""
    vectors: list[Vector] = []
    where: dict[Vector, int] = {}
    gens = []
    for c in cones:
        ids = []
        for r in c.rays:
            if r not in where:
                where[r] = len(vectors)
                vectors.append(r)
            ids.append(where[r])
        gens.append(frozenset(ids))
    return ConeComplex(rank, vectors, gens, flavor, check=check)


def quotient_complex(sigma: ConeComplex, cid: int) -> ConeComplex:
    """The reduced star Σ/σ: images of the star cones in N / N_σ.

    The rays of τ/σ are the images of the faces of τ of dimension dim σ + 1
    containing σ.  ``origin`` maps each quotient cone to the star cone it came
    from, and ``quotient_map`` holds the lattice projection used.
    """
    apex = sigma.cone(cid)
    qmap = quotient(sigma.ambient, apex.lattice_basis)
    d0 = apex.dim
    star = sorted(sigma.cofaces[cid], key=lambda c: (sigma.dim(c), sorted(sigma.cone_keys[c])))
    next_up = [c for c in star if sigma.dim(c) == d0 + 1]
    ray_of = {c: i for i, c in enumerate(next_up)}
    vectors = []
    names = []
    for c in next_up:
        img = primitive(qmap.project(sigma.cone(c).relint_point()))
        vectors.append(img)
        extra = sorted(sigma.cone_keys[c] - sigma.cone_keys[cid])
        names.append("+".join(sigma.ray_names[i] for i in extra))
    gens = []
    origin = {}
    for t in star:
        g = frozenset(ray_of[e] for e in next_up if e in sigma.faces_of(t))
        gens.append(g)
        origin[g] = t
    if not gens:
        gens = [frozenset()]
    out = ConeComplex(qmap.quotient.rank, vectors, gens, ABSTRACT, ray_names=names, origin=origin)
    for q in out:
        t = out.origin.get(q)
        if t is None:
            raise FanError("quotient cone without a source cone")
        if out.dim(q) != sigma.dim(t) - d0:
            raise FanError("quotient cone has the wrong dimension")
        img = Cone.generated_by([qmap.project(r) for r in sigma.cone(t).rays], qmap.quotient.rank) \
            if sigma.cone(t).rays else Cone.zero(qmap.quotient.rank)
        if set(img.rays) != set(out.cone(q).rays):
            raise FanError("quotient cone is not the image of its source cone")
    if len(out) != len(star):
        raise FanError("quotient complex does not match the star")
    out.quotient_map = qmap  # type: ignore[attr-defined]
    out.parent_apex = cid  # type: ignore[attr-defined]
    return out


def product_complex(a: ConeComplex, b: ConeComplex) -> ConeComplex:
    """Product complex in the block ambient lattice Z^(rank a) x Z^(rank b)."""
    na, nb = a.rank, b.rank
    vectors = [r + (0,) * nb for r in a.rays] + [(0,) * na + r for r in b.rays]
    names = list(a.ray_names) + list(b.ray_names)
    off = len(a.rays)
    gens = []
    origin = {}
    for ca in a:
        for cb in b:
            g = frozenset(a.cone_keys[ca]) | frozenset(off + j for j in b.cone_keys[cb])
            gens.append(g)
            origin[g] = (ca, cb)
    flavor = FAN if a.flavor == FAN and b.flavor == FAN else ABSTRACT
    out = ConeComplex(na + nb, vectors, gens, flavor, ray_names=names, origin=origin, check=False)
    if len(out) != len(a) * len(b):
        raise FanError("product complex has the wrong number of cones")
    return out


def star_subdivide(fan: ConeComplex, x: Sequence[int], name: Optional[str] = None) -> ConeComplex:
    """Stellar subdivision of an embedded fan at the primitive lattice point x."""
    x = primitive(tuple(int(t) for t in x))
    c0 = fan.minimal_cone_containing(x)
    if c0 is None:
        raise FanError("subdivision point is outside the support")
    if fan.dim(c0) == 1:
        return fan
    vectors = list(fan.rays) + [x]
    names = list(fan.ray_names) + [name or f"r{len(fan.rays)}"]
    new = len(fan.rays)
    gens = []
    for cid in fan.maximal_cones():
        if c0 not in fan.faces_of(cid):
            gens.append(fan.cone_keys[cid])
            continue
        for f in fan.faces_of(cid):
            if c0 in fan.faces_of(f):
                continue
            # keep only faces that are maximal among those avoiding c0
            gens.append(fan.cone_keys[f] | {new})
    return ConeComplex(fan.rank, vectors, gens, FAN, ray_names=names)
