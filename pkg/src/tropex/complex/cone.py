"""Rational polyhedral cones with exact double description."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Optional, Sequence

from ..errors import ConeError
from ..lattice import (
    IntMatrix,
    Lattice,
    Vector,
    coordinates,
    dot,
    invariant_factors,
    primitive,
    rank,
    saturation_basis,
)


def double_description(inequalities: Sequence[Sequence[int]], n: int) -> tuple[list[Vector], list[Vector]]:
    """Generators of the cone {y in R^n : a·y >= 0 for every a}.

    Returns ``(lineality, rays)``: a basis of the lineality space and one
    primitive integer vector per extreme ray of the pointed quotient.  This is
    the incremental Motzkin scheme with the combinatorial adjacency test; the
    lineality space is carried separately so that the remaining rays always
    describe a pointed cone.
    """
    lineality: list[Vector] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: list[Vector] = []
    zeros: list[frozenset[int]] = []
    for k, a in enumerate(inequalities):
        a = tuple(a)
        p_idx = next((i for i, l in enumerate(lineality) if dot(a, l) != 0), None)
        if p_idx is not None:
            pivot = lineality[p_idx]
            s = dot(a, pivot)
            if s < 0:
                pivot = tuple(-x for x in pivot)
                s = -s
            new_lin = []
            for i, l in enumerate(lineality):
                if i == p_idx:
                    continue
                t = dot(a, l)
                w = primitive(tuple(s * x - t * y for x, y in zip(l, pivot)))
                if any(w):
                    new_lin.append(w)
            new_rays = []
            for r, z in zip(rays, zeros):
                t = dot(a, r)
                new_rays.append(primitive(tuple(s * x - t * y for x, y in zip(r, pivot))))
            zeros = [z | {k} for z in zeros]
            # the pivot is tight on every earlier inequality
            rays = new_rays + [pivot]
            zeros = zeros + [frozenset(range(k))]
            lineality = new_lin
            continue
        vals = [dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        new_rays = [rays[i] for i in pos] + [rays[i] for i in zer]
        new_zeros = [zeros[i] for i in pos] + [zeros[i] | {k} for i in zer]
        for i in pos:
            for j in neg:
                common = zeros[i] & zeros[j]
                adjacent = True
                for t in range(len(rays)):
                    if t != i and t != j and common <= zeros[t]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                w = primitive(tuple(vals[i] * x - vals[j] * y for x, y in zip(rays[j], rays[i])))
                new_rays.append(w)
                new_zeros.append(common | {k})
        rays, zeros = new_rays, new_zeros
    return lineality, rays


class Cone:
    """A strictly convex rational polyhedral cone in Z^n.

    ``rays`` must be primitive, pairwise distinct and all extremal; use
    :meth:`generated_by` to normalise an arbitrary generating set.  The cone's
    lattice defaults to the saturation of its linear span; an explicit basis
    can be given in ``lattice_basis`` (its columns), which is how non-saturated
    cone lattices are represented.
    """

    def __init__(self, rays: Iterable[Sequence[int]], n: int, lattice_basis: Optional[IntMatrix] = None):
        self.n = int(n)
        self.rays: tuple[Vector, ...] = tuple(tuple(int(x) for x in r) for r in rays)
        for r in self.rays:
            if len(r) != self.n:
                raise ConeError(f"ray {list(r)} does not have {self.n} coordinates")
            if not any(r):
                raise ConeError("the zero vector is not a ray")
            if primitive(r) != r:
                raise ConeError(f"ray {list(r)} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise ConeError("repeated ray")
        if not self.is_strictly_convex():
            raise ConeError(f"cone generated by {[list(r) for r in self.rays]} is not strictly convex")
        for i, r in enumerate(self.rays):
            if not self._is_extremal(i):
                raise ConeError(f"ray {list(r)} is redundant")
        if lattice_basis is not None:
            if lattice_basis.nrows != self.n or lattice_basis.ncols != self.dim:
                raise ConeError("cone lattice basis has the wrong shape")
            if rank(lattice_basis.columns()) != self.dim or rank(list(self.rays) + lattice_basis.columns()) != self.dim:
                raise ConeError("cone lattice does not span the cone")
            for r in self.rays:
                if coordinates(lattice_basis, r) is None:
                    raise ConeError(f"ray {list(r)} is not in the declared cone lattice")
        self._lattice_basis = lattice_basis

    # -- constructors -----------------------------------------------------

    @classmethod
    def generated_by(cls, vectors: Iterable[Sequence[int]], n: int) -> "Cone":
        """The cone spanned by arbitrary nonzero generators (redundancy removed)."""
        prim = []
        for v in vectors:
            v = tuple(int(x) for x in v)
            if len(v) != n:
                raise ConeError(f"generator {list(v)} does not have {n} coordinates")
            if any(v):
                p = primitive(v)
                if p not in prim:
                    prim.append(p)
        ineqs, eqs = _facets_of(prim, n)
        lin_rank = rank(list(ineqs) + list(eqs)) if (ineqs or eqs) else 0
        if prim and lin_rank < n:
            raise ConeError(f"cone generated by {[list(v) for v in prim]} is not strictly convex")
        keep = [v for v in prim if _extremal(v, ineqs, eqs, n)]
        return cls(sorted(keep), n)

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls((), n)

    # -- H-representation -------------------------------------------------

    @cached_property
    def _hrep(self) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
        ineqs, eqs = _facets_of(list(self.rays), self.n)
        return tuple(ineqs), tuple(eqs)

    @property
    def inequalities(self) -> tuple[Vector, ...]:
        """Primitive inward facet normals."""
        return self._hrep[0]

    @property
    def equations(self) -> tuple[Vector, ...]:
        """A basis of the annihilator of the linear span."""
        return self._hrep[1]

    def is_strictly_convex(self) -> bool:
        if not self.rays:
            return True
        return rank(list(self.inequalities) + list(self.equations)) == self.n

    def _is_extremal(self, i: int) -> bool:
        return _extremal(self.rays[i], self.inequalities, self.equations, self.n)

    # -- basic invariants ------------------------------------------------

    @property
    def ambient(self) -> Lattice:
        return Lattice(self.n)

    @cached_property
    def dim(self) -> int:
        return rank(self.rays)

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.dim)

    @cached_property
    def lattice_basis(self) -> IntMatrix:
        """Columns form a basis of the cone's lattice N_σ inside Z^n."""
        if self._lattice_basis is not None:
            return self._lattice_basis
        return saturation_basis(list(self.rays), self.n)

    @property
    def has_custom_lattice(self) -> bool:
        return self._lattice_basis is not None

    def ray_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.rays, self.n)

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    @cached_property
    def multiplicity(self) -> int:
        """Index of the sublattice generated by the rays inside N_σ."""
        if not self.rays:
            return 1
        coords = [coordinates(self.lattice_basis, r) for r in self.rays]
        out = 1
        for d in invariant_factors(IntMatrix.from_columns(coords, self.dim)):
            out *= d
        return out

    def is_smooth(self) -> bool:
        return self.is_simplicial() and self.multiplicity == 1

    def fingerprint(self) -> tuple[int, int, bool, int]:
        return (self.dim, len(self.rays), self.is_smooth(), self.multiplicity)

    # -- membership ------------------------------------------------------

    def contains(self, x: Sequence) -> bool:
        if any(dot(e, x) != 0 for e in self.equations):
            return False
        return all(dot(a, x) >= 0 for a in self.inequalities)

    def relint_contains(self, x: Sequence) -> bool:
        if any(dot(e, x) != 0 for e in self.equations):
            return False
        return all(dot(a, x) > 0 for a in self.inequalities)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays)

    def relint_point(self) -> Vector:
        """Sum of the ray generators; an integral point of the relative interior."""
        return tuple(sum(col) for col in zip(*self.rays)) if self.rays else (0,) * self.n

    # -- faces -----------------------------------------------------------

    @cached_property
    def facet_ray_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(i for i, r in enumerate(self.rays) if dot(a, r) == 0) for a in self.inequalities)

    @cached_property
    def face_ray_sets(self) -> tuple[frozenset[int], ...]:
        """Every face as the set of indices of the rays it contains, sorted by size."""
        full = frozenset(range(len(self.rays)))
        found = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for S in frontier:
                for F in self.facet_ray_sets:
                    T = S & F
                    if T != S and T not in found:
                        found.add(T)
                        nxt.append(T)
            frontier = nxt
        return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))

    def is_face_set(self, idx: Iterable[int]) -> bool:
        return frozenset(idx) in set(self.face_ray_sets)

    def face(self, idx: Iterable[int]) -> "Cone":
        idx = sorted(idx)
        return Cone([self.rays[i] for i in idx], self.n)

    def faces(self) -> list["Cone"]:
        return [self.face(s) for s in self.face_ray_sets]

    def minimal_face_containing(self, x: Sequence) -> frozenset[int]:
        """Rays of the smallest face containing a point of the cone."""
        if not self.contains(x):
            raise ConeError("point is not in the cone")
        tight = [F for a, F in zip(self.inequalities, self.facet_ray_sets) if dot(a, x) == 0]
        out = frozenset(range(len(self.rays)))
        for F in tight:
            out &= F
        return out

    # -- maps ------------------------------------------------------------

    def image(self, M: IntMatrix) -> "Cone":
        """The cone generated by the images of the rays under M."""
        return Cone.generated_by([M @ r for r in self.rays], M.nrows)

    def same_as(self, other: "Cone") -> bool:
        return self.n == other.n and set(self.rays) == set(other.rays)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cone) and self.same_as(other)

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.rays)))

    def __repr__(self) -> str:
        return f"Cone({[list(r) for r in self.rays]}, n={self.n})"


def _facets_of(generators: list[Vector], n: int) -> tuple[list[Vector], list[Vector]]:
    """Facet normals and equations of the cone spanned by ``generators``."""
    lin, rays = double_description(generators, n)
    return sorted(rays), lin


def _extremal(v: Sequence[int], ineqs: Sequence[Vector], eqs: Sequence[Vector], n: int) -> bool:
    tight = [a for a in ineqs if dot(a, v) == 0]
    return rank(list(tight) + list(eqs)) == n - 1

