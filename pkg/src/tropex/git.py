"""Cox presentations and fibrewise GIT data for fibre fans."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .complex import ConeComplex
from .divisor import FormalSum, MixingCollection, add_sums, clean, format_sum
from .errors import InputError
from .lattice import IntMatrix, rank, smith_normal_form, solve_integer_linear


@dataclass
class CoxPresentation:
    """0 -> M -> Z^{Φ(1)} -> Cl -> 0 for a simplicial spanning fan.

    ``divisor_map`` has one row per ray (m ↦ ⟨m, v_ρ⟩).  ``projection_to_class``
    maps Z^{Φ(1)} onto the free part of Cl; ``torsion_rows[i]`` is read modulo
    ``torsion[i]``.
    """

    fan: ConeComplex
    ray_count: int
    divisor_map: IntMatrix
    class_rank: int
    torsion: tuple[int, ...]
    projection_to_class: IntMatrix
    torsion_rows: IntMatrix

    @property
    def group(self) -> dict:
        """G = Hom(Cl, G_m) reported as a torus rank and finite factors."""
        return {"torus_rank": self.class_rank, "finite_factors": list(self.torsion)}


def _check_fan(fan: ConeComplex) -> None:
    for c in fan:
        if not fan.cone(c).is_simplicial():
            raise InputError(f"fan is not simplicial: cone {fan.cone_label(c)}")
    if rank(list(fan.rays)) != fan.rank:
        raise InputError("fan does not span its ambient space")


def cox_presentation(fan: ConeComplex) -> CoxPresentation:
    _check_fan(fan)
    k, d = len(fan.rays), fan.rank
    D = IntMatrix.from_rows(fan.rays, ncols=d) if k else IntMatrix.zeros(0, d)
    snf = smith_normal_form(D)
    r = snf.rank
    free = snf.U.select_rows(list(range(r, k)))
    tors_idx = [i for i in range(r) if snf.invariant_factors[i] > 1]
    tors = tuple(snf.invariant_factors[i] for i in tors_idx)
    trows = snf.U.select_rows(tors_idx)
    if not (free @ D).is_zero():
        raise AssertionError("class projection does not kill the image of M")
    for row, t in zip((trows @ D).rows, tors):
        if any(x % t for x in row):
            raise AssertionError("torsion class projection does not kill the image of M")
    if free.nrows != k - d:
        raise AssertionError("rank of Cl is not |Φ(1)| - rank M")
    return CoxPresentation(fan, k, D, k - r, tors, free, trows)


@dataclass
class UnstableLocus:
    primitive_collections: list[frozenset[int]]
    names: list[list[str]] = field(default_factory=list)


def in_some_cone(fan: ConeComplex, S: frozenset[int]) -> bool:
    return any(S <= fan.cone_keys[c] for c in fan.maximal_cones())


def unstable_locus(fan: ConeComplex) -> UnstableLocus:
    """Primitive collections: minimal ray sets not contained in a single cone."""
    _check_fan(fan)
    n = len(fan.rays)
    found = []
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            S = frozenset(S)
            if in_some_cone(fan, S):
                continue
            if all(in_some_cone(fan, S - {x}) for x in S):
                found.append(S)
    names = [[fan.ray_names[i] for i in sorted(S)] for S in found]
    return UnstableLocus(found, names)


@dataclass
class FibrewiseGITData:
    cox: CoxPresentation
    unstable: UnstableLocus
    K: dict[str, FormalSum]
    L: MixingCollection
    restriction_verified: bool
    summands: list[str]
    ray_order: list[str]
    theta: str = "opaque"
    obstruction: Optional[str] = None


def _ray_order(fan: ConeComplex) -> list[int]:
    return sorted(range(len(fan.rays)), key=lambda i: fan.rays[i], reverse=True)


def verify_lift(cox: CoxPresentation, K: dict[str, FormalSum], L: MixingCollection) -> bool:
    """K(incl(m)) = L(m) for every basis character m."""
    fan = cox.fan
    for j, b in enumerate(L.basis):
        total = add_sums(*[K.get(fan.ray_names[i], {}) for i in range(len(fan.rays))],
                         scale=[fan.rays[i][j] for i in range(len(fan.rays))])
        if total != clean(L.values[b]):
            return False
    return True


def fibrewise_git(mix: MixingCollection, fan: ConeComplex) -> FibrewiseGITData:
    """Lift L along M -> Z^{Φ(1)} and package the GIT data.

    Rays are ordered by their generators, lexicographically descending.  The
    lift is supported on the first d rays (in that order) forming a lattice
    basis; if none do, a general integer solve is used.
    """
    cox = cox_presentation(fan)
    unst = unstable_locus(fan)
    if not mix.computable:
        raise InputError(f"mixing collection unavailable: {mix.reason}")
    d = fan.rank
    if len(mix.basis) != d:
        raise InputError("mixing collection is not defined on the dual lattice of the fan")
    order = _ray_order(fan)
    symbols = sorted({s for b in mix.basis for s in mix.values[b]})
    K: dict[str, dict[str, int]] = {fan.ray_names[i]: {} for i in order}
    obstruction = None
    chosen = None
    for S in combinations(order, d):
        M = IntMatrix.from_rows([fan.rays[i] for i in S], ncols=d) if d else IntMatrix.zeros(0, 0)
        if not d or abs(M.det()) == 1:
            chosen = S
            break
    for s in symbols:
        target = [mix.values[b].get(s, 0) for b in mix.basis]
        if chosen is not None:
            A = IntMatrix.from_columns([fan.rays[i] for i in chosen], d)
            sol = solve_integer_linear(A, target)
            idx = list(chosen)
        else:
            A = IntMatrix.from_columns([fan.rays[i] for i in order], d)
            sol = solve_integer_linear(A, target)
            idx = order
        if sol is None:
            obstruction = f"no integral lift for symbol {s} (class group torsion {list(cox.torsion)})"
            break
        for i, x in zip(idx, sol):
            if x:
                K[fan.ray_names[i]][s] = x
    K = {k: clean(v) for k, v in K.items()}
    ok = obstruction is None and verify_lift(cox, K, mix)
    summands = [f"O({format_sum(K[fan.ray_names[i]])})" if K[fan.ray_names[i]] else "O" for i in order]
    return FibrewiseGITData(cox, unst, K, mix, ok, summands if obstruction is None else [],
                            [fan.ray_names[i] for i in order], "opaque", obstruction)
