"""Shared fixtures, random generators and independent oracles for the tests.

The oracles here deliberately avoid the library's own algorithms: linear
algebra is redone with plain Fraction elimination, faces are found by
brute-force supporting hyperplanes and invariant factors come from
determinantal divisors.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from pathlib import Path

from tropex import fixture_path
from tropex.complex import ConeComplex, Cone, build_fan, star_subdivide
from tropex.document import load_expansion, parse_input
from tropex.errors import ConeError, ValidationFailure
from tropex.expansion import build_expansion, product_target
from tropex.lattice import IntMatrix

ROOT = Path(__file__).resolve().parent.parent


def fixture(name: str):
    return load_expansion(parse_input(str(fixture_path(name))))


def fixture_json(name: str) -> dict:
    return json.loads(Path(str(fixture_path(name))).read_text())


def orthant_fan(n: int, names=None) -> ConeComplex:
    names = names or [f"l{i + 1}" for i in range(n)]
    rays = {names[i]: tuple(int(i == j) for j in range(n)) for i in range(n)}
    return build_fan(n, rays, [names] if n else [])


def orthant_cone(m: int) -> Cone:
    return Cone([tuple(int(i == j) for j in range(m)) for i in range(m)], m)


# ---------------------------------------------------------------------------
# Plain rational linear algebra (oracle side)
# ---------------------------------------------------------------------------

def q_rank(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def q_nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Basis of {u : r . u = 0 for every row r}."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        u = [Fraction(0)] * ncols
        u[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            u[pc] = -m[i][fc]
        basis.append(u)
    return basis


def q_solve(cols, b):
    """Some rational x with sum x_j cols[j] = b, or None."""
    n = len(b)
    k = len(cols)
    aug = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(b[i])] for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        aug[r] = [x / aug[r][c] for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * bb for a, bb in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][k] != 0 for i in range(r, n)):
        return None
    x = [Fraction(0)] * k
    for i, pc in enumerate(pivots):
        x[pc] = aug[i][k]
    return x


def laplace_det(m) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * laplace_det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(n) if m[0][j])


def determinantal_factors(rows) -> list[int]:
    """Invariant factors from gcds of k x k minors."""
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    d = [1]
    for k in range(1, min(nr, nc) + 1):
        g = 0
        for R in combinations(range(nr), k):
            for C in combinations(range(nc), k):
                g = gcd(g, laplace_det([[rows[i][j] for j in C] for i in R]))
        if g == 0:
            break
        d.append(g)
    return [d[i] // d[i - 1] for i in range(1, len(d))]


# ---------------------------------------------------------------------------
# Face oracle
# ---------------------------------------------------------------------------

def brute_force_face_sets(rays, n: int) -> set[frozenset]:
    """Faces of cone(rays) as sets of ray vectors, via supporting hyperplanes.

    Every facet is spanned by dim-1 independent rays; for each such subset
    the hyperplane through it (inside the linear span of the cone) is a
    facet exactly when all rays lie weakly on one side.  Faces are the
    intersections of facets.
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        return {frozenset()}
    d = q_rank(rays)
    facets = set()
    for T in combinations(range(len(rays)), d - 1):
        T_rays = [rays[i] for i in T]
        if q_rank(T_rays) != d - 1:
            continue
        for u in q_nullspace(T_rays, n):
            vals = [sum(a * b for a, b in zip(u, r)) for r in rays]
            if any(vals):
                if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                    facets.add(frozenset(r for r, v in zip(rays, vals) if v == 0))
                break
    faces = {frozenset(rays)}
    frontier = set(facets)
    while frontier:
        faces |= frontier
        frontier = {a & b for a in faces for b in facets} - faces
    return faces


# ---------------------------------------------------------------------------
# Random objects
# ---------------------------------------------------------------------------

def random_cone(rng: random.Random, max_rank: int = 4, max_rays: int = 6) -> Cone:
    while True:
        n = rng.randint(1, max_rank)
        k = rng.randint(1, max_rays)
        vecs = [tuple(rng.randint(-1, 2) for _ in range(n)) for _ in range(k)]
        if not any(any(v) for v in vecs):
            continue
        try:
            return Cone.generated_by(vecs, n)
        except ConeError:
            continue


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> list[list[int]]:
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            if rng.random() < 0.5:
                M = [[-x for x in row] for row in M]
            continue
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-2, 2)
        M[i] = [a + q * b for a, b in zip(M[i], M[j])]
        if rng.random() < 0.2:
            M[i], M[j] = M[j], M[i]
    return M


def random_simplicial_fan(rng: random.Random, max_rays: int = 8) -> ConeComplex:
    """A simplicial fan spanning its ambient space, by stellar subdivisions."""
    d = rng.choice([1, 2, 2, 3, 3])
    kind = rng.choice(["complete", "orthant", "mixed"])
    basis = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    if kind == "complete":
        neg = tuple(-1 for _ in range(d))
        rays = basis + [neg]
        cones = [[j for j in range(d + 1) if j != i] for i in range(d + 1)]
    elif kind == "orthant" or d == 1:
        rays = basis
        cones = [list(range(d))]
    else:
        rays = basis + [tuple(-x for x in basis[0])]
        cones = [list(range(d)), [d] + list(range(1, d))]
    M = random_unimodular(rng, d)
    rays = [tuple(sum(M[i][k] * r[k] for k in range(d)) for i in range(d)) for r in rays]
    fan = build_fan(d, rays, cones)
    for step in range(rng.randint(0, 4)):
        if len(fan.rays) >= max_rays:
            break
        big = [c for c in fan if fan.dim(c) >= 2]
        if not big:
            break
        c = rng.choice(big)
        x = [0] * d
        for r in fan.cone_keys[c]:
            w = rng.randint(1, 2)
            x = [a + w * b for a, b in zip(x, fan.rays[r])]
        fan = star_subdivide(fan, x, f"x{step}")
    return fan


def random_expansion(rng: random.Random):
    """A valid expansion of an orthant fan over an orthant τ, or None."""
    n = rng.choice([0, 1, 1, 2, 2, 2, 3])
    m = rng.choice([1, 1, 1, 2])
    sigma = orthant_fan(n)
    tau = orthant_cone(m)
    names = [f"e{i + 1}" for i in range(m)]
    target = product_target(sigma, tau, names)
    ups = ConeComplex(target.rank, target.rays, [target.cone_keys[c] for c in target.maximal_cones()],
                      ray_names=target.ray_names)
    for step in range(rng.randint(0, 3)):
        big = [c for c in ups if ups.dim(c) >= 2]
        if not big:
            break
        c = rng.choice(big)
        keys = sorted(ups.cone_keys[c])
        x = [0] * ups.rank
        for r in keys:
            # weight 2 on a τ-ray would break reducedness, so only Σ-rays get it
            w = rng.choice([1, 1, 1, 2]) if any(ups.rays[r][:n]) else 1
            x = [a + w * b for a, b in zip(x, ups.rays[r])]
        ups = star_subdivide(ups, x, f"x{step}")
    try:
        return build_expansion(sigma, tau, ups, names)
    except ValidationFailure:
        return None


def lattice_points_box(n: int, k: int):
    return product(range(-k, k + 1), repeat=n)


def int_matrix(rows, ncols=None) -> IntMatrix:
    return IntMatrix.from_rows(rows, ncols=ncols)
