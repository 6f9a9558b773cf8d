from __future__ import annotations

import pytest

from helpers import brute_force_face_sets, orthant_fan
from tropex.complex import (
    ABSTRACT,
    Cone,
    ComplexIso,
    build_fan,
    faces,
    find_isomorphism_over_base,
    is_smooth,
    product_complex,
    quotient_complex,
    search_limit,
    star,
    star_subdivide,
    verify_isomorphism,
)
from tropex.complex.iso import DEFAULT_SEARCH_LIMIT
from tropex.errors import ConeError, FanError, InputError, SearchBudgetExhausted
from tropex.lattice import IntMatrix

SQUARE = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]


def p1_fan():
    return build_fan(1, {"up": (1,), "down": (-1,)}, [["up"], ["down"]])


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("rays, n, msg", [
    ([(2, 0)], 2, "primitive"),
    ([(0, 0)], 2, "zero"),
    ([(1, 0), (1, 0)], 2, "repeated"),
    ([(1, 0), (1, 1), (0, 1)], 2, "redundant"),
    ([(1, 0), (-1, 0)], 2, "strictly convex"),
    ([(1, 0, 0)], 2, "coordinates"),
])
def test_cone_rejects_bad_generators(rays, n, msg):
    with pytest.raises(ConeError, match=msg):
        Cone(rays, n)


def test_generated_by_removes_redundancy():
    c = Cone.generated_by([(2, 0), (1, 1), (0, 3), (1, 0)], 2)
    assert c.rays == ((0, 1), (1, 0))
    with pytest.raises(ConeError):
        Cone.generated_by([(1, 0), (-1, 0), (0, 1)], 2)


@pytest.mark.parametrize("rays, n, count", [
    ([(1, 0), (0, 1)], 2, 4),
    ([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3, 8),
    (SQUARE, 3, 10),
    ([], 2, 1),
    ([(1, 2)], 2, 2),
])
def test_face_counts(rays, n, count):
    c = Cone(rays, n)
    fs = faces(c)
    assert len(fs) == count
    # [DERIVED] against supporting hyperplanes found by brute force
    assert {frozenset(f.rays) for f in fs} == brute_force_face_sets(rays, n)


def test_square_cone_face_sizes():
    sizes = sorted(len(f.rays) for f in faces(Cone(SQUARE, 3)))
    assert sizes == [0, 1, 1, 1, 1, 2, 2, 2, 2, 4]


@pytest.mark.parametrize("rays, n, smooth", [
    ([(1, 0), (0, 1)], 2, True),
    ([(1, 0), (1, 2)], 2, False),
    (SQUARE, 3, False),
    ([(1, 1, 0)], 3, True),
    ([], 3, True),
])
def test_is_smooth(rays, n, smooth):
    assert is_smooth(Cone(rays, n)) is smooth


def test_multiplicity_and_fingerprint():
    c = Cone([(1, 0), (1, 2)], 2)
    assert c.multiplicity == 2
    assert c.fingerprint() == (2, 2, False, 2)


def test_custom_lattice_checks():
    # lattice spanned by 2 * standard generators does not contain the ray
    with pytest.raises(ConeError, match="lattice"):
        Cone([(0, 1, 0)], 3, lattice_basis=IntMatrix.from_columns([(0, 2, 0)], 3))
    c = Cone([(1, 0), (0, 1)], 2, lattice_basis=IntMatrix.from_columns([(1, 0), (0, 1)], 2))
    assert c.has_custom_lattice and c.is_smooth()


def test_membership_and_minimal_face():
    c = Cone([(1, 0), (0, 1)], 2)
    assert c.contains((2, 3)) and not c.contains((-1, 1))
    assert c.relint_contains((1, 1)) and not c.relint_contains((1, 0))
    assert c.minimal_face_containing((3, 0)) == frozenset({c.rays.index((1, 0))})
    assert c.minimal_face_containing((0, 0)) == frozenset()


def test_h_representation_of_square_cone():
    c = Cone(SQUARE, 3)
    assert len(c.inequalities) == 4
    for a in c.inequalities:
        vals = [sum(x * y for x, y in zip(a, r)) for r in SQUARE]
        assert min(vals) == 0 and sorted(vals).count(0) == 2


# ---------------------------------------------------------------------------
# Fans and complexes
# ---------------------------------------------------------------------------

def test_quadrant_fan_has_four_cones():
    q = orthant_fan(2)
    assert len(q) == 4
    assert [q.dim(c) for c in q] == [0, 1, 1, 2]


def test_octant_fan_has_eight_cones():
    assert len(orthant_fan(3)) == 8


def test_overlapping_cones_are_rejected():
    with pytest.raises(FanError):
        build_fan(2, [(1, 0), (1, 2), (1, 1), (0, 1)], [[0, 1], [2, 3]])


def test_empty_cone_list_gives_zero_cone():
    f = build_fan(2, {}, [])
    assert len(f) == 1 and f.dim(f.zero_id) == 0


def test_unknown_ray_name():
    with pytest.raises((FanError, InputError, KeyError)):
        build_fan(2, {"a": (1, 0)}, [["a", "b"]])


def test_fan_of_p2_is_complete_and_smooth():
    f = build_fan(2, {"a": (1, 0), "b": (0, 1), "c": (-1, -1)}, [["a", "b"], ["b", "c"], ["c", "a"]])
    assert len(f) == 7 and f.is_smooth()
    assert f.minimal_cone_containing((-3, -1)) == f.find([1, 2])


def test_star_examples():
    q = orthant_fan(2)
    assert star(q, q.zero_id).members == frozenset(q)
    top = q.maximal_cones()[0]
    assert star(q, top).members == frozenset({top})
    l2 = q.ray_cone_id(q.ray_names.index("l2"))
    assert star(q, l2).members == frozenset({l2, top})
    assert star(q, l2).apex_id == l2


def test_quotient_of_quadrant_by_ray():
    q = orthant_fan(2)
    l2 = q.ray_cone_id(q.ray_names.index("l2"))
    Q = quotient_complex(q, l2)
    assert Q.flavor == ABSTRACT
    assert Q.rank == 1 and len(Q) == 2
    assert [abs(r[0]) for r in Q.rays] == [1]


def test_quotient_of_octant_by_ray_is_quadrant():
    o = orthant_fan(3)
    l1 = o.ray_cone_id(o.ray_names.index("l1"))
    Q = quotient_complex(o, l1)
    assert Q.rank == 2 and len(Q) == 4
    res = find_isomorphism_over_base(Q, orthant_fan(2))
    assert res.iso is not None


def test_quotient_by_zero_is_isomorphic_to_sigma():
    f = build_fan(2, {"a": (1, 0), "b": (1, 2), "c": (-1, 0)}, [["a", "b"], ["b", "c"]])
    Q = quotient_complex(f, f.zero_id)
    res = find_isomorphism_over_base(Q, f)
    assert res.iso is not None
    assert verify_isomorphism(Q, f, res.iso) == []


def test_quotient_dimension_law():
    f = orthant_fan(3)
    for c in f:
        Q = quotient_complex(f, c)
        for cid in Q:
            assert Q.dim(cid) == f.dim(Q.origin[cid]) - f.dim(c)


def test_product_counts():
    a1 = build_fan(1, {"r": (1,)}, [["r"]])
    assert len(product_complex(a1, p1_fan())) == 6
    assert len(product_complex(a1, a1)) == 4
    zero = build_fan(0, {}, [])
    P = product_complex(orthant_fan(2), zero)
    assert find_isomorphism_over_base(P, orthant_fan(2)).iso is not None


def test_identity_isomorphism():
    f = orthant_fan(2)
    res = find_isomorphism_over_base(f, f)
    assert res.iso is not None
    assert verify_isomorphism(f, f, res.iso) == []


def test_isomorphism_absent_on_count_mismatch():
    res = find_isomorphism_over_base(orthant_fan(2), p1_fan())
    assert res.iso is None and "cone counts differ" in res.obstruction


def test_isomorphism_respects_projection():
    # the two rays of P1 are swapped by x -> -x, but not over the identity projection
    f = p1_fan()
    Id = IntMatrix.identity(1)
    res = find_isomorphism_over_base(f, f, Id, Id)
    assert res.iso is not None
    assert verify_isomorphism(f, f, res.iso, Id, Id) == []
    bad = ComplexIso({c: c for c in f}, {0: 1, 1: 0}, {})
    assert verify_isomorphism(f, f, bad) != []


def test_search_budget(monkeypatch):
    a = build_fan(2, {"a": (1, 0), "b": (0, 1), "c": (-1, -1)}, [["a", "b"], ["b", "c"], ["c", "a"]])
    with pytest.raises(SearchBudgetExhausted):
        find_isomorphism_over_base(a, a, limit=1)
    monkeypatch.setenv("TROPEX_SEARCH_LIMIT", "5")
    assert search_limit() == 5
    monkeypatch.setenv("TROPEX_SEARCH_LIMIT", "many")
    with pytest.raises(InputError):
        search_limit()
    monkeypatch.delenv("TROPEX_SEARCH_LIMIT")
    assert search_limit() == DEFAULT_SEARCH_LIMIT == 10**6


def test_star_subdivision_of_quadrant():
    q = orthant_fan(2)
    s = star_subdivide(q, (1, 1), "m")
    assert len(s) == 6
    assert len(s.maximal_cones()) == 2
    assert s.is_smooth()
    with pytest.raises(FanError):
        star_subdivide(q, (-1, 1))


def test_to_dict_lists_maximal_cones():
    d = orthant_fan(2).to_dict()
    assert d == {"rank": 2, "rays": {"l1": [1, 0], "l2": [0, 1]}, "cones": [["l1", "l2"]]}
