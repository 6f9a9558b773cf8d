from __future__ import annotations

from fractions import Fraction

import pytest

from helpers import fixture, orthant_cone, orthant_fan, q_rank
from tropex.complex import build_fan
from tropex.errors import ConeError, InputError, ValidationFailure
from tropex.expansion import (
    build_expansion,
    canonical_point,
    combinatorial_type,
    product_target,
    slice_expansion,
    slice_type,
    trivial_expansion,
    validate_open_subdivision,
)
from tropex.lattice import IntMatrix


def ray1():
    return orthant_fan(1), orthant_cone(1)


def test_trivial_subdivision_is_valid():
    sigma, tau = orthant_fan(2), orthant_cone(1)
    target = product_target(sigma, tau, ["e"])
    sub = validate_open_subdivision(target, target)
    assert all(sub.assignment[c] == c for c in target)
    assert sub.support_surjective


def test_trivial_expansion_has_one_vertex():
    exp = trivial_expansion(orthant_fan(2), orthant_cone(1), ["e"])
    (v,) = exp.vertices
    assert exp.sigma.dim(v.sigma_v) == 0
    assert v.phi_v.nrows == 0
    assert v.alias == "e"


def test_non_primitive_ray_rejected_at_build():
    with pytest.raises(ConeError, match="primitive"):
        build_fan(3, {"a": (0, 2, 0)}, [["a"]])


def test_ray_outside_declared_lattice_rejected():
    with pytest.raises(ConeError, match="lattice"):
        build_fan(3, {"a": (0, 1, 0)}, [["a"]], {0: IntMatrix.from_columns([(0, 2, 0)], 3)})


def test_non_saturated_cone_lattice():
    # the rays span an index-2 sublattice of their saturation
    sigma, tau = orthant_fan(2), orthant_cone(1)
    ups = build_fan(3, {"l1": (1, 0, 0), "w": (1, 2, 0)}, [["l1", "w"]],
                    {0: IntMatrix.from_columns([(1, 0, 0), (1, 2, 0)], 3)})
    with pytest.raises(ValidationFailure) as info:
        build_expansion(sigma, tau, ups, ["e"])
    kinds = {k for k, _, _ in info.value.issues}
    assert kinds == {"saturation"}
    assert "[2]" in str(info.value)


def test_reducedness_violation():
    # the ray (1, 2) maps onto τ = R>=0 with image lattice 2Z
    sigma, tau = ray1()
    ups = build_fan(2, {"l1": (1, 0), "w": (1, 2), "e": (0, 1)}, [["l1", "w"], ["w", "e"]])
    with pytest.raises(ValidationFailure) as info:
        build_expansion(sigma, tau, ups, ["e"])
    (issue,) = info.value.issues
    assert issue[0] == "reducedness" and "index 2" in issue[2]


def test_cone_outside_product_is_rejected():
    sigma, tau = ray1()
    ups = build_fan(2, {"a": (-1, 1)}, [["a"]])
    with pytest.raises(ValidationFailure, match="containment"):
        build_expansion(sigma, tau, ups, ["e"])


def test_flatness_violation():
    # τ = R>=0 x R>=0; a cone mapping onto the diagonal is not onto a face
    sigma, tau = orthant_fan(0), orthant_cone(2)
    ups = build_fan(2, {"e1": (1, 0), "d": (1, 1), "e2": (0, 1)}, [["e1", "d"], ["d", "e2"]])
    with pytest.raises(ValidationFailure) as info:
        build_expansion(sigma, tau, ups, ["e1", "e2"])
    assert {k for k, _, _ in info.value.issues} == {"flatness"}


def test_tau_must_be_full_dimensional():
    from tropex.complex import Cone
    with pytest.raises(InputError):
        build_expansion(orthant_fan(1), Cone([(1, 0)], 2), None)


def test_open_subdivision_is_flagged():
    sigma, tau = ray1()
    ups = build_fan(2, {"l1": (1, 0), "e": (0, 1), "w": (1, 1)}, [["l1", "w"]])
    exp = build_expansion(sigma, tau, ups, ["e"])
    assert not exp.support_surjective


def test_figure1_vertices():
    exp = fixture("figure1")
    assert [v.name for v in exp.vertices] == ["v0", "v1"]
    v0, v1 = exp.vertices
    assert exp.sigma.dim(v0.sigma_v) == 0
    assert v1.generators == ((0, 1, 1),)
    assert exp.sigma.cone_label(v1.sigma_v) == "{l2}"
    assert v1.phi_v.to_lists() == [[1]]
    assert exp.vertex("v1") is exp.vertex("v1") is v1


def test_figure2_vertices():
    exp = fixture("figure2")
    assert len(exp.vertices) == 2
    v1 = exp.vertex("v1")
    assert v1.generators == ((1, 0, 0, 1),)
    assert exp.sigma.cone_label(v1.sigma_v) == "{l1}"


def test_unknown_vertex_name():
    with pytest.raises(InputError, match="unknown vertex"):
        fixture("figure1").vertex("v7")


def test_vertex_count_matches_brute_force():
    # [DERIVED] cones of dimension dim τ whose image is τ with unimodular lattice map
    for name in ("figure1", "figure2", "final_example"):
        exp = fixture(name)
        ups = exp.upsilon
        hits = []
        for w in ups:
            imgs = [r[exp.n:] for r in ups.cone(w).rays]
            if len(imgs) == exp.m and q_rank(imgs) == exp.m and all(x >= 0 for r in imgs for x in r):
                det = IntMatrix.from_columns(imgs, exp.m).det()
                if abs(det) == 1:
                    hits.append(w)
        assert sorted(hits) == sorted(v.omega_v for v in exp.vertices)


def test_position_map_kills_vertex_lattice():
    for name in ("figure1", "figure2", "final_example"):
        exp = fixture(name)
        for v in exp.vertices:
            W = exp.upsilon.cone(v.omega_v).lattice_basis
            assert (v.identification @ W).is_zero()


def test_figure1_slice():
    exp = fixture("figure1")
    e = Fraction(5, 2)
    sl = slice_expansion(exp, [e])
    assert sorted(sl.vertices) == [(0, 0), (0, e)]
    bounded = [x for x in sl.edges if x.head is not None]
    assert len(bounded) == 1
    (edge,) = bounded
    assert edge.slope == (0, 1)
    assert exp.sigma.cone_label(edge.sigma_E) == "{l2}"


def test_slice_at_zero_is_asymptotic_fan():
    exp = fixture("figure1")
    sl = slice_expansion(exp, [0])
    assert sl.vertices == [(0, 0)]
    # every polyhedron is a cone at the origin
    assert {p.vertices for p in sl.polyhedra} == {(0,)}
    # Σ† is the quadrant subdivided along the diagonal ray m
    assert len(sl.polyhedra) == 6
    assert sorted(p.rays for p in sl.polyhedra if p.dim == 1) == [((0, 1),), ((1, 0),), ((1, 1),)]


def test_slice_of_trivial_expansion():
    exp = trivial_expansion(orthant_fan(2), orthant_cone(1), ["e"])
    sl = slice_expansion(exp, [1])
    top = [p for p in sl.polyhedra if p.dim == 2]
    assert len(sl.vertices) == 1 and len(top) == 1
    assert sorted(top[0].rays) == [(0, 1), (1, 0)]


def test_slice_outside_tau():
    with pytest.raises(InputError):
        slice_expansion(fixture("figure1"), [-1])


def test_figure2_type_constant_along_tau():
    exp = fixture("figure2")
    t1 = slice_type(exp, slice_expansion(exp, [1]))
    t2 = slice_type(exp, slice_expansion(exp, [2]))
    assert t1 == t2


def test_combinatorial_types():
    exp = fixture("figure1")
    sl, t = combinatorial_type(exp, [0])
    assert len(sl.vertices) == 2
    sl0, t0 = combinatorial_type(exp, [])
    assert len(sl0.vertices) == 1 and t0 != t
    assert canonical_point(exp.tau, frozenset({0})) == (1,)
    with pytest.raises(InputError):
        combinatorial_type(exp, [3])


def test_dimension_law_on_fixtures():
    for name in ("figure1", "figure2", "final_example"):
        exp = fixture(name)
        sl = slice_expansion(exp, [1])
        for p in sl.polyhedra:
            assert exp.upsilon.dim(p.omega) == exp.m + p.dim
