"""Convex regions: builtin vertex lists, membership, calculators, validation."""

from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

from latticeforms.errors import DimensionFloor, DimensionMismatch
from latticeforms.halfspaces import region_parameters
from latticeforms.regions import (
    HolderPoint,
    RegionSpec,
    builtin_halfspaces,
    builtin_region,
    conjectured_exponent,
    cross_validate,
    dimension_floor,
    facet_system,
    hull_membership,
    interpolated_exponent,
    load_region,
    parse_rational,
    region_from_json,
    region_to_json,
    save_region,
)


def test_parse_rational():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("-2") == F(-2)
    assert parse_rational(" 5 / 8 ") == F(5, 8)
    assert parse_rational(7) == F(7)
    assert parse_rational(F(1, 3)) == F(1, 3)
    for bad in (0.5, "0.5", "1e-3", True, "three"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_holder_point():
    hp = HolderPoint(("1/2", F(0), 1))
    assert hp.arity == 3
    assert tuple(hp) == (F(1, 2), F(0), F(1))
    assert str(hp) == "(1/2, 0, 1)"
    with pytest.raises(ValueError):
        HolderPoint(("3/2",))
    with pytest.raises(ValueError):
        HolderPoint(("-1/4",))


def test_region_spec_validation():
    region = RegionSpec(2, (HolderPoint((F(1), F(0))), HolderPoint((F(0), F(1)))))
    assert region.vertex_count == 2
    with pytest.raises(DimensionMismatch):
        RegionSpec(3, (HolderPoint((F(1), F(0))),))
    with pytest.raises(ValueError):
        RegionSpec(2, (HolderPoint((F(1), F(0))), HolderPoint((F(1), F(0)))))
    with pytest.raises(ValueError):
        RegionSpec(2, ())


def test_dimension_floors():
    expected = {"P1": 5, "P2": 5, "C4": 5, "Y": 5, "K3": 7, "C4t": 7,
                "K3t": 7, "K4": 9, "K5": 11}
    for name, floor in expected.items():
        assert dimension_floor(name) == floor


BUILTIN_VERTEX_COUNTS = {
    ("P1", 5): 3,
    ("P2", 5): 8,
    ("K3", 7): 6,
    ("K3t", 7): 17,
    ("C4", 5): 8,
    ("C4t", 7): 9,
    ("Y", 5): 17,
    ("K4", 9): 10,
    ("K5", 11): 15,
}


def test_builtin_vertex_counts():
    for (name, d), count in BUILTIN_VERTEX_COUNTS.items():
        region = builtin_region(name, d)
        assert region.vertex_count == count
        assert region.provenance == f"{name}:d={d}"


def test_builtin_region_contains_units_and_edge_corners():
    q = region_parameters(7).q
    region = builtin_region("K3", 7)
    pts = {tuple(v) for v in region.vertices}
    assert (F(1), F(0), F(0)) in pts
    assert (q, q, F(0)) in pts and (q, F(0), q) in pts and (F(0), q, q) in pts


def test_builtin_region_floors_and_unknowns():
    with pytest.raises(DimensionFloor):
        builtin_region("K3", 5)
    with pytest.raises(DimensionFloor):
        builtin_region("K4", 7)
    with pytest.raises(ValueError):
        builtin_region("P3", 7)  # chains past P2 have no finite vertex list
    with pytest.raises(ValueError):
        builtin_region("Pk", 7)


def test_builtin_halfspaces_floors():
    assert builtin_halfspaces("sphavg", 5).arity == 2
    assert builtin_halfspaces("P4", 5).arity == 5
    with pytest.raises(DimensionFloor):
        builtin_halfspaces("K3", 5)
    with pytest.raises(DimensionFloor):
        builtin_halfspaces("P2", 4)
    with pytest.raises(ValueError):
        builtin_halfspaces("pk", 7)


FROZEN_HULL_VERDICTS = {
    ("P1", 5, ("1/2", "1/2")): "boundary",
    ("P1", 5, ("3/5", "3/5")): "interior",
    ("P1", 5, ("1/2", "1/3")): "outside",
    ("P1", 5, ("2/3", "2/3")): "boundary",  # a vertex
    ("K3", 7, ("1/2", "1/2", "1/2")): "boundary",
    ("K3", 7, ("5/12", "5/12", "5/12")): "interior",
    ("K3", 7, ("7/12", "7/12", "5/12")): "outside",
    ("K3", 7, ("1", "1", "1")): "outside",
    ("K3t", 7, ("0", "3/4", "0", "3/4")): "boundary",
}


def test_frozen_hull_verdicts():
    for (name, d, coords), expected in FROZEN_HULL_VERDICTS.items():
        region = builtin_region(name, d)
        point = HolderPoint(coords)
        assert str(hull_membership(point, region)) == expected, (name, d, coords)


def test_hull_methods_agree():
    region = builtin_region("P2", 7)
    pts = [
        HolderPoint(("1/2", "1/2", "1/2")),
        HolderPoint(("3/4", "1/8", "3/4")),
        HolderPoint(("1", "0", "0")),
        HolderPoint(("9/10", "9/10", "9/10")),
        HolderPoint(("1/3", "2/3", "1/4")),
    ]
    for pt in pts:
        a = hull_membership(pt, region, method="facets")
        b = hull_membership(pt, region, method="feasibility")
        assert a == b, pt
    with pytest.raises(ValueError):
        hull_membership(pts[0], region, method="magic")
    with pytest.raises(DimensionMismatch):
        hull_membership(HolderPoint(("1/2", "1/2")), region)


def test_every_builtin_vertex_sits_on_both_boundaries():
    for name in ("P1", "P2", "K3", "K3t"):
        d = dimension_floor(name)
        region = builtin_region(name, d)
        system = builtin_halfspaces(name, d)
        for vertex in region.vertices:
            assert str(hull_membership(vertex, region)) == "boundary", (name, vertex)
            assert str(system.verdict(tuple(vertex))) == "boundary", (name, vertex)


def test_facet_system_matches_hull():
    region = builtin_region("K3", 7)
    system = facet_system(region)
    assert system.arity == 3
    for coords in (("1/2", "1/2", "1/2"), ("7/12", "7/12", "5/12"),
                   ("1", "1", "1"), ("2/3", "1/8", "2/3")):
        pt = HolderPoint(coords)
        assert system.verdict(tuple(pt)) == hull_membership(pt, region)


def test_conjectured_exponent_exact():
    assert conjectured_exponent(5, HolderPoint(("2/3", "2/3"))) == F(-5, 6)
    assert conjectured_exponent(7, HolderPoint(("0", "3/4", "0", "3/4"))) == F(-7, 4)
    assert conjectured_exponent(7, HolderPoint(("0", "0", "0"))) == F(7, 2)
    assert conjectured_exponent(5, HolderPoint(("1/2", "1/2"))) == 0
    with pytest.raises(ValueError):
        conjectured_exponent(0, HolderPoint(("1/2", "1/2")))


def test_interpolated_exponent():
    base = HolderPoint(("3/4", "1/2"))  # interior of the averaging region at d=7
    for d in (5, 7, 9):
        assert interpolated_exponent(d, F(0), base) == F(-(d - 2), 2)
    value = interpolated_exponent(7, F(1, 2), base)
    # 1/p = 1 - 1/2 + 1/2*3/4 = 7/8; 1/q = 1/2*1/2 = 1/4; d/2*(1/4 - 7/8) + 1/2
    assert value == F(7, 2) * (F(1, 4) - F(7, 8)) + F(1, 2)
    assert value == F(-27, 16)
    outside = HolderPoint(("1/2", "2/3"))
    with pytest.raises(ValueError):
        interpolated_exponent(7, F(1, 2), outside)
    # the endpoints skip the region check entirely
    assert interpolated_exponent(7, F(0), outside) == F(-5, 2)
    with pytest.raises(ValueError):
        interpolated_exponent(7, F(3, 2), base)


def test_cross_validate_agreement_and_determinism():
    region = builtin_region("P2", 7)
    system = builtin_halfspaces("P2", 7)
    report = cross_validate(region, system, samples=150, seed=11)
    assert report.agreed
    assert report.samples == 150 and report.seed == 11
    assert report.interior_count + report.boundary_count + report.outside_count == 150
    again = cross_validate(region, system, samples=150, seed=11)
    assert (report.interior_count, report.boundary_count, report.outside_count) == (
        again.interior_count, again.boundary_count, again.outside_count
    )
    payload = json.loads(report.to_json())
    assert payload["strict_disagreements"] == []
    assert payload["samples"] == 150


def test_cross_validate_catches_perturbation():
    region = builtin_region("P2", 7)
    bumped = builtin_halfspaces("P2", 7).perturbed(delta=F(1, 8))
    report = cross_validate(region, bumped, samples=400, seed=2)
    assert not report.agreed
    assert report.strict_disagreement_count > 0
    payload = json.loads(report.to_json())
    first = payload["strict_disagreements"][0]
    # exact rational coordinates are dumped for reproduction
    assert all("/" in c or c.lstrip("-").isdigit() for c in first)
    assert len(first) == region.arity


def test_cross_validate_hull_only():
    region = builtin_region("C4", 5)
    report = cross_validate(region, None, samples=60, seed=4)
    assert report.hull_only
    assert report.agreed
    assert report.samples == 60


def test_region_json_round_trip(tmp_path):
    region = builtin_region("P2", 5)
    back = region_from_json(region_to_json(region))
    assert back.arity == region.arity
    assert back.vertices == region.vertices
    assert back.provenance == region.provenance
    path = tmp_path / "region.json"
    save_region(region, path)
    assert load_region(path).vertices == region.vertices
