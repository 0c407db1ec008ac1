"""Configuration counts: frozen values, structural identities, admissibility."""

from __future__ import annotations

import pytest

from latticeforms.counting import (
    admissible_radii,
    completion_count,
    count_configurations,
    cycle_walk_counts,
    mutual_pair_count,
    shell_orbit_reps,
)
from latticeforms.graphs import DistanceGraph, catalog_graph, path_graph
from latticeforms.lattice import sphere_cardinality

FROZEN_COUNTS = {
    ("P1", 5, 2): 40,
    ("P2", 5, 1): 100,
    ("K3", 5, 2): 480,
    ("K3", 5, 4): 960,
    ("C4", 5, 2): 11880,
    ("C4t", 5, 2): 5760,
    ("K3t", 5, 2): 19200,
    ("Y", 5, 2): 64000,
    ("K4", 5, 4): 2880,
}


def test_frozen_completion_counts():
    for (name, d, lam), expected in FROZEN_COUNTS.items():
        assert completion_count(catalog_graph(name), d, lam) == expected


def test_count_configurations_wrapper():
    result = count_configurations(catalog_graph("K3"), 5, 2)
    assert int(result) == 480
    assert bool(result)
    assert result.graph.name == "K3"
    assert result.dimension == 5 and result.radius == 2
    assert not count_configurations(catalog_graph("K3"), 5, 1)


def test_tree_counts_are_shell_powers():
    """Completing a tree vertex by vertex multiplies by the shell size."""
    for name in ("P1", "P2", "Y"):
        g = catalog_graph(name)
        for d in (4, 5):
            for lam in (1, 2, 5):
                n = sphere_cardinality(d, lam)
                assert completion_count(g, d, lam) == n ** (g.vertex_count - 1)
    g = path_graph(3)
    assert completion_count(g, 5, 2) == 40**3


def test_pendant_vertex_multiplies_by_shell():
    # the chorded triangle is a triangle plus one pendant vertex
    for lam in (2, 4, 6):
        assert (
            completion_count(catalog_graph("K3t"), 5, lam)
            == completion_count(catalog_graph("K3"), 5, lam)
            * sphere_cardinality(5, lam)
        )


def test_mutual_pair_count_equals_triangle_count():
    for d in (4, 5, 6):
        for lam in (2, 4, 8):
            assert mutual_pair_count(d, lam) == completion_count(
                catalog_graph("K3"), d, lam
            )


def test_cycle_walk_counts_reconstruct_cycle():
    """N_{C4} equals the sum over midpoints of squared two-step walk counts."""
    for d, lam in ((4, 2), (5, 2), (5, 4)):
        walks = cycle_walk_counts(d, lam, 2)
        assert sum(t * t for t in walks.values()) == completion_count(
            catalog_graph("C4"), d, lam
        )
        # walk counts from the origin total N^2
        assert sum(walks.values()) == sphere_cardinality(d, lam) ** 2


def test_triangle_parity_spot():
    for d in (4, 5, 6, 7):
        for lam in (1, 3, 5, 9, 15):
            assert completion_count(catalog_graph("K3"), d, lam) == 0


def test_empty_branches_count_zero():
    # At odd radii the inner triangle of a 4-vertex graph can never close,
    # so the search hits empty candidate sets mid-recursion; the count must
    # come back 0 (not crash) even though other branches were still open.
    for name in ("K4", "C4t", "K3t"):
        assert completion_count(catalog_graph(name), 4, 3) == 0
        assert completion_count(catalog_graph(name), 5, 3) == 0
    assert admissible_radii(catalog_graph("K4"), 4, range(1, 8)) == {2, 4, 6}


def test_admissible_radii():
    assert admissible_radii(catalog_graph("K3"), 5, range(1, 13)) == {
        2, 4, 6, 8, 10, 12
    }
    # every radius is a sum of five squares
    assert admissible_radii(catalog_graph("P1"), 5, range(1, 9)) == set(range(1, 9))
    # three squares miss 7
    assert 7 not in admissible_radii(catalog_graph("P1"), 3, range(1, 9))


def test_shell_orbit_reps_cover_shell():
    for d, lam in ((5, 2), (4, 9)):
        reps = shell_orbit_reps(d, lam)
        assert sum(size for _, size in reps) == sphere_cardinality(d, lam)
        for rep, _ in reps:
            assert sum(c * c for c in rep) == lam
            assert list(rep) == sorted(rep, reverse=True)
            assert all(c >= 0 for c in rep)


def test_validation():
    with pytest.raises(ValueError):
        completion_count(catalog_graph("K3"), 1, 2)
    with pytest.raises(ValueError):
        completion_count(catalog_graph("K3"), 5, -1)
    with pytest.warns(UserWarning):
        disconnected = DistanceGraph("pairpair", 4, ((1, 2), (3, 4)))
    with pytest.raises(ValueError):
        completion_count(disconnected, 5, 2)


def test_zero_radius_degenerates_to_single_configuration():
    for name in ("P1", "P2", "K3", "C4"):
        assert completion_count(catalog_graph(name), 5, 0) == 1
