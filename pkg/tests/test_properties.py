"""Property-based tests: algebraic identities that must hold on random inputs."""

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from latticeforms import (
    DistanceGraph,
    FunctionOnLattice,
    HolderPoint,
    SweepRow,
    SweepTable,
    completion_count,
    conjectured_exponent,
    fit_exponent,
    lp_norm,
    sphere_cardinality,
    sweep_table_from_csv,
    sweep_table_to_csv,
)
from latticeforms.lattice import encode_points
from latticeforms.regions import builtin_region, hull_membership


# ---------------------------------------------------------------------------
# exponent fitting
# ---------------------------------------------------------------------------

@given(
    c=st.floats(min_value=1e-3, max_value=1e3),
    s=st.floats(min_value=-5, max_value=5),
    lams=st.sets(st.integers(min_value=2, max_value=500), min_size=4, max_size=12),
)
def test_fit_recovers_any_pure_power_law(c, s, lams):
    rows = tuple(
        SweepRow(lam=lam, n_config=1, form_value=c * lam ** s,
                 norm_product=1.0, ratio=c * lam ** s)
        for lam in sorted(lams)
    )
    fit = fit_exponent(SweepTable(rows=rows))
    assert abs(fit.slope - s) < 1e-9
    assert abs(fit.intercept - math.log(c)) < 1e-8
    assert fit.max_residual < 1e-9


@given(
    lams=st.sets(st.integers(min_value=2, max_value=200), min_size=4, max_size=8),
    ratios=st.lists(st.floats(min_value=1e-6, max_value=1e6), min_size=4,
                    max_size=8),
)
def test_csv_round_trip_preserves_every_float(lams, ratios):
    lam_list = sorted(lams)
    assume(len(ratios) >= len(lam_list))
    rows = tuple(
        SweepRow(lam=lam, n_config=1 + i, form_value=ratios[i],
                 norm_product=1.0, ratio=ratios[i])
        for i, lam in enumerate(lam_list)
    )
    text = sweep_table_to_csv(SweepTable(rows=rows))
    parsed = sweep_table_from_csv(text)
    assert sweep_table_to_csv(parsed) == text
    assert [row.ratio for row in parsed] == [row.ratio for row in rows]


# ---------------------------------------------------------------------------
# point encoding
# ---------------------------------------------------------------------------

@given(
    d=st.integers(min_value=1, max_value=5),
    data=st.data(),
)
def test_encode_points_is_injective_and_lex_monotone(d, data):
    coord = st.integers(min_value=-7, max_value=7)
    pts = data.draw(
        st.lists(st.tuples(*[coord] * d), min_size=2, max_size=40, unique=True)
    )
    arr = np.array(sorted(pts), dtype=np.int64)
    keys = encode_points(arr, base=16, offset=7)
    assert len(set(keys.tolist())) == len(arr)  # injective
    assert (np.diff(keys) > 0).all()  # strictly increasing along lex order


# ---------------------------------------------------------------------------
# region membership
# ---------------------------------------------------------------------------

@given(
    name=st.sampled_from(["P1", "P2", "K3", "C4"]),
    data=st.data(),
)
def test_hull_membership_routes_agree_on_rationals(name, data):
    d = {"P1": 5, "P2": 5, "C4": 5, "K3": 7}[name]
    region = builtin_region(name, d)
    rational = st.fractions(
        min_value=0, max_value=1, max_denominator=64
    )
    point = HolderPoint(tuple(
        data.draw(rational) for _ in range(region.arity)
    ))
    by_facets = hull_membership(point, region, method="facets")
    by_lp = hull_membership(point, region, method="feasibility")
    assert by_facets == by_lp


@given(
    d=st.integers(min_value=2, max_value=11),
    data=st.data(),
)
def test_conjectured_exponent_is_affine_and_monotone(d, data):
    rational = st.fractions(min_value=0, max_value=1, max_denominator=32)
    arity = data.draw(st.integers(min_value=2, max_value=4))
    rec = tuple(data.draw(rational) for _ in range(arity))
    point = HolderPoint(rec)
    value = conjectured_exponent(d, point)
    assert value == F(d, 2) * (1 - sum(rec))
    # raising any reciprocal strictly lowers the exponent
    bump = data.draw(st.integers(min_value=0, max_value=arity - 1))
    if rec[bump] < 1:
        nudged = list(rec)
        nudged[bump] += F(1, 64)
        if nudged[bump] <= 1:
            assert conjectured_exponent(d, HolderPoint(tuple(nudged))) < value


# ---------------------------------------------------------------------------
# configuration counts
# ---------------------------------------------------------------------------

@st.composite
def random_tree(draw):
    k = draw(st.integers(min_value=2, max_value=5))
    edges = []
    for child in range(2, k + 1):
        parent = draw(st.integers(min_value=1, max_value=child - 1))
        edges.append((parent, child))
    return DistanceGraph(name=f"tree{k}", vertex_count=k, edges=tuple(edges))


@given(
    tree=random_tree(),
    d=st.integers(min_value=2, max_value=5),
    lam=st.integers(min_value=0, max_value=6),
)
def test_tree_counts_factor_through_the_shell(tree, d, lam):
    n = sphere_cardinality(d, lam)
    assert completion_count(tree, d, lam) == n ** (tree.vertex_count - 1)


@given(
    d=st.integers(min_value=2, max_value=7),
    lam=st.integers(min_value=1, max_value=25).filter(lambda v: v % 2 == 1),
)
def test_triangles_never_close_at_odd_radii(d, lam):
    triangle = DistanceGraph(name="K3", vertex_count=3,
                             edges=((1, 2), (1, 3), (2, 3)))
    assert completion_count(triangle, d, lam) == 0


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

@given(
    scale=st.floats(min_value=-8, max_value=8).filter(lambda v: abs(v) > 1e-3),
    p=st.sampled_from([F(3, 2), F(2), F(3), F(7, 2), "inf"]),
    data=st.data(),
)
def test_lp_norm_is_absolutely_homogeneous(scale, p, data):
    values = data.draw(st.lists(
        st.floats(min_value=-4, max_value=4), min_size=1, max_size=12,
    ))
    assume(any(v != 0 for v in values))
    pts = [(i, 0) for i in range(len(values))]
    entries = {pt: v for pt, v in zip(pts, values) if v != 0}
    assume(entries)
    f = FunctionOnLattice.from_entries(2, entries)
    scaled = FunctionOnLattice.from_entries(
        2, {pt: scale * v for pt, v in entries.items()}
    )
    assert lp_norm(scaled, p) == pytest.approx(abs(scale) * lp_norm(f, p),
                                               rel=1e-12)
