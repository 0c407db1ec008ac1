"""Lattice functions: construction, lookup, norms, recipes, serialization."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from latticeforms.errors import CapacityError, DimensionMismatch
from latticeforms.functions import (
    FunctionOnLattice,
    TestFunctionSpec,
    conjugate,
    floor_rational_power,
    function_from_json,
    function_to_json,
    load_function,
    lp_norm,
    materialize,
    save_function,
)
from latticeforms.lattice import (
    ball_cardinality,
    enumerate_sphere,
    sphere_cardinality,
)


def test_delta_and_lookup():
    f = FunctionOnLattice.delta(3)
    assert f.support_size == 1
    assert f.value_at((0, 0, 0)) == 1.0
    assert f.value_at((1, 0, 0)) == 0.0
    g = FunctionOnLattice.delta(3, (2, -1, 0))
    assert g.value_at((2, -1, 0)) == 1.0
    assert not g.symmetric


def test_from_entries_sorts_prunes_and_rejects_duplicates():
    f = FunctionOnLattice.from_entries(
        2, [((1, 0), 2.0), ((0, 1), 3.0), ((5, 5), 0.0)]
    )
    assert f.support_size == 2
    assert f.as_dict() == {(0, 1): 3.0, (1, 0): 2.0}
    with pytest.raises(ValueError):
        FunctionOnLattice.from_entries(2, [((1, 0), 1.0), ((1, 0), 2.0)])
    with pytest.raises(DimensionMismatch):
        FunctionOnLattice.from_entries(3, [((1, 0), 1.0)])


def test_values_at_vectorized():
    shell = enumerate_sphere(4, 2)
    f = FunctionOnLattice.indicator(shell.points, 4)
    queries = np.array([[1, 1, 0, 0], [2, 0, 0, 0], [0, 0, 0, 0]], dtype=np.int64)
    assert list(f.values_at(queries)) == [1.0, 0.0, 0.0]
    assert list(f.contains(queries)) == [True, False, False]


def test_signed_permutation_invariance():
    shell = enumerate_sphere(3, 5)
    f = FunctionOnLattice.indicator(shell.points, 3)
    assert f.check_signed_permutation_invariance()
    g = FunctionOnLattice.delta(3, (1, 0, 0))
    assert not g.check_signed_permutation_invariance()
    # an incomplete orbit is not invariant
    h = FunctionOnLattice.from_entries(2, [((1, 0), 1.0), ((0, 1), 1.0)])
    assert not h.check_signed_permutation_invariance()


def test_materialize_sizes():
    assert materialize(TestFunctionSpec.Ball(), 5, 4).support_size == 221
    assert materialize(TestFunctionSpec.SphereIndicator(), 5, 2).support_size == 40
    assert materialize(TestFunctionSpec.DeltaAtOrigin(), 5, 9).support_size == 1
    assert materialize(TestFunctionSpec.AllOnesBox(2), 3, 7).support_size == 5**3
    # scaled ball: squared radius floor(lam^a)
    f = materialize(TestFunctionSpec.Ball(Fraction(1, 2)), 5, 16)
    assert f.support_size == ball_cardinality(5, 4)


def test_materialize_budget_and_fixed():
    with pytest.raises(CapacityError):
        materialize(TestFunctionSpec.AllOnesBox(50), 5, 1, budget=1000)
    fn = FunctionOnLattice.delta(4)
    assert materialize(TestFunctionSpec.Fixed(fn), 4, 3) is fn
    with pytest.raises(DimensionMismatch):
        materialize(TestFunctionSpec.Fixed(fn), 5, 3)


def test_spec_describe():
    assert TestFunctionSpec.Ball().describe() == "ball"
    assert TestFunctionSpec.Ball(Fraction(1, 2)).describe() == "ball:a=1/2"
    assert TestFunctionSpec.AllOnesBox(3).describe() == "ones:3"
    assert TestFunctionSpec.DeltaAtOrigin().describe() == "delta"


def test_floor_rational_power():
    assert floor_rational_power(10, Fraction(1, 2)) == 3
    assert floor_rational_power(16, Fraction(1, 2)) == 4
    assert floor_rational_power(16, Fraction(3, 4)) == 8
    assert floor_rational_power(7, Fraction(1)) == 7
    assert floor_rational_power(5, 2) == 25
    assert floor_rational_power(0, Fraction(2, 3)) == 0
    # exactness where floats would round the wrong way
    assert floor_rational_power(10**15 - 1, Fraction(1, 3)) == 99999


def test_lp_norm_values():
    f = FunctionOnLattice.from_entries(1, [((0,), 3.0), ((1,), -4.0)])
    assert lp_norm(f, 2) == pytest.approx(5.0)
    assert lp_norm(f, "inf") == 4.0
    assert lp_norm(f, math.inf) == 4.0
    shell = materialize(TestFunctionSpec.SphereIndicator(), 5, 2)
    n = sphere_cardinality(5, 2)
    assert lp_norm(shell, 2) == pytest.approx(math.sqrt(n))
    assert lp_norm(shell, Fraction(3, 2)) == pytest.approx(n ** (2 / 3))
    assert lp_norm(shell, "inf") == 1.0


def test_lp_norm_indicator_fast_path_matches_generic():
    shell = materialize(TestFunctionSpec.SphereIndicator(), 4, 5)
    plain = FunctionOnLattice.from_entries(
        4, [(tuple(p), 1.0) for p in shell.points]
    )
    for p in (Fraction(3, 2), 2, 3, "inf"):
        assert lp_norm(shell, p) == pytest.approx(lp_norm(plain, p), rel=1e-14)


def test_lp_norm_domain():
    f = FunctionOnLattice.delta(2)
    for bad in (1, Fraction(1), 0.5, 0, -2, Fraction(2, 3)):
        with pytest.raises(ValueError):
            lp_norm(f, bad)
    assert lp_norm(f, Fraction(101, 100)) == 1.0


def test_conjugate_exact():
    assert conjugate(2) == Fraction(2)
    assert conjugate(Fraction(3, 2)) == Fraction(3)
    assert conjugate("inf") == 1
    assert conjugate(math.inf) == 1
    p = Fraction(7, 5)
    q = conjugate(p)
    assert Fraction(1, 1) == 1 / p + 1 / q


def test_json_round_trip(tmp_path):
    f = FunctionOnLattice.from_entries(
        3, [((0, 0, 0), 1.5), ((1, -2, 0), -0.25)]
    )
    back = function_from_json(function_to_json(f))
    assert back.dimension == 3
    assert back.as_dict() == f.as_dict()

    path = tmp_path / "fn.json"
    save_function(f, path)
    loaded = load_function(path)
    assert loaded.as_dict() == f.as_dict()
    via_spec = materialize(TestFunctionSpec.Custom(str(path)), 3, 1)
    assert via_spec.as_dict() == f.as_dict()
    with pytest.raises(DimensionMismatch):
        materialize(TestFunctionSpec.Custom(str(path)), 4, 1)


def test_empty_function():
    f = FunctionOnLattice.empty(3)
    assert f.support_size == 0
    assert lp_norm(f, 2) == 0.0
    assert f.values_at(np.array([[0, 0, 0]], dtype=np.int64))[0] == 0.0
