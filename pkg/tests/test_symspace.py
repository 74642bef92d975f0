import itertools
import math

import numpy as np
import pytest

import symdecomp as sd
from symdecomp.symspace import class_positions


def test_catalog_3_2_table(cat32):
    reps = [tuple(int(v) + 1 for v in row) for row in cat32.reps]
    assert reps == [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)]
    assert cat32.monomials.tolist() == [[3, 0], [2, 1], [1, 2], [0, 3]]
    assert cat32.multiplicities.tolist() == [1, 3, 3, 1]


def test_catalog_counts_small_grid():
    for m in range(2, 7):
        for n in range(1, 7):
            cat = sd.build_catalog(m, n)
            assert cat.size == math.comb(m + n - 1, m)
            assert int(cat.multiplicities.sum()) == n**m


def test_catalog_trivial_single_entry():
    cat = sd.build_catalog(2, 1)
    assert cat.size == 1
    assert cat.reps.tolist() == [[0, 0]]
    assert cat.multiplicities.tolist() == [1]


def test_catalog_4_3_matches_enumeration():
    # independent oracle: bucket all 3**4 raw indices by their sorted form
    classes = {}
    for raw in itertools.product(range(3), repeat=4):
        classes.setdefault(tuple(sorted(raw)), 0)
        classes[tuple(sorted(raw))] += 1
    cat = sd.build_catalog(4, 3)
    assert cat.size == len(classes) == 15
    for rep, mult in zip(cat.reps, cat.multiplicities):
        assert classes[tuple(int(v) for v in rep)] == mult
    assert int(cat.multiplicities.sum()) == 81


def test_catalog_lexicographic_and_deterministic():
    a = sd.build_catalog(4, 4)
    b = sd.build_catalog(4, 4)
    assert np.array_equal(a.reps, b.reps)
    rows = [tuple(r) for r in a.reps]
    assert rows == sorted(rows)


def test_catalog_rejects_bad_shapes():
    with pytest.raises(ValueError):
        sd.build_catalog(1, 3)
    with pytest.raises(ValueError):
        sd.build_catalog(3, 0)
    with pytest.raises(ValueError):
        sd.build_catalog(25, 5)  # beyond the multiplicity guard


def test_index_monomial_conversions():
    assert sd.index_to_monomial((1, 1, 2), 2) == (2, 1)
    assert sd.index_to_monomial((1,) * 5, 3) == (5, 0, 0)
    assert sd.index_to_monomial((2, 3, 3, 1), 3) == (1, 1, 2)
    assert sd.monomial_to_index((0, 3)) == (2, 2, 2)
    assert sd.monomial_to_index((4, 0, 0)) == (1, 1, 1, 1)
    assert sd.monomial_to_index((1, 2, 1)) == (1, 2, 2, 3)
    with pytest.raises(ValueError):
        sd.index_to_monomial((0, 1), 2)
    with pytest.raises(ValueError):
        sd.index_to_monomial((1, 3), 2)


def test_conversion_round_trip_bijection():
    for m, n in [(3, 2), (4, 3), (5, 4)]:
        cat = sd.build_catalog(m, n)
        for rep in cat.reps:
            one_based = tuple(int(v) + 1 for v in rep)
            assert sd.monomial_to_index(sd.index_to_monomial(one_based, n)) == one_based


def test_multiplicity_values():
    assert sd.multiplicity((2, 1)) == 3
    assert sd.multiplicity((7, 0, 0)) == 1
    assert sd.multiplicity((2, 2)) == 6
    assert sd.multiplicity((1, 1, 1)) == 6
    with pytest.raises(ValueError):
        sd.multiplicity((15, 10))  # order above the guard


def test_sym_from_dense_matrix_case():
    t = sd.sym_from_dense(np.array([[1.0, 2.0], [2.0, 5.0]]))
    assert t.values.tolist() == [1.0, 2.0, 5.0]


def test_sym_from_dense_rank_one_cube():
    x = np.array([1.0, 2.0])
    dense = np.einsum("i,j,k->ijk", x, x, x)
    t = sd.sym_from_dense(dense)
    assert t.values.tolist() == [1.0, 2.0, 4.0, 8.0]


def test_sym_from_dense_rejects_asymmetry():
    dense = np.zeros((2, 2, 2))
    dense[0, 0, 1] = 1.0  # permutations left at zero
    with pytest.raises(ValueError, match="not symmetric"):
        sd.sym_from_dense(dense)
    with pytest.raises(ValueError, match="cubic"):
        sd.sym_from_dense(np.zeros((2, 3)))


def test_sym_from_dense_tolerance_override():
    x = np.array([1.0, 2.0])
    dense = np.einsum("i,j,k->ijk", x, x, x)
    dense[0, 0, 1] += 1e-9
    with pytest.raises(ValueError):
        sd.sym_from_dense(dense)
    t = sd.sym_from_dense(dense, tol=1e-6)
    assert t.values[1] == dense[0, 0, 1]


def test_sym_to_dense_basis_tensor(cat32):
    t = sd.SymTensor(cat32, [1.0, 0.0, 0.0, 0.0])
    dense = sd.sym_to_dense(t)
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = 1.0
    assert np.array_equal(dense, expected)


def test_sym_to_dense_spreads_value_to_permutations(cat32):
    t = sd.SymTensor(cat32, [1.0, 2.0, 4.0, 8.0])
    dense = sd.sym_to_dense(t)
    assert dense[0, 0, 1] == dense[0, 1, 0] == dense[1, 0, 0] == 2.0
    assert dense[0, 1, 1] == dense[1, 0, 1] == dense[1, 1, 0] == 4.0


def test_dense_round_trip_random(rng):
    for m, n in [(2, 3), (3, 4), (4, 3), (6, 2)]:
        cat = sd.build_catalog(m, n)
        t = sd.SymTensor(cat, rng.standard_normal(cat.size))
        back = sd.sym_from_dense(sd.sym_to_dense(t), cat)
        assert np.array_equal(t.values, back.values)


def test_sym_to_dense_cap():
    cat = sd.build_catalog(3, 4)
    t = sd.SymTensor(cat, np.zeros(cat.size))
    with pytest.raises(ValueError, match="cap"):
        sd.sym_to_dense(t, cap=10)


def test_class_positions_matches_catalog_order():
    for m, n in [(3, 2), (4, 3), (5, 5)]:
        cat = sd.build_catalog(m, n)
        pos = class_positions(cat, cat.reps)
        assert np.array_equal(pos, np.arange(cat.size))


def test_sym_norm_values(cat32):
    assert sd.sym_norm(sd.SymTensor(cat32, np.zeros(4))) == 0.0
    assert sd.sym_norm(sd.SymTensor(cat32, np.ones(4))) == pytest.approx(np.sqrt(8.0))
    # rank-one law: ||x^m|| = ||x||^m
    t = sd.SymTensor(cat32, [1.0, 2.0, 4.0, 8.0])
    assert sd.sym_norm(t) == pytest.approx(5.0**1.5, rel=1e-14)


def test_sym_norm_equals_dense_norm(rng):
    for m, n in [(3, 3), (4, 4), (6, 3)]:
        cat = sd.build_catalog(m, n)
        t = sd.SymTensor(cat, rng.standard_normal(cat.size))
        dense_norm = np.linalg.norm(sd.sym_to_dense(t).ravel())
        assert sd.sym_norm(t) == pytest.approx(dense_norm, rel=1e-14)
