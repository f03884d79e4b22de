import json
from fractions import Fraction

import numpy as np
import pytest

import nchodge as nc
from nchodge.errors import AssociativityViolation, DimMismatch, UnitViolation


def _basis_product(algebra, i, j):
    ei = algebra.field.zeros((algebra.dim,))
    ej = algebra.field.zeros((algebra.dim,))
    ei[i] = algebra.field.one
    ej[j] = algebra.field.one
    return algebra.multiply(ei, ej)


def test_builtin_algebras_construct():
    for name in sorted(nc.BUILTIN_ALGEBRAS):
        a = nc.builtin_algebra(name)
        assert a.dim >= 2
        # unit acts as identity on every basis vector
        for i in range(a.dim):
            e = a.field.zeros((a.dim,))
            e[i] = a.field.one
            assert np.array_equal(a.multiply(a.unit, e), e)
            assert np.array_equal(a.multiply(e, a.unit), e)


def test_matrix_units_multiplication():
    m2 = nc.builtin_algebra("m2")
    assert m2.basis_labels == ("E11", "E12", "E21", "E22")
    e12_e21 = _basis_product(m2, 1, 2)
    assert e12_e21[0] == Fraction(1) and all(v == 0 for v in e12_e21[1:])
    assert all(v == 0 for v in _basis_product(m2, 1, 1))


def test_two_points_idempotents():
    tp = nc.builtin_algebra("two-points")
    assert all(v == 0 for v in _basis_product(tp, 0, 1))
    p2 = _basis_product(tp, 0, 0)
    assert p2[0] == Fraction(1) and p2[1] == 0


def test_cyclic_group_algebra_is_commutative():
    z3 = nc.builtin_algebra("z3")
    for i in range(3):
        for j in range(3):
            assert np.array_equal(_basis_product(z3, i, j),
                                  _basis_product(z3, j, i))
    # g1 * g2 wraps to the unit
    assert np.array_equal(_basis_product(z3, 1, 2), z3.unit)


def test_nonassociative_structure_rejected():
    # octonion-flavoured junk: tweak one structure constant of m2
    m2 = nc.builtin_algebra("m2")
    bad = m2.structure.copy()
    bad[1, 2, 3] = Fraction(1)
    with pytest.raises(AssociativityViolation):
        nc.make_algebra(4, m2.basis_labels, bad, [1, 0, 0, 1])


def test_bad_unit_rejected():
    m2 = nc.builtin_algebra("m2")
    with pytest.raises(UnitViolation):
        nc.make_algebra(4, m2.basis_labels, m2.structure, [1, 0, 0, 0])


def test_unknown_builtin_name():
    with pytest.raises(DimMismatch):
        nc.builtin_algebra("quaternions")


def test_json_roundtrip(tmp_path):
    a = nc.builtin_algebra("dual-numbers")
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(a.to_json()))
    b = nc.load_algebra(str(path))
    assert b.dim == a.dim
    assert np.array_equal(b.structure, a.structure)
    assert np.array_equal(b.unit, a.unit)


def test_scalar_mode_override_on_load(tmp_path):
    a = nc.builtin_algebra("dual-numbers")
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(a.to_json()))
    b = nc.load_algebra(str(path), scalar_mode="float")
    assert not b.field.exact
