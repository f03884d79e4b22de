from fractions import Fraction

import numpy as np
import pytest

from nchodge import exactla as xla
from nchodge.scalars import field_for

F = field_for("rational")


def test_rank_and_kernel_exact():
    mat = F.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert xla.rank(mat) == 2
    ker = xla.kernel_basis(mat)
    assert ker.shape == (3, 1)
    assert xla.is_zero_matrix(xla.matmul(mat, ker))


def test_inverse_exact_and_singular():
    mat = F.array([[2, 1], [1, 1]])
    inv = xla.inverse(mat)
    assert np.array_equal(xla.matmul(mat, inv), F.eye(2))
    with pytest.raises(ValueError):
        xla.inverse(F.array([[1, 2], [2, 4]]))


def test_solve_in_image():
    A = F.array([[1, 0], [0, 0]])
    assert xla.solve_in_image(A, F.array([[3], [0]]))
    assert not xla.solve_in_image(A, F.array([[0], [1]]))


def test_float_rank_uses_relative_threshold():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    mat = q @ np.diag([1.0, 1.0, 1.0, 1e-14, 0.0]) @ q.T
    assert xla.rank(mat) == 3


def test_poly_divmod_and_xgcd():
    # (x-1)^2 and (x+1) are coprime; check the Bezout identity
    p = [Fraction(1), Fraction(-2), Fraction(1)]
    q = [Fraction(1), Fraction(1)]
    g, u, v = xla.poly_xgcd(p, q)
    assert xla.poly_deg(g) == 0
    lhs = xla.poly_add(xla.poly_mul(u, p), xla.poly_mul(v, q))
    assert xla.poly_trim(xla.poly_sub(lhs, g)) == []


def test_karoubi_annihilator_roots():
    # (x^n - 1)(x^{n+1} - 1) vanishes at the union of the two root sets
    ann = xla.karoubi_annihilator(3)
    for k in range(3):
        assert abs(xla.poly_eval([complex(c) for c in ann],
                                 np.exp(2j * np.pi * k / 3))) < 1e-12
    for k in range(4):
        assert abs(xla.poly_eval([complex(c) for c in ann],
                                 np.exp(2j * np.pi * k / 4))) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_harmonic_crt_poly_properties(n):
    """r(1) = 1, r'(1) = 0, and r is divisible by the non-unit factor."""
    r = xla.harmonic_crt_poly(n)
    assert xla.poly_eval(r, Fraction(1)) == 1
    deriv = [c * (i + 1) for i, c in enumerate(r[1:])]
    assert xla.poly_eval(deriv, Fraction(1)) == 0
    ann = xla.karoubi_annihilator(n)
    sq = [Fraction(1), Fraction(-2), Fraction(1)]
    q, rem = xla.poly_divmod(ann, sq)
    assert xla.poly_trim(rem) == []
    _, rem = xla.poly_divmod(r, q)
    assert xla.poly_trim(rem) == []


def test_eval_poly_matrix_horner():
    mat = F.array([[0, 1], [0, 0]])
    # p(x) = 1 + x on a nilpotent gives I + N
    out = xla.eval_poly([Fraction(1), Fraction(1)], mat)
    assert np.array_equal(out, F.array([[1, 1], [0, 1]]))
