import numpy as np
import pytest

import nchodge as nc
from nchodge import exactla
from nchodge.spectral import admissible_roots


@pytest.fixture(scope="module")
def dual():
    return nc.build_window(nc.builtin_algebra("dual-numbers"), 3)


def test_harmonic_projection_dual_numbers(dual):
    data = nc.spectral_data(dual, 1)
    assert np.array_equal(data.P, dual.field.array([[1, 0], [0, 0]]))
    assert np.array_equal(data.G, dual.field.array([[0, 0], [0, "1/2"]]))


def test_rescaled_laplacian_dual_numbers(dual):
    L1 = nc.operator_matrices(dual)["L"].blocks[1]
    assert np.array_equal(L1, dual.field.array([[0, 0], [0, 4]]))
    from nchodge.spectral import rescaled_laplacian_check
    norm_p, min_sing = rescaled_laplacian_check(dual, 1)
    assert norm_p == 0.0
    assert min_sing == pytest.approx(4.0)


def test_hodge_split_xdx(dual):
    xdx = dual.basis_form(1, dual.index[1][(1, 1)])
    harm, dpart, bpart = nc.hodge_split(dual, xdx)
    assert harm.is_zero() and dpart.is_zero()
    assert bpart == xdx


def test_split_resums_exactly():
    w = nc.build_window(nc.builtin_algebra("z3"), 3)
    rng = np.random.default_rng(11)
    for degree in (0, 1, 2):
        coords = [int(c) for c in rng.integers(-3, 4, w.degree_dims[degree])]
        form = nc.Form({degree: w.field.array(coords)})
        harm, dpart, bpart = nc.hodge_split(w, form)
        assert (harm + dpart + bpart - form).is_zero()


def test_projection_matches_float_eigensolver():
    for name in ("two-points", "m2"):
        w = nc.build_window(nc.builtin_algebra(name), 2)
        for degree in (0, 1):
            exact_p = nc.harmonic_projection(w, degree).P
            float_p = nc.eigenprojection_float(w, degree)
            assert exactla.max_abs(exactla.to_complex(exact_p) - float_p) < 1e-10


def test_rank_partition():
    w = nc.build_window(nc.builtin_algebra("m2"), 2)
    K = nc.operator_matrices(w)["k"].blocks
    for degree in (0, 1):
        data = nc.spectral_data(w, degree)
        dim = w.degree_dims[degree]
        omk = w.field.eye(dim) - K[degree]
        omk2 = exactla.matmul(omk, omk)
        assert exactla.rank(data.P) + exactla.rank(omk2) == dim


def test_spectrum_roots_are_admissible():
    w = nc.build_window(nc.builtin_algebra("z3"), 3)
    for degree in (0, 1, 2):
        spectrum = nc.spectrum_report(w, degree)
        allowed = admissible_roots(degree)
        for root, mult in spectrum:
            assert mult >= 1
            assert min(abs(root - a) for a in allowed) < 1e-8


def test_green_inverts_on_complement(dual):
    data = nc.spectral_data(dual, 1)
    omk = dual.field.eye(2) - nc.operator_matrices(dual)["k"].blocks[1]
    assert np.array_equal(exactla.matmul(data.G, omk), data.P_perp)
    assert exactla.is_zero_matrix(exactla.matmul(data.G, data.P))


def test_spectral_report_passes_float_mode():
    w = nc.build_window(nc.builtin_algebra("dual-numbers", "float"), 3)
    rep = nc.spectral_report(w)
    assert rep["passed"]
    assert rep["scalars"] == "float"
