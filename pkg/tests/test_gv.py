import numpy as np
import pytest

from nchodge.errors import GridTooCoarse, NotIntegrable, VanishingOmega
from nchodge.gv import (builtin_omega, connection_form, exterior_derivative,
                        grid, gv_report, spectral_derivative)


def test_spectral_derivative_exact_on_band_limited():
    xs, _, _ = grid(16)
    f = np.sin(2 * np.pi * xs) + 0.5 * np.cos(4 * np.pi * xs)
    expect = 2 * np.pi * np.cos(2 * np.pi * xs) \
        - 2 * np.pi * np.sin(4 * np.pi * xs)
    assert np.max(np.abs(spectral_derivative(f, 0) - expect)) < 1e-12


def test_vertical_form_trivial():
    rep = gv_report("dz", 16)
    assert rep["gv"] == 0.0
    assert rep["integrability_max_abs"] == 0.0
    assert rep["passed"]


def test_integrable_form_vanishing_invariant():
    rep = gv_report("sin-z", 32)
    assert rep["integrability_max_abs"] < 1e-8
    assert abs(rep["gv"]) <= 1e-6
    assert rep["gauge_residual"] <= 1e-6
    assert rep["passed"]


def test_grid_doubling_stable():
    a = gv_report("sin-z", 16)["gv"]
    b = gv_report("sin-z", 32)["gv"]
    assert abs(a - b) <= 1e-6


def test_contact_form_rejected():
    with pytest.raises(NotIntegrable):
        gv_report("x-dy", 16)


def test_vanishing_omega_rejected():
    zero = np.zeros((16, 16, 16))
    with pytest.raises(VanishingOmega):
        connection_form({"x": zero, "y": zero, "z": zero})


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        builtin_omega("dz", 4)


def test_exterior_derivative_of_gradient_vanishes():
    # d(df) = 0 for a band-limited scalar
    xs, ys, _ = grid(16)
    f = np.sin(2 * np.pi * xs) * np.cos(2 * np.pi * ys)
    df = {c: spectral_derivative(f, a) for a, c in enumerate(("x", "y", "z"))}
    ddf = exterior_derivative(df, "spectral")
    for comp in ddf.values():
        assert np.max(np.abs(comp)) < 1e-10


def test_central_derivative_route_runs():
    rep = gv_report("dz", 16, derivative="central")
    assert rep["gv"] == 0.0 and rep["passed"]
