"""Godbillon-Vey quadrature for codimension-one foliations of the flat
3-torus given by a nowhere-zero 1-form.

Fields are sampled on an n x n x n periodic grid over [0,1)^3, components
indexed "x", "y", "z".  Derivatives are spectral (FFT, Nyquist mode
zeroed) or central differences; either way the grid mean of a derivative
is exactly zero, so discrete integrals of exact forms vanish to roundoff
and the gauge invariance of the final number is a sharp test, not a
fuzzy one.

Pipeline: check integrability (the coefficient of omega ^ d omega must
vanish pointwise), solve d omega = theta ^ omega for the connection form
theta by a batched pseudoinverse (the coefficient matrix has omega in its
kernel, so the minimal-norm solution is the one orthogonal to omega
pointwise), then integrate theta ^ d theta over the torus as a grid
mean.  Replacing theta by theta + h omega changes the integrand by an
exact form only, so the reported gauge residual should sit at roundoff
level for band-limited fields.
"""

from __future__ import annotations

import numpy as np

from .errors import GridTooCoarse, NotIntegrable, VanishingOmega

COMPONENTS = ("x", "y", "z")
AXIS = {"x": 0, "y": 1, "z": 2}


def grid(n):
    """Coordinate arrays for the n^3 periodic grid over [0,1)^3."""
    t = np.arange(n) / n
    return np.meshgrid(t, t, t, indexing="ij")


def spectral_derivative(f, axis, n=None):
    f = np.asarray(f, dtype=float)
    n = n or f.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0          # odd-derivative Nyquist mode is spurious
    shape = [1, 1, 1]
    shape[axis] = n
    fk = np.fft.fftn(f)
    return np.real(np.fft.ifftn(fk * (2j * np.pi * k.reshape(shape))))


def central_derivative(f, axis, n=None):
    f = np.asarray(f, dtype=float)
    n = n or f.shape[axis]
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) * (n / 2.0)


_DERIVATIVES = {"spectral": spectral_derivative, "central": central_derivative}


def _deriv(name):
    try:
        return _DERIVATIVES[name]
    except KeyError:
        raise ValueError(f"unknown derivative scheme {name!r} (choose from "
                         f"{sorted(_DERIVATIVES)})") from None


def exterior_derivative(omega, derivative="spectral"):
    """d of a 1-form: components keyed "xy", "xz", "yz"."""
    d = _deriv(derivative)
    out = {}
    for a, b in (("x", "y"), ("x", "z"), ("y", "z")):
        out[a + b] = d(omega[b], AXIS[a]) - d(omega[a], AXIS[b])
    return out


def wedge_12(theta, two_form):
    """Coefficient of dx^dy^dz in theta ^ (2-form)."""
    return (theta["x"] * two_form["yz"]
            - theta["y"] * two_form["xz"]
            + theta["z"] * two_form["xy"])


def integrability_defect(omega, derivative="spectral"):
    """Pointwise coefficient of omega ^ d omega; identically zero iff the
    plane field Ker omega is a foliation."""
    return wedge_12(omega, exterior_derivative(omega, derivative))


def connection_form(omega, derivative="spectral", tol=1e-8):
    """Solve d omega = theta ^ omega pointwise (minimal-norm theta).

    Raises NotIntegrable when omega ^ d omega is not numerically zero, and
    VanishingOmega when the defining form degenerates somewhere."""
    norms = np.sqrt(sum(np.asarray(omega[c], dtype=float) ** 2 for c in COMPONENTS))
    min_norm = float(norms.min())
    if min_norm < 1e-6:
        raise VanishingOmega(
            "the defining 1-form degenerates on the grid", min_norm=min_norm)
    defect = integrability_defect(omega, derivative)
    max_defect = float(np.max(np.abs(defect)))
    if max_defect > tol:
        raise NotIntegrable(
            "omega ^ d omega does not vanish: the plane field is not a foliation",
            max_abs=max_defect, tolerance=tol)
    dw = exterior_derivative(omega, derivative)
    shape = np.asarray(omega["x"]).shape
    wx = np.asarray(omega["x"], dtype=float).reshape(-1)
    wy = np.asarray(omega["y"], dtype=float).reshape(-1)
    wz = np.asarray(omega["z"], dtype=float).reshape(-1)
    zero = np.zeros_like(wx)
    mats = np.stack([
        np.stack([wy, -wx, zero], axis=-1),
        np.stack([wz, zero, -wx], axis=-1),
        np.stack([zero, wz, -wy], axis=-1),
    ], axis=-2)
    rhs = np.stack([dw["xy"].reshape(-1), dw["xz"].reshape(-1),
                    dw["yz"].reshape(-1)], axis=-1)[..., None]
    sol = np.linalg.pinv(mats) @ rhs
    theta = {c: sol[:, i, 0].reshape(shape) for i, c in enumerate(COMPONENTS)}
    resid = np.max(np.abs((mats @ sol)[..., 0] - rhs[..., 0]))
    return theta, {"solve_residual": float(resid),
                   "integrability_max_abs": max_defect,
                   "min_omega_norm": min_norm}


def godbillon_vey(omega, derivative="spectral", tol=1e-8):
    """The invariant as a grid mean of theta ^ d theta, plus diagnostics."""
    theta, info = connection_form(omega, derivative, tol)
    dtheta = exterior_derivative(theta, derivative)
    gv = float(np.mean(wedge_12(theta, dtheta)))
    # gauge check: theta + h*omega must give the same number
    xs, _, _ = grid(np.asarray(omega["x"]).shape[0])
    h = np.cos(2 * np.pi * xs)
    shifted = {c: theta[c] + h * np.asarray(omega[c], dtype=float)
               for c in COMPONENTS}
    gv2 = float(np.mean(wedge_12(shifted, exterior_derivative(shifted, derivative))))
    info = dict(info)
    info["gauge_residual"] = abs(gv2 - gv)
    return gv, theta, info


def builtin_omega(name, n):
    """Named defining forms on the n^3 grid."""
    if n < 8:
        raise GridTooCoarse(f"need at least an 8^3 grid, got {n}^3", n=n)
    xs, ys, zs = grid(n)
    one = np.ones_like(xs)
    zero = np.zeros_like(xs)
    if name == "dz":
        return {"x": zero, "y": zero, "z": one}
    if name == "sin-z":
        return {"x": np.sin(2 * np.pi * zs), "y": zero, "z": one}
    if name == "x-dy":
        return {"x": zero, "y": xs, "z": one}
    raise ValueError(f"unknown form {name!r} (choose from ['dz', 'sin-z', 'x-dy'])")


def gv_report(name_or_fields, n=32, derivative="spectral", tol=1e-8,
              gauge_tol=1e-6) -> dict:
    if isinstance(name_or_fields, str):
        label = name_or_fields
        omega = builtin_omega(name_or_fields, n)
    else:
        label = "custom"
        omega = {c: np.asarray(name_or_fields[c], dtype=float) for c in COMPONENTS}
        n = omega["x"].shape[0]
        if n < 8:
            raise GridTooCoarse(f"need at least an 8^3 grid, got {n}^3", n=n)
    gv, _, info = godbillon_vey(omega, derivative, tol)
    passed = (info["integrability_max_abs"] <= tol
              and info["solve_residual"] <= 1e-6
              and info["gauge_residual"] <= gauge_tol)
    return {"omega": label, "n": int(n), "derivative": derivative,
            "gv": gv,
            "integrability_max_abs": info["integrability_max_abs"],
            "solve_residual": info["solve_residual"],
            "gauge_residual": info["gauge_residual"],
            "min_omega_norm": info["min_omega_norm"],
            "tolerance": tol,
            "passed": bool(passed)}
