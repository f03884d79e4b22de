"""Finite-dimensional cochain complexes with metrics, and their Hodge data.

A complex is a list of dimensions ``n_0..n_m``, differentials
``D_k : C^k -> C^{k+1}`` with ``D_{k+1} D_k = 0``, and a Hermitian
positive-definite Gram matrix per degree.  The adjoint is taken with
respect to the Gram inner products, ``D*_k = G_k^{-1} D_k^H G_{k+1}``,
and the Laplacian is ``Delta_k = D*_k D_k + D_{k-1} D*_{k-1}``.

The Laplacian is self-adjoint for the Gram product but not Hermitian as a
raw matrix, so spectra are computed after a Cholesky change of frame:
``G = L L^H`` turns the Gram product into the standard one via
``u = L^H v``, and ``S = L^H Delta L^{-H}`` is honestly Hermitian PSD.

Betti numbers are computed two independent ways (harmonic kernel
dimension vs rank--nullity of the differentials) and must agree.
Regularized determinants drop the near-kernel, multiply what is left,
and are cross-checked against the exp-of-log-sum route.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import scipy.linalg

from . import exactla
from .errors import BadGram, NegativeEigenvalue, NotAComplex


@dataclass
class CochainComplex:
    dims: tuple
    diffs: list          # D_k, k = 0..m-1, shape (dims[k+1], dims[k])
    grams: list          # G_k, k = 0..m, Hermitian positive definite
    name: str = "complex"

    @property
    def top(self):
        return len(self.dims) - 1

    def euler_characteristic(self):
        return int(sum((-1) ** k * n for k, n in enumerate(self.dims)))


def _entry_to_complex(entry):
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise NotAComplex(f"matrix entry {entry!r} is not a number or [re, im] pair")
        return complex(float(entry[0]), float(entry[1]))
    return complex(entry)


def _matrix_from_json(rows, shape, what):
    mat = np.zeros(shape, dtype=complex)
    if len(rows) != shape[0]:
        raise NotAComplex(f"{what}: expected {shape[0]} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise NotAComplex(f"{what}: row {i} has {len(row)} entries, expected {shape[1]}")
        for j, entry in enumerate(row):
            mat[i, j] = _entry_to_complex(entry)
    return mat


def make_complex(dims, diffs, grams=None, name="complex",
                 check=True, tol=1e-12) -> CochainComplex:
    """Validate and pack a complex.  ``grams`` entries may be matrices,
    positive scalars (meaning scale * identity), or None (identity)."""
    dims = tuple(int(n) for n in dims)
    if not dims or any(n < 0 for n in dims):
        raise NotAComplex(f"bad dimension list {dims}")
    m = len(dims) - 1
    if len(diffs) != m:
        raise NotAComplex(f"expected {m} differentials for {m + 1} degrees, got {len(diffs)}")
    mats = []
    for k, d in enumerate(diffs):
        d = np.asarray(d, dtype=complex)
        if d.shape != (dims[k + 1], dims[k]):
            raise NotAComplex(
                f"differential {k} has shape {d.shape}, expected {(dims[k + 1], dims[k])}")
        mats.append(d)
    gs = []
    if grams is None:
        grams = [None] * (m + 1)
    if len(grams) != m + 1:
        raise BadGram(f"expected {m + 1} Gram matrices, got {len(grams)}")
    for k, g in enumerate(grams):
        n = dims[k]
        if g is None:
            g = np.eye(n, dtype=complex)
        elif np.isscalar(g):
            if not float(np.real(g)) > 0:
                raise BadGram(f"Gram scale at degree {k} must be positive, got {g}")
            g = float(np.real(g)) * np.eye(n, dtype=complex)
        else:
            g = np.asarray(g, dtype=complex)
            if g.shape != (n, n):
                raise BadGram(f"Gram at degree {k} has shape {g.shape}, expected {(n, n)}")
        gs.append(g)
    cx = CochainComplex(dims=dims, diffs=mats, grams=gs, name=str(name))
    if check:
        validate_complex(cx, tol)
    return cx


def validate_complex(cx: CochainComplex, tol=1e-12):
    for k in range(cx.top - 1):
        comp = cx.diffs[k + 1] @ cx.diffs[k]
        scale = max(1.0, exactla.max_abs(cx.diffs[k]) * exactla.max_abs(cx.diffs[k + 1]))
        if exactla.max_abs(comp) > tol * scale:
            raise NotAComplex(
                f"composition of differentials {k + 1} after {k} is nonzero",
                degree=k, residual=exactla.max_abs(comp))
    for k, g in enumerate(cx.grams):
        herm = exactla.max_abs(g - g.conj().T)
        if herm > tol * max(1.0, exactla.max_abs(g)):
            raise BadGram(f"Gram at degree {k} is not Hermitian", degree=k, residual=herm)
        if g.shape[0]:
            try:
                scipy.linalg.cholesky(g, lower=True)
            except np.linalg.LinAlgError:
                raise BadGram(f"Gram at degree {k} is not positive definite",
                              degree=k) from None


def load_complex(source) -> CochainComplex:
    """Read a complex from a dict or a JSON file path."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            source = json.load(fh)
    if not isinstance(source, dict):
        raise NotAComplex(f"expected a mapping, got {type(source).__name__}")
    if "dims" not in source:
        raise NotAComplex("missing key 'dims'")
    if "differentials" not in source and "diffs" not in source:
        raise NotAComplex("missing key 'differentials'")
    dims = source["dims"]
    if not isinstance(dims, (list, tuple)):
        raise NotAComplex("dims must be a list")
    dims = tuple(int(n) for n in dims)
    m = len(dims) - 1
    raw_diffs = source.get("differentials", source.get("diffs"))
    if len(raw_diffs) != m:
        raise NotAComplex(f"expected {m} differentials, got {len(raw_diffs)}")
    diffs = [_matrix_from_json(raw_diffs[k], (dims[k + 1], dims[k]), f"differential {k}")
             for k in range(m)]
    grams = source.get("gram", source.get("grams"))
    if grams is not None:
        parsed = []
        for k, g in enumerate(grams):
            if g is None or np.isscalar(g):
                parsed.append(g)
            else:
                try:
                    parsed.append(_matrix_from_json(g, (dims[k], dims[k]), f"gram {k}"))
                except NotAComplex as exc:
                    raise BadGram(str(exc), degree=k) from None
        grams = parsed
    return make_complex(dims, diffs, grams, name=source.get("name", "complex"))


def complex_to_json(cx: CochainComplex) -> dict:
    def mat(m):
        return [[[float(v.real), float(v.imag)] for v in row] for row in m]
    return {"name": cx.name, "dims": list(cx.dims),
            "differentials": [mat(d) for d in cx.diffs],
            "gram": [mat(g) for g in cx.grams]}


def adjoints(cx: CochainComplex) -> list:
    """D*_k = G_k^{-1} D_k^H G_{k+1}, one per differential."""
    out = []
    for k, d in enumerate(cx.diffs):
        rhs = d.conj().T @ cx.grams[k + 1]
        out.append(np.linalg.solve(cx.grams[k], rhs) if cx.dims[k] else rhs)
    return out


def laplacians(cx: CochainComplex) -> list:
    adj = adjoints(cx)
    out = []
    for k in range(cx.top + 1):
        lap = np.zeros((cx.dims[k], cx.dims[k]), dtype=complex)
        if k < cx.top:
            lap += adj[k] @ cx.diffs[k]
        if k >= 1:
            lap += cx.diffs[k - 1] @ adj[k - 1]
        out.append(lap)
    return out


def _sym_frame(cx: CochainComplex, k, lap=None):
    """Cholesky frame at degree k: returns (L, S) with G = L L^H and
    S = L^H Delta L^{-H} Hermitian PSD."""
    if lap is None:
        lap = laplacians(cx)[k]
    n = cx.dims[k]
    if n == 0:
        return np.zeros((0, 0), complex), np.zeros((0, 0), complex)
    L = scipy.linalg.cholesky(cx.grams[k], lower=True)
    linv = scipy.linalg.solve_triangular(L, np.eye(n, dtype=complex), lower=True)
    S = L.conj().T @ lap @ linv.conj().T
    herm = exactla.max_abs(S - S.conj().T)
    if herm > 1e-8 * max(1.0, exactla.max_abs(S)):
        raise BadGram(f"symmetrized Laplacian at degree {k} is not Hermitian",
                      degree=k, residual=herm)
    return L, (S + S.conj().T) / 2


def laplacian_spectra(cx: CochainComplex) -> list:
    """Ascending real eigenvalues of each degree's Laplacian."""
    laps = laplacians(cx)
    out = []
    for k in range(cx.top + 1):
        _, S = _sym_frame(cx, k, laps[k])
        out.append(np.linalg.eigvalsh(S) if S.size else np.zeros(0))
    return out


def betti_numbers(cx: CochainComplex, rel_tol=1e-9):
    """Betti numbers by two routes that must agree: dimension of the
    near-kernel of the Laplacian, and rank--nullity of the differentials."""
    spectra = laplacian_spectra(cx)
    ranks = [exactla.rank(d, rel_tol) for d in cx.diffs]
    out = []
    for k in range(cx.top + 1):
        eigs = spectra[k]
        scale = max(1.0, float(eigs.max())) if eigs.size else 1.0
        harmonic = int(np.sum(eigs < rel_tol * scale))
        r_out = ranks[k] if k < cx.top else 0
        r_in = ranks[k - 1] if k >= 1 else 0
        algebraic = cx.dims[k] - r_out - r_in
        if harmonic != algebraic:
            raise AssertionError(
                f"Betti routes disagree at degree {k}: harmonic kernel {harmonic}, "
                f"rank-nullity {algebraic}")
        out.append(harmonic)
    return tuple(out)


def decompose(cx: CochainComplex, k, v, rel_tol=1e-9):
    """Hodge decomposition of a cochain v at degree k into
    (harmonic, exact, coexact), orthogonal for the Gram product."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != cx.dims[k]:
        raise NotAComplex(f"cochain length {v.shape[0]} != dim {cx.dims[k]} at degree {k}")
    L, S = _sym_frame(cx, k)
    u = L.conj().T @ v
    eigs, vecs = np.linalg.eigh(S)
    scale = max(1.0, float(eigs.max())) if eigs.size else 1.0
    hvecs = vecs[:, eigs < rel_tol * scale]
    proj_h = hvecs @ (hvecs.conj().T @ u)
    proj_e = np.zeros_like(u)
    if k >= 1 and cx.dims[k - 1]:
        M = L.conj().T @ cx.diffs[k - 1]
        q = scipy.linalg.orth(M, rcond=rel_tol)
        proj_e = q @ (q.conj().T @ u)
    proj_c = np.zeros_like(u)
    if k < cx.top and cx.dims[k + 1]:
        lup = scipy.linalg.cholesky(cx.grams[k + 1], lower=True)
        N = scipy.linalg.solve_triangular(L, cx.diffs[k].conj().T @ lup, lower=True)
        q = scipy.linalg.orth(N, rcond=rel_tol)
        proj_c = q @ (q.conj().T @ u)
    resid = exactla.max_abs(proj_h + proj_e + proj_c - u)
    if resid > 1e-8 * max(1.0, exactla.max_abs(u)):
        raise AssertionError(f"Hodge pieces do not re-sum at degree {k} (residual {resid})")
    linvh = np.linalg.inv(L.conj().T)
    return linvh @ proj_h, linvh @ proj_e, linvh @ proj_c


def zeta_det(eigs, rel_tol=1e-10) -> float:
    """Regularized determinant: product of the eigenvalues above the
    near-kernel cut.  Empty or all-kernel spectra give 1.  Computed twice
    (plain product and exp of log-sum) and cross-checked."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        return 1.0
    scale = max(1.0, float(eigs.max()))
    if np.any(eigs < -rel_tol * scale):
        raise NegativeEigenvalue(
            "Laplacian spectrum has a negative eigenvalue",
            value=float(eigs.min()), cutoff=-rel_tol * scale)
    positive = eigs[eigs > rel_tol * scale]
    if positive.size == 0:
        return 1.0
    direct = float(np.prod(positive))
    via_logs = float(np.exp(np.sum(np.log(positive))))
    if not math.isclose(direct, via_logs, rel_tol=1e-9):
        raise AssertionError(
            f"determinant routes disagree: {direct} vs {via_logs}")
    return via_logs


def zeta_log_det(eigs, rel_tol=1e-10) -> float:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        return 0.0
    scale = max(1.0, float(eigs.max()))
    if np.any(eigs < -rel_tol * scale):
        raise NegativeEigenvalue(
            "Laplacian spectrum has a negative eigenvalue",
            value=float(eigs.min()), cutoff=-rel_tol * scale)
    positive = eigs[eigs > rel_tol * scale]
    return float(np.sum(np.log(positive))) if positive.size else 0.0


def rs_torsion(cx: CochainComplex, rel_tol=1e-10) -> dict:
    """Analytic torsion from the Laplacian spectra:
    log T = (1/2) * sum_k (-1)^k * k * log det' Delta_k."""
    spectra = laplacian_spectra(cx)
    log_dets = [zeta_log_det(s, rel_tol) for s in spectra]
    log_t = 0.5 * sum((-1) ** k * k * ld for k, ld in enumerate(log_dets))
    dets = [zeta_det(s, rel_tol) for s in spectra]
    for ld, d in zip(log_dets, dets):
        if not math.isclose(math.exp(ld), d, rel_tol=1e-9):
            raise AssertionError("log-det and det routes disagree")
    return {"log_torsion": log_t,
            "torsion": float(math.exp(log_t)),
            "log_det_prime": log_dets,
            "det_prime": dets,
            "zeta_prime_at_zero": log_dets,
            "betti": list(betti_numbers(cx, max(rel_tol, 1e-10)))}


def abelian_cs_partition(cx: CochainComplex, rel_tol=1e-10) -> dict:
    """One-loop abelian Chern-Simons partition function from the degree-0
    and degree-1 Laplacians: Z = det' Delta_1 ^ (-1/4) * det' Delta_0 ^ (3/4)."""
    if cx.top < 1:
        raise NotAComplex("partition function needs degrees 0 and 1")
    spectra = laplacian_spectra(cx)
    ld0 = zeta_log_det(spectra[0], rel_tol)
    ld1 = zeta_log_det(spectra[1], rel_tol)
    log_z = -0.25 * ld1 + 0.75 * ld0
    d0, d1 = zeta_det(spectra[0], rel_tol), zeta_det(spectra[1], rel_tol)
    alt = d1 ** -0.25 * d0 ** 0.75
    if not math.isclose(math.exp(log_z), alt, rel_tol=1e-9):
        raise AssertionError("partition function routes disagree")
    return {"log_Z": float(log_z), "Z": float(math.exp(log_z)),
            "log_det_prime": [ld0, ld1], "det_prime": [d0, d1]}


def hodge_package(cx: CochainComplex, rel_tol=1e-9) -> dict:
    """Betti numbers, spectra, determinants, and consistency checks."""
    spectra = laplacian_spectra(cx)
    betti = betti_numbers(cx, rel_tol)
    euler_dims = cx.euler_characteristic()
    euler_betti = int(sum((-1) ** k * b for k, b in enumerate(betti)))
    if euler_dims != euler_betti:
        raise AssertionError(
            f"Euler characteristic mismatch: dims give {euler_dims}, betti give {euler_betti}")
    return {"name": cx.name,
            "dims": list(cx.dims),
            "betti": list(betti),
            "euler_characteristic": euler_dims,
            "spectra": [[float(v) for v in s] for s in spectra],
            "det_prime": [zeta_det(s, max(rel_tol, 1e-10)) for s in spectra],
            "harmonic_dims": list(betti)}


def direct_sum(a: CochainComplex, b: CochainComplex, name=None) -> CochainComplex:
    """Degreewise direct sum; spectra concatenate, so torsion and partition
    logs add."""
    top = max(a.top, b.top)

    def dim(cx, k):
        return cx.dims[k] if k <= cx.top else 0

    def diff(cx, k):
        if k < cx.top:
            return cx.diffs[k]
        return np.zeros((dim(cx, k + 1), dim(cx, k)), complex)

    def gram(cx, k):
        if k <= cx.top:
            return cx.grams[k]
        return np.zeros((0, 0), complex)

    dims = tuple(dim(a, k) + dim(b, k) for k in range(top + 1))
    diffs = []
    for k in range(top):
        da, db = diff(a, k), diff(b, k)
        block = np.zeros((dims[k + 1], dims[k]), complex)
        block[:da.shape[0], :da.shape[1]] = da
        block[da.shape[0]:, da.shape[1]:] = db
        diffs.append(block)
    grams = []
    for k in range(top + 1):
        ga, gb = gram(a, k), gram(b, k)
        block = np.zeros((dims[k], dims[k]), complex)
        block[:ga.shape[0], :ga.shape[0]] = ga
        block[ga.shape[0]:, ga.shape[0]:] = gb
        grams.append(block)
    return make_complex(dims, diffs, grams,
                        name=name or f"{a.name}+{b.name}")


def twisted_circle_complex(n, alpha, gram_scale=1.0) -> CochainComplex:
    """Combinatorial circle with n vertices and a holonomy twist alpha on
    the closing edge: D0 = shift - identity, with the wrap entry scaled by
    alpha.  For alpha != 1 the complex is acyclic and
    det' Delta_0 = |1 - alpha|^2."""
    if n < 2:
        raise NotAComplex("circle needs at least 2 sites")
    alpha = complex(alpha)
    shift = np.zeros((n, n), complex)
    for j in range(n - 1):
        shift[j, j + 1] = 1.0
    shift[n - 1, 0] = alpha
    d0 = shift - np.eye(n, dtype=complex)
    return make_complex((n, n), [d0], [gram_scale, gram_scale],
                        name=f"circle(n={n}, alpha={alpha})")


def random_complex(rng, max_degree=3, max_dim=8, with_gram=True,
                   name="random") -> CochainComplex:
    """Random complex with known Betti numbers: a canonical rank pattern
    conjugated by random invertible changes of basis per degree.  The
    construction pins betti_k = dims[k] - r_k - r_{k-1}."""
    top = int(rng.integers(1, max_degree + 1))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(top + 1)]
    ranks = []
    prev = 0
    for k in range(top):
        cap = min(dims[k] - prev, dims[k + 1])
        r = int(rng.integers(0, cap + 1)) if cap > 0 else 0
        ranks.append(r)
        prev = r
    diffs = []
    for k in range(top):
        d = np.zeros((dims[k + 1], dims[k]), complex)
        start = ranks[k - 1] if k >= 1 else 0
        for i in range(ranks[k]):
            d[i, start + i] = 1.0
        diffs.append(d)
    changes = []
    for k in range(top + 1):
        while True:
            p = rng.normal(size=(dims[k], dims[k])) + 1j * rng.normal(size=(dims[k], dims[k]))
            if dims[k] == 0 or np.linalg.cond(p) < 1e3:
                changes.append(p)
                break
    diffs = [changes[k + 1] @ diffs[k] @ np.linalg.inv(changes[k]) for k in range(top)]
    grams = None
    if with_gram:
        grams = []
        for k in range(top + 1):
            a = rng.normal(size=(dims[k], dims[k])) + 1j * rng.normal(size=(dims[k], dims[k]))
            grams.append(a @ a.conj().T + dims[k] * np.eye(dims[k]))
    expected = []
    for k in range(top + 1):
        r_out = ranks[k] if k < top else 0
        r_in = ranks[k - 1] if k >= 1 else 0
        expected.append(dims[k] - r_out - r_in)
    cx = make_complex(dims, diffs, grams, name=name, tol=1e-9)
    return cx, tuple(expected)
