"""Spectral decomposition of the cyclic rotation on a forms window.

On degree ``n`` the rotation ``k`` satisfies ``(k^n - 1)(k^(n+1) - 1) = 0``,
with 1 a (possibly defective) double root and every other root of unity
simple.  The harmonic projection ``P`` is the spectral projection onto the
generalized eigenspace of eigenvalue 1, i.e. ``Ker (1-k)^2``.

Two routes compute it:

* exact -- factor the annihilator as ``(x-1)^2 q(x)`` with ``q(1) != 0``,
  use the extended Euclidean algorithm to build ``r`` with ``r = 1`` mod
  ``(x-1)^2`` and ``r = 0`` mod ``q``, and evaluate ``P = r(k)``.  Over the
  exact scalar modes this is rounding-free, so ``P`` is literally idempotent.
* float -- a sorted complex Schur form: cluster the eigenvalues at 1, solve
  the Sylvester equation for the coupling block, and conjugate back.

The Green's operator ``G`` inverts ``1 - k`` on the complement of the
harmonic space and annihilates the harmonic space: since ``P`` commutes with
``k`` and ``1 - k`` is nilpotent on Im(P), the combination ``(1-k) + P`` is
invertible and ``G = (1 - P) * ((1-k) + P)^{-1}``.

``G`` splits the complement into complementary idempotent pieces ``G d b``
(image inside Im d) and ``G b d`` (image inside Im b), giving per-degree
decompositions of any form into harmonic + d-part + b-part.  The rescaled
Laplacian ``L = b(Nd) + (Nd)b`` vanishes on the harmonic space and is
invertible on the complement, which is what makes the split well posed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import exactla
from .errors import (DegreeOutOfWindow, NonUnitRootEigenvalue,
                     NumericalRankAmbiguous, PolynomialRelationViolated,
                     SingularOnComplement)
from .exactla import harmonic_crt_poly, karoubi_annihilator, matmul, to_complex
from .forms import Form, FormsWindow, operator_matrices


@dataclass
class SpectralData:
    degree: int
    P: np.ndarray
    P_perp: np.ndarray
    G: np.ndarray = None
    eigenvalues: list = None


def _k_block(window, degree):
    return operator_matrices(window)["k"].blocks[degree]


def harmonic_projection(window: FormsWindow, degree: int, method: str = "auto",
                        cluster_tol: float = 1e-8) -> SpectralData:
    """Projection onto Ker (1-k)^2 at one degree (degree < window top)."""
    window.check_degree(degree, top=window.n_max - 1)
    field = window.field
    K = _k_block(window, degree)
    dim = K.shape[0]
    if method == "auto":
        method = "crt" if field.exact else "eig"
    if degree == 0:
        P = field.eye(dim)
    elif method == "crt":
        ann = karoubi_annihilator(degree)
        pk = exactla.eval_poly(ann, K)
        tol = 0.0 if field.exact else 1e-10 * max(1.0, exactla.max_abs(K)) ** (2 * degree + 1)
        if not exactla.is_zero_matrix(pk, tol):
            raise PolynomialRelationViolated(
                f"(k^{degree} - 1)(k^{degree + 1} - 1) != 0 at degree {degree}; "
                "the rotation block is wrong upstream",
                degree=degree, residual=exactla.max_abs(pk))
        P = exactla.eval_poly(harmonic_crt_poly(degree), K)
    elif method == "eig":
        P = _schur_projection(to_complex(K), cluster_tol)
        if field.exact:
            raise ValueError("eig method returns floats; use it on float windows")
    else:
        raise ValueError(f"unknown method {method!r}")
    resid = matmul(P, P) - P
    tol = 0.0 if field.exact else 1e-9 * max(1.0, exactla.max_abs(P)) ** 2
    if not exactla.is_zero_matrix(resid, tol):
        raise AssertionError(f"projection not idempotent at degree {degree}")
    return SpectralData(degree=degree, P=P, P_perp=field.eye(dim) - P)


def eigenprojection_float(window: FormsWindow, degree: int,
                          cluster_tol: float = 1e-8) -> np.ndarray:
    """Float spectral projector for eigenvalue 1, independent of the exact
    route: sorted complex Schur form plus a Sylvester solve."""
    K = to_complex(_k_block(window, degree))
    eigs = np.linalg.eigvals(K) if K.size else np.array([])
    gaps = np.abs(eigs - 1.0)
    ambiguous = (gaps > cluster_tol) & (gaps < 100 * cluster_tol)
    if np.any(ambiguous):
        raise NumericalRankAmbiguous(
            f"eigenvalues sit inside the cluster tolerance band at degree {degree}",
            degree=degree, values=[complex(v) for v in eigs[ambiguous]])
    return _schur_projection(K, cluster_tol)


def _schur_projection(K: np.ndarray, cluster_tol: float) -> np.ndarray:
    n = K.shape[0]
    if n == 0:
        return np.zeros((0, 0), complex)
    T, Z, sdim = scipy.linalg.schur(K, output="complex",
                                    sort=lambda z: abs(z - 1.0) < cluster_tol)
    if sdim == 0:
        return np.zeros((n, n), complex)
    if sdim == n:
        return np.eye(n, dtype=complex)
    T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    Y = scipy.linalg.solve_sylvester(T11, -T22, T12)
    Pi = np.zeros((n, n), complex)
    Pi[:sdim, :sdim] = np.eye(sdim)
    Pi[:sdim, sdim:] = Y
    return Z @ Pi @ Z.conj().T


def greens_operator(window: FormsWindow, degree: int,
                    data: SpectralData = None) -> SpectralData:
    """Inverse of 1-k on the complement of the harmonic space, zero on it."""
    if data is None:
        data = harmonic_projection(window, degree)
    field = window.field
    K = _k_block(window, degree)
    M = field.eye(K.shape[0]) - K
    try:
        ainv = exactla.inverse(M + data.P)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularOnComplement(
            f"1-k is singular on the complement at degree {degree}: {exc}",
            degree=degree) from None
    G = matmul(data.P_perp, ainv)
    resid = matmul(G, M) - data.P_perp
    tol = 0.0 if field.exact else 1e-9 * max(1.0, exactla.max_abs(G))
    if not exactla.is_zero_matrix(resid, tol):
        raise SingularOnComplement(
            f"Green's operator fails G(1-k) = 1-P at degree {degree}",
            degree=degree, residual=exactla.max_abs(resid))
    data.G = G
    return data


def spectral_data(window: FormsWindow, degree: int) -> SpectralData:
    """Cached harmonic projection + Green's operator for one degree."""
    cached = window._spectral_cache.get(degree)
    if cached is None:
        cached = greens_operator(window, degree)
        window._spectral_cache[degree] = cached
    return cached


def hodge_split(window: FormsWindow, form: Form, verify: bool = True):
    """Split a form, degree by degree, into harmonic + d-part + b-part.

    Valid on degrees up to the window top minus one.  Returns three forms
    whose sum is the input; the d-part lies in the image of ``d`` and the
    b-part in the image of ``b`` (checked when ``verify`` is set).
    """
    ops = operator_matrices(window)
    D, B = ops["d"].blocks, ops["b"].blocks
    field = window.field
    tol = 0.0 if field.exact else 1e-9
    harm, dpart, bpart = {}, {}, {}
    for n, vec in form.components.items():
        window.check_degree(n, top=window.n_max - 1)
        data = spectral_data(window, n)
        rest = matmul(data.P_perp, vec)
        harm[n] = matmul(data.P, vec)
        if n >= 1:
            dn = matmul(data.G, matmul(D[n - 1], matmul(B[n], rest)))
        else:
            dn = window.zero_vector(0)
        bn = matmul(data.G, matmul(B[n + 1], matmul(D[n], rest)))
        dpart[n], bpart[n] = dn, bn
        if verify:
            total = harm[n] + dn + bn - vec
            scale = max(1.0, exactla.max_abs(vec))
            if not exactla.is_zero_matrix(total, tol * scale):
                raise AssertionError(f"split does not re-sum at degree {n}")
            if n >= 1 and not exactla.solve_in_image(D[n - 1], dn.reshape(-1, 1)):
                raise AssertionError(f"d-part escapes Im(d) at degree {n}")
            elif n == 0 and not exactla.is_zero_matrix(dn, tol):
                raise AssertionError("degree-0 d-part must vanish")
            if not exactla.solve_in_image(B[n + 1], bn.reshape(-1, 1)):
                raise AssertionError(f"b-part escapes Im(b) at degree {n}")
    return Form(harm), Form(dpart), Form(bpart)


def rescaled_laplacian_check(window: FormsWindow, degree: int,
                             rank_tol: float = 1e-10):
    """Returns (norm of L restricted to the harmonic space, smallest singular
    value of L on the complement; None when the complement is trivial)."""
    window.check_degree(degree, top=window.n_max - 1)
    ops = operator_matrices(window)
    L = ops["L"].blocks[degree]
    data = spectral_data(window, degree)
    norm_on_p = exactla.max_abs(matmul(L, data.P))
    r = exactla.rank(data.P_perp, rank_tol)
    if r == 0:
        return norm_on_p, None
    pf = to_complex(data.P_perp)
    u, s, _ = np.linalg.svd(pf)
    basis = u[:, :r]
    restricted = basis.conj().T @ to_complex(L) @ basis
    return norm_on_p, float(np.linalg.svd(restricted, compute_uv=False).min())


def admissible_roots(degree: int) -> np.ndarray:
    """Roots of unity of order dividing degree or degree + 1 (dedup, sorted by
    angle).  Degree 0 only admits 1."""
    if degree == 0:
        return np.array([1.0 + 0.0j])
    angles = set()
    for order in (degree, degree + 1):
        for j in range(order):
            angles.add(round(j / order, 12) % 1.0)
    return np.array([np.exp(2j * np.pi * a) for a in sorted(angles)])


def spectrum_report(window: FormsWindow, degree: int, root_tol: float = 1e-6):
    """Eigenvalues of the rotation block clustered onto the admissible roots
    of unity, as a list of (root, multiplicity) pairs."""
    window.check_degree(degree)
    K = to_complex(_k_block(window, degree))
    if K.size == 0:
        return []
    roots = admissible_roots(degree)
    counts = np.zeros(len(roots), dtype=int)
    for lam in np.linalg.eigvals(K):
        dists = np.abs(roots - lam)
        best = int(np.argmin(dists))
        if dists[best] > root_tol:
            raise NonUnitRootEigenvalue(
                f"eigenvalue {lam} at degree {degree} is not near any root of "
                f"unity of order dividing {degree} or {degree + 1}",
                degree=degree, value=complex(lam), distance=float(dists[best]))
        counts[best] += 1
    return [(complex(r), int(c)) for r, c in zip(roots, counts) if c]


def _column_space_rank(mats, rank_tol):
    stacked = np.concatenate([to_complex(m) for m in mats], axis=1)
    return exactla.rank(stacked, rank_tol)


def spectral_report(window: FormsWindow, degrees=None, *, cluster_tol=1e-8,
                    root_tol=1e-6, rank_tol=1e-10, crt_vs_eig_tol=1e-10) -> dict:
    """Full per-degree report: spectra, ranks, and residuals of every
    invariant the decomposition is supposed to satisfy."""
    ops = operator_matrices(window)
    D, B, K = ops["d"].blocks, ops["b"].blocks, ops["k"].blocks
    n_max = window.n_max
    if degrees is None:
        degrees = range(n_max)
    exact = window.field.exact
    zero_tol = 0.0 if exact else 1e-10
    rows = []
    all_ok = True
    for n in degrees:
        data = spectral_data(window, n)
        P, Pp, G = data.P, data.P_perp, data.G
        dim = window.degree_dims[n]
        eye = window.field.eye(dim)
        omk = eye - K[n]
        omk2 = matmul(omk, omk)

        rank_p = exactla.rank(P, rank_tol)
        rank_pp = exactla.rank(Pp, rank_tol)
        rank_omk2 = exactla.rank(omk2, rank_tol)

        eig_p = eigenprojection_float(window, n, cluster_tol)
        crt_vs_eig = exactla.max_abs(to_complex(P) - eig_p)

        def res(mat):
            return {"exact_zero": bool(exactla.is_zero_matrix(mat)),
                    "max_abs": exactla.max_abs(mat)}

        Xc = matmul(matmul(G, matmul(D[n - 1], B[n])), Pp) if n >= 1 \
            else window.field.zeros((dim, dim))
        Yc = matmul(matmul(G, matmul(B[n + 1], D[n])), Pp)
        residuals = {
            "P_idempotent": res(matmul(P, P) - P),
            "P_commutes_k": res(matmul(P, K[n]) - matmul(K[n], P)),
            "harmonic_kernel": res(matmul(omk2, P)),
            "green_on_harmonic": res(matmul(G, P)),
            "green_left_inverse": res(matmul(G, omk) - Pp),
            "green_right_inverse": res(matmul(omk, G) - Pp),
            "split_partition": res(Xc + Yc - Pp),
            "d_piece_idempotent": res(matmul(Xc, Xc) - Xc),
            "b_piece_idempotent": res(matmul(Yc, Yc) - Yc),
            "pieces_orthogonal": res(matmul(Xc, Yc)),
        }
        membership = {
            "d_piece_in_image_d": bool(n == 0 or exactla.solve_in_image(D[n - 1], Xc)),
            "b_piece_in_image_b": bool(exactla.solve_in_image(B[n + 1], Yc)),
        }
        norm_on_p, min_sing = rescaled_laplacian_check(window, n, rank_tol)
        spectrum = spectrum_report(window, n, root_tol)

        row = {
            "degree": n,
            "dim": dim,
            "eigenvalues": [[r.real, r.imag, m] for r, m in spectrum],
            "rank_P": rank_p,
            "rank_P_perp": rank_pp,
            "rank_one_minus_k_squared": rank_omk2,
            "rank_split_ok": bool(rank_p + rank_omk2 == dim),
            "harmonic_multiplicity_matches": bool(
                sum(m for r, m in spectrum if abs(r - 1) < 1e-9) == rank_p),
            "crt_vs_eig": crt_vs_eig,
            "residuals": residuals,
            "membership": membership,
            "rescaled_laplacian": {"norm_on_P": norm_on_p,
                                   "min_singular_on_complement": min_sing},
        }
        if 1 <= n <= n_max - 2:
            up = window._spectral_cache.get(n + 1) or spectral_data(window, n + 1)
            dn_ = window._spectral_cache.get(n - 1) or spectral_data(window, n - 1)
            dP = matmul(D[n - 1], dn_.P)
            bP = matmul(B[n + 1], up.P)
            span = _column_space_rank([dP, bP], rank_tol)
            contained = _column_space_rank([to_complex(Pp), np.concatenate(
                [to_complex(dP), to_complex(bP)], axis=1)], rank_tol) == rank_pp
            row["harmonic_complement_as_dP_plus_bP"] = {
                "span_rank": span,
                "complement_rank": rank_pp,
                "contained_in_complement": bool(contained),
                "equals_complement": bool(contained and span == rank_pp),
            }
        ok = (row["rank_split_ok"]
              and row["harmonic_multiplicity_matches"]
              and crt_vs_eig <= crt_vs_eig_tol
              and all(r["max_abs"] <= max(zero_tol, 1e-10) for r in residuals.values())
              and all(membership.values())
              and norm_on_p <= max(zero_tol, 1e-10)
              and (min_sing is None or min_sing > 1e-8))
        row["passed"] = bool(ok)
        all_ok = all_ok and ok
        rows.append(row)
    return {"algebra": window.algebra.name,
            "scalars": window.field.mode,
            "n_max": n_max,
            "degree_dims": list(window.degree_dims),
            "degrees": rows,
            "passed": bool(all_ok)}
