"""Dense linear algebra over exact object matrices and complex floats.

Exact matrices are numpy object arrays with ``Fraction`` or
``GaussianRational`` entries; float matrices are ``complex128``.  The same
helpers accept both and dispatch on dtype: exact inputs go through
fraction-preserving Gaussian elimination, float inputs through numpy's SVD
based routines.  Ranks and kernels computed on exact input are therefore
*exact* integers, which several invariants in this package rely on.

Also hosts the small dense polynomial arithmetic (Fraction coefficients,
low-to-high lists) used to build annihilating-polynomial projections.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def is_exact(mat: np.ndarray) -> bool:
    return mat.dtype == object


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.dot supports object dtype; the @ operator does not.
    return np.dot(a, b)


def to_complex(mat: np.ndarray) -> np.ndarray:
    if mat.dtype != object:
        return np.asarray(mat, dtype=np.complex128)
    out = np.empty(mat.shape, dtype=np.complex128)
    flat_in, flat_out = mat.reshape(-1), out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = complex(v)
    return out


def max_abs(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(to_complex(mat))))


def is_zero_matrix(mat: np.ndarray, tol: float = 0.0) -> bool:
    if mat.size == 0:
        return True
    if is_exact(mat):
        return all(v == 0 for v in mat.reshape(-1))
    return max_abs(mat) <= tol


def _inv_scalar(v):
    return 1 / v if not isinstance(v, Fraction) else Fraction(1) / v


def rref(mat: np.ndarray):
    """Reduced row echelon form of an exact matrix.  Returns (R, pivot_cols)."""
    a = mat.copy()
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if a[i, c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        a[r, :] = a[r, :] * _inv_scalar(a[r, c])
        for i in range(m):
            if i != r and a[i, c] != 0:
                a[i, :] = a[i, :] - a[i, c] * a[r, :]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rank(mat: np.ndarray, rel_tol: float = 1e-10) -> int:
    if mat.size == 0:
        return 0
    if is_exact(mat):
        return len(rref(mat)[1])
    s = np.linalg.svd(to_complex(mat), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def kernel_basis(mat: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Columns spanning the right null space.  Exact basis for exact input,
    orthonormal basis (from the SVD) for float input."""
    m, n = mat.shape
    if n == 0:
        return np.full((0, 0), 0, dtype=object) if is_exact(mat) else np.zeros((0, 0), complex)
    if is_exact(mat):
        red, pivots = rref(mat)
        free = [c for c in range(n) if c not in pivots]
        out = np.full((n, len(free)), 0, dtype=object)
        for j, fc in enumerate(free):
            out[fc, j] = 1
            for i, pc in enumerate(pivots):
                out[pc, j] = -red[i, fc]
        return out
    a = to_complex(mat)
    if m == 0:
        return np.eye(n, dtype=complex)
    u, s, vh = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        keep = n
    else:
        keep = n - int(np.count_nonzero(s > rel_tol * s[0]))
    return vh.conj().T[:, n - keep:] if keep else np.zeros((n, 0), complex)


def inverse(mat: np.ndarray) -> np.ndarray:
    if not is_exact(mat):
        return np.linalg.inv(to_complex(mat))
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    aug = np.full((n, 2 * n), 0, dtype=object)
    aug[:, :n] = mat
    for i in range(n):
        aug[i, n + i] = 1
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return red[:, n:]


def solve_in_image(A: np.ndarray, b: np.ndarray, rel_tol: float = 1e-10):
    """Return True when every column of b lies in the column space of A."""
    if b.size == 0 or is_zero_matrix(b, tol=rel_tol * max(1.0, max_abs(b))):
        return True
    if A.size == 0:
        return False
    if is_exact(A) and is_exact(b):
        stacked = np.concatenate([A, b.reshape(A.shape[0], -1)], axis=1)
        return rank(stacked) == rank(A)
    Af, bf = to_complex(A), to_complex(b).reshape(A.shape[0], -1)
    x, *_ = np.linalg.lstsq(Af, bf, rcond=None)
    resid = Af @ x - bf
    return max_abs(resid) <= rel_tol * max(1.0, max_abs(bf))


def eval_poly(coeffs, mat: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (low-to-high Fraction coefficients) at a square
    matrix, by Horner's rule."""
    n = mat.shape[0]
    exact = is_exact(mat)
    cs = list(coeffs) if exact else [complex(float(c)) for c in coeffs]
    if not cs:
        cs = [0]
    out = np.full((n, n), 0, dtype=object) if exact else np.zeros((n, n), complex)
    for c in reversed(cs):
        out = matmul(out, mat)
        for i in range(n):
            out[i, i] = out[i, i] + c
    return out


# -- dense polynomials over the rationals -----------------------------------

def poly_trim(p):
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def poly_deg(p) -> int:
    return len(poly_trim(p)) - 1


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                      for i in range(n)])


def poly_sub(p, q):
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
                      for i in range(n)])


def poly_mul(p, q):
    p, q = poly_trim(p), poly_trim(q)
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_scale(p, c):
    return poly_trim([a * c for a in p])


def poly_divmod(p, q):
    p, q = [Fraction(a) for a in poly_trim(p)], [Fraction(a) for a in poly_trim(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    rem = p[:]
    while len(rem) >= len(q) and poly_trim(rem):
        shift = len(rem) - len(q)
        f = rem[-1] / q[-1]
        quot[shift] = f
        for i, b in enumerate(q):
            rem[shift + i] -= f * b
        rem = poly_trim(rem)
        if not rem:
            break
    return poly_trim(quot), poly_trim(rem)


def poly_xgcd(p, q):
    """Extended Euclid: returns (g, u, v) with u*p + v*q = g."""
    r0, r1 = poly_trim(p), poly_trim(q)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        quot, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(s0, poly_mul(quot, s1))
        t0, t1 = t1, poly_sub(t0, poly_mul(quot, t1))
    return r0, s0, t0


def poly_eval(p, x):
    out = Fraction(0) if isinstance(x, Fraction) else 0
    for c in reversed(poly_trim(p)):
        out = out * x + c
    return out


def x_pow_minus_one(n: int):
    """Coefficients of x**n - 1."""
    out = [Fraction(0)] * (n + 1)
    out[0], out[-1] = Fraction(-1), Fraction(1)
    return out


def karoubi_annihilator(n: int):
    """(x**n - 1)(x**(n+1) - 1): annihilates the cyclic rotation in degree n >= 1."""
    return poly_mul(x_pow_minus_one(n), x_pow_minus_one(n + 1))


def harmonic_crt_poly(n: int):
    """Polynomial r with r = 1 mod (x-1)**2 and r = 0 mod q, where the degree-n
    annihilator factors as (x-1)**2 * q and q(1) = n(n+1) != 0.  Evaluating r at
    the rotation operator yields the spectral projection onto the generalized
    eigenspace of eigenvalue 1 -- exactly, over the rationals."""
    if n < 1:
        raise ValueError("harmonic projector polynomial needs degree >= 1")
    ann = karoubi_annihilator(n)
    sq = [Fraction(1), Fraction(-2), Fraction(1)]  # (x-1)**2
    q, rem = poly_divmod(ann, sq)
    if rem:
        raise AssertionError("annihilator not divisible by (x-1)^2")
    g, u, v = poly_xgcd(sq, q)
    if poly_deg(g) != 0:
        raise AssertionError("(x-1)^2 and cofactor are not coprime")
    r = poly_scale(poly_mul(v, q), 1 / g[0])
    return r
