"""Finite-dimensional unital associative algebras given by structure constants.

An algebra is described by a basis ``e_0 .. e_{d-1}``, a structure tensor
``c[i, j, k]`` with ``e_i e_j = sum_k c[i, j, k] e_k``, and the coordinates of
the unit.  Construction validates associativity and the two-sided unit law
and reports a witness on failure.

Besides the user's original basis, each algebra carries a fixed "unit-first"
basis: the unit becomes basis vector 0 (choosing the first basis vector with
a nonzero unit coordinate as the pivot to swap out), and the remaining
original basis vectors, in order, represent a complement of the scalar line.
Reduction modulo scalars then simply drops coordinate 0, which is the
convention the differential-form machinery builds on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import exactla
from .errors import (AssociativityViolation, DimMismatch, ShapeMismatch,
                     UnitViolation)
from .scalars import RATIONAL, ScalarField, field_for


@dataclass
class Algebra:
    """Validated structure-constant algebra plus its unit-first basis data."""

    dim: int
    basis_labels: tuple
    field: ScalarField
    structure: np.ndarray        # (dim, dim, dim), original basis
    unit: np.ndarray             # (dim,), original coordinates
    pivot: int                   # original basis index replaced by the unit
    complement_indices: tuple    # original indices spanning the complement
    change: np.ndarray           # columns: unit-first basis in original coords
    change_inv: np.ndarray
    norm_structure: np.ndarray   # structure constants in the unit-first basis
    norm_labels: tuple
    name: str = "algebra"
    _mul_flat: np.ndarray = dc_field(default=None, repr=False)

    # -- elements -------------------------------------------------------------

    def element(self, spec) -> np.ndarray:
        """Coefficient vector from a basis label, a {label: coeff} dict, or a
        coefficient sequence (original basis)."""
        if isinstance(spec, str):
            if spec not in self.basis_labels:
                raise DimMismatch(f"unknown basis label {spec!r}", labels=list(self.basis_labels))
            vec = self.field.zeros((self.dim,))
            vec[self.basis_labels.index(spec)] = self.field.one
            return vec
        if isinstance(spec, dict):
            vec = self.field.zeros((self.dim,))
            for label, coeff in spec.items():
                vec[self.basis_labels.index(label)] = self.field.coerce(coeff)
            return vec
        vec = np.asarray(spec, dtype=self.field.dtype)
        if vec.shape != (self.dim,):
            raise DimMismatch(f"expected {self.dim} coefficients, got shape {vec.shape}")
        if self.field.exact:
            vec = self.field.array(list(spec))
        return vec

    def unit_element(self) -> np.ndarray:
        return self.unit.copy()

    def _check_vec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise DimMismatch(f"element has shape {x.shape}, algebra dim is {self.dim}")
        return x

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x, y = self._check_vec(x), self._check_vec(y)
        if self._mul_flat is None:
            object.__setattr__(self, "_mul_flat",
                               self.structure.reshape(self.dim, self.dim * self.dim))
        tmp = np.dot(x, self._mul_flat).reshape(self.dim, self.dim)
        return np.dot(y, tmp)

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of x modulo the scalar line, in the complement basis."""
        x = self._check_vec(x)
        return np.dot(self.change_inv, x)[1:]

    def section(self, r: np.ndarray) -> np.ndarray:
        """The canonical representative in A of a reduced vector."""
        r = np.asarray(r)
        if r.shape != (self.dim - 1,):
            raise DimMismatch(f"reduced vector has shape {r.shape}, expected ({self.dim - 1},)")
        full = self.field.zeros((self.dim,))
        full[1:] = r
        return np.dot(self.change, full)

    def norm_mul(self, i: int, j: int) -> np.ndarray:
        """Product of unit-first basis vectors i and j, in unit-first coords."""
        return self.norm_structure[i, j]

    def to_json(self) -> dict:
        f = self.field
        return {
            "dim": self.dim,
            "basis": list(self.basis_labels),
            "scalars": f.mode,
            "unit": [f.to_json(v) for v in self.unit],
            "mul": f.matrix_to_json(self.structure),
        }


def _first_nonzero(field: ScalarField, vec: np.ndarray):
    if field.exact:
        return next((i for i, v in enumerate(vec) if v != 0), None)
    mags = np.abs(exactla.to_complex(vec))
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return None
    return int(np.argmax(mags > 1e-12 * top))


def make_algebra(dim, basis_labels, structure, unit, scalar_mode=RATIONAL, *,
                 name="algebra", check=True) -> Algebra:
    field = field_for(scalar_mode)
    if dim < 1:
        raise ShapeMismatch(f"algebra dimension must be >= 1, got {dim}")
    labels = tuple(str(x) for x in basis_labels)
    if len(labels) != dim or len(set(labels)) != dim:
        raise ShapeMismatch(f"need {dim} distinct basis labels, got {labels}")

    c = structure if isinstance(structure, np.ndarray) else field.array(structure)
    if c.shape != (dim, dim, dim):
        raise ShapeMismatch(f"structure tensor has shape {c.shape}, expected {(dim,) * 3}")
    if field.exact and c.dtype != object:
        c = field.array(structure)
    u = unit if isinstance(unit, np.ndarray) and unit.dtype == field.dtype else field.array(unit)
    if u.shape != (dim,):
        raise ShapeMismatch(f"unit has shape {u.shape}, expected ({dim},)")

    if check:
        _check_unit(field, c, u, labels)
        _check_associativity(field, c, labels)

    pivot = _first_nonzero(field, u)
    if pivot is None:
        raise UnitViolation("unit vector is zero")
    complement = tuple(i for i in range(dim) if i != pivot)
    change = field.zeros((dim, dim))
    change[:, 0] = u
    for col, idx in enumerate(complement, start=1):
        change[idx, col] = field.one
    try:
        change_inv = exactla.inverse(change)
    except (ValueError, np.linalg.LinAlgError):
        raise UnitViolation("unit cannot be pivoted into the basis",
                            unit=[str(v) for v in u])

    # products of unit-first basis vectors, re-expressed in unit-first coords
    mul_flat = c.reshape(dim, dim * dim)
    norm = field.zeros((dim, dim, dim))
    for a in range(dim):
        xa = change[:, a]
        tmp = np.dot(xa, mul_flat).reshape(dim, dim)
        for b in range(dim):
            prod = np.dot(change[:, b], tmp)
            norm[a, b] = np.dot(change_inv, prod)

    norm_labels = ("1",) + tuple(labels[i] for i in complement)
    return Algebra(dim=dim, basis_labels=labels, field=field, structure=c,
                   unit=u, pivot=pivot, complement_indices=complement,
                   change=change, change_inv=change_inv, norm_structure=norm,
                   norm_labels=norm_labels, name=name)


def _check_unit(field, c, u, labels):
    dim = len(u)
    tol = 0.0 if field.exact else 1e-12 * max(1.0, exactla.max_abs(c))
    mul_flat = c.reshape(dim, dim * dim)
    left = np.dot(u, mul_flat).reshape(dim, dim)       # left[j] = u * e_j
    for j in range(dim):
        ej = field.zeros((dim,))
        ej[j] = field.one
        if not exactla.is_zero_matrix(left[j] - ej, tol):
            raise UnitViolation(f"unit fails 1*{labels[j]} = {labels[j]}",
                                side="left", index=j)
        right = np.dot(u, np.dot(ej, mul_flat).reshape(dim, dim))
        if not exactla.is_zero_matrix(right - ej, tol):
            raise UnitViolation(f"unit fails {labels[j]}*1 = {labels[j]}",
                                side="right", index=j)


def _check_associativity(field, c, labels):
    dim = c.shape[0]
    tol = 0.0 if field.exact else 1e-12 * max(1.0, exactla.max_abs(c)) ** 3
    for i in range(dim):
        for j in range(dim):
            cij = c[i, j]                       # e_i e_j in coordinates
            for k in range(dim):
                lhs = np.dot(cij, c[:, k, :])   # (e_i e_j) e_k
                rhs = np.dot(c[j, k], c[i, :, :])   # e_i (e_j e_k)
                diff = lhs - rhs
                if not exactla.is_zero_matrix(diff, tol):
                    coord = next(l for l in range(dim) if diff[l] != 0) \
                        if field.exact else int(np.argmax(np.abs(exactla.to_complex(diff))))
                    raise AssociativityViolation(
                        f"({labels[i]}*{labels[j]})*{labels[k]} != "
                        f"{labels[i]}*({labels[j]}*{labels[k]}) in coordinate {coord}",
                        triple=(i, j, k), coordinate=coord)


# -- JSON loading -------------------------------------------------------------

def load_algebra(source, scalar_mode=None) -> Algebra:
    """Load from a dict or a JSON file with keys dim/basis/unit/mul/scalars."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        data = json.loads(path.read_text())
        default_name = path.stem
    else:
        data, default_name = dict(source), "algebra"
    try:
        dim = int(data["dim"])
        basis = data["basis"]
        unit_json = data["unit"]
        mul_json = data["mul"]
    except KeyError as exc:
        raise ShapeMismatch(f"algebra file is missing key {exc}") from None
    # parse with the mode the file was written in; convert afterwards, so a
    # rational [num, den] pair is never misread as a float [re, im] pair
    stored_mode = data.get("scalars", RATIONAL)
    stored = field_for(stored_mode)
    unit = stored.matrix_from_json(unit_json, (dim,))
    mul = stored.matrix_from_json(mul_json, (dim, dim, dim))
    mode = scalar_mode or stored_mode
    if mode != stored_mode:
        field = field_for(mode)
        if field.exact:
            conv = np.vectorize(field.coerce, otypes=[object])
            unit, mul = conv(unit), conv(mul)
        else:
            unit, mul = exactla.to_complex(unit), exactla.to_complex(mul)
    return make_algebra(dim, basis, mul, unit, scalar_mode=mode,
                        name=data.get("name", default_name))


# -- stock algebras ------------------------------------------------------------

def dual_numbers(scalar_mode=RATIONAL) -> Algebra:
    """k[x]/(x^2): unit plus one nilpotent generator."""
    c = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    c[0][0][0] = 1
    c[0][1][1] = 1
    c[1][0][1] = 1
    # x*x = 0
    return make_algebra(2, ("1", "x"), c, [1, 0], scalar_mode, name="dual-numbers")


def two_points(scalar_mode=RATIONAL) -> Algebra:
    """Functions on two points: orthogonal idempotents p, q with unit p + q.

    The unit is not a basis vector, which exercises the pivoted basis change."""
    c = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    c[0][0][0] = 1
    c[1][1][1] = 1
    return make_algebra(2, ("p", "q"), c, [1, 1], scalar_mode, name="two-points")


def matrix_units(scalar_mode=RATIONAL) -> Algebra:
    """2x2 matrices in the elementary-matrix basis E11, E12, E21, E22."""
    labels = ("E11", "E12", "E21", "E22")
    pos = {(1, 1): 0, (1, 2): 1, (2, 1): 2, (2, 2): 3}
    c = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for (i, j), a in pos.items():
        for (k, l), b in pos.items():
            if j == k:
                c[a][b][pos[(i, l)]] = 1
    return make_algebra(4, labels, c, [1, 0, 0, 1], scalar_mode, name="m2")


def cyclic_group_algebra(order=3, scalar_mode=RATIONAL) -> Algebra:
    """Group algebra of Z/order in the group-element basis."""
    labels = tuple(f"g{r}" for r in range(order))
    c = [[[0] * order for _ in range(order)] for _ in range(order)]
    for i in range(order):
        for j in range(order):
            c[i][j][(i + j) % order] = 1
    unit = [1] + [0] * (order - 1)
    return make_algebra(order, labels, c, unit, scalar_mode, name=f"z{order}")


BUILTIN_ALGEBRAS = {
    "dual-numbers": dual_numbers,
    "two-points": two_points,
    "m2": matrix_units,
    "z3": lambda mode=RATIONAL: cyclic_group_algebra(3, mode),
}


def builtin_algebra(name: str, scalar_mode=RATIONAL) -> Algebra:
    try:
        return BUILTIN_ALGEBRAS[name](scalar_mode)
    except KeyError:
        raise DimMismatch(f"unknown stock algebra {name!r}; "
                          f"available: {sorted(BUILTIN_ALGEBRAS)}") from None
