"""Product foliation models at desk scale: one combinatorial leaf type, a
finite transversal with positive weights summing to one, and leafwise
Hodge/Witten machinery.

Every transversal sample carries a copy of the same leaf complex (a cycle
graph or a periodic torus grid); a leafwise function phi may vary across
the transversal, phi(points, v).  Tangential Betti numbers are the
weight-averaged kernel dimensions of the leafwise Laplacians -- for a
finite transversal this weighted sum is exactly the transverse-measure
integral it stands in for.

The Witten deformation conjugates each leaf differential,

    D_tau = diag(e^{-tau * phi_(k+1)}) @ D @ diag(e^{tau * phi_(k)}),

where the degree-k scale factors average phi over the vertices of each
k-cell (vertex value, edge-endpoint mean, face-corner mean).  Whatever
the positive scalings, this is a similarity of complexes: kernels map to
kernels, so the weighted Betti numbers cannot move with tau.  The sweep
verifies that, and also exhibits the isomorphism: the diagonal map
T = diag(e^{-tau phi_(k)}) pairs tau = 0 harmonics with deformed
harmonics through a full-rank matrix U = Q_tau^H T Q_0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadWeights, LeafTooSmall, ShapeMismatch
from .hodge import CochainComplex, betti_numbers, laplacians, make_complex


@dataclass
class Leaf:
    complex: CochainComplex
    vertex_points: np.ndarray   # (n_vertices, coord_dim), coords in [0,1)
    cell_vertices: list         # per degree: (dims[k], m_k) vertex indices
    kind: str
    meta: dict


@dataclass
class FoliatedModel:
    leaf: Leaf
    transversal: np.ndarray     # sample coordinates v
    weights: np.ndarray         # positive, sum to 1
    metric_scale: float = 1.0
    name: str = "model"

    @property
    def top(self):
        return self.leaf.complex.top


def circle_leaf(n) -> Leaf:
    """Cycle graph on n sites: D0 is the forward difference; Betti (1, 1)."""
    if n < 3:
        raise LeafTooSmall(f"circle leaf needs at least 3 sites, got {n}", sites=n)
    d0 = np.zeros((n, n), complex)
    for j in range(n):
        d0[j, (j + 1) % n] = 1.0
        d0[j, j] -= 1.0
    cx = make_complex((n, n), [d0], name=f"circle({n})")
    verts = (np.arange(n) / n).reshape(-1, 1)
    edges = np.array([[j, (j + 1) % n] for j in range(n)])
    return Leaf(complex=cx, vertex_points=verts,
                cell_vertices=[np.arange(n).reshape(-1, 1), edges],
                kind="circle", meta={"n": n})


def torus_leaf(nx, ny=None) -> Leaf:
    """Periodic nx-by-ny grid with square faces; Betti (1, 2, 1)."""
    ny = nx if ny is None else ny
    if nx < 3 or ny < 3:
        raise LeafTooSmall(f"torus leaf needs at least 3 sites per axis, got {nx}x{ny}",
                           nx=nx, ny=ny)
    nv = nx * ny
    ne = 2 * nv

    def v(i, j):
        return (i % nx) * ny + (j % ny)

    d0 = np.zeros((ne, nv), complex)
    edge_verts = np.zeros((ne, 2), dtype=int)
    for i in range(nx):
        for j in range(ny):
            ex, ey = v(i, j), nv + v(i, j)
            d0[ex, v(i + 1, j)] += 1.0
            d0[ex, v(i, j)] -= 1.0
            d0[ey, v(i, j + 1)] += 1.0
            d0[ey, v(i, j)] -= 1.0
            edge_verts[ex] = (v(i, j), v(i + 1, j))
            edge_verts[ey] = (v(i, j), v(i, j + 1))
    d1 = np.zeros((nv, ne), complex)
    face_verts = np.zeros((nv, 4), dtype=int)
    for i in range(nx):
        for j in range(ny):
            f = v(i, j)
            d1[f, v(i, j)] += 1.0                 # x-edge at (i, j)
            d1[f, nv + v(i + 1, j)] += 1.0        # y-edge at (i+1, j)
            d1[f, v(i, j + 1)] -= 1.0             # x-edge at (i, j+1)
            d1[f, nv + v(i, j)] -= 1.0            # y-edge at (i, j)
            face_verts[f] = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1))
    cx = make_complex((nv, ne, nv), [d0, d1], name=f"torus({nx}x{ny})")
    verts = np.array([[i / nx, j / ny] for i in range(nx) for j in range(ny)])
    return Leaf(complex=cx, vertex_points=verts,
                cell_vertices=[np.arange(nv).reshape(-1, 1), edge_verts, face_verts],
                kind="torus", meta={"nx": nx, "ny": ny})


_LEAF_BUILDERS = {
    "circle": lambda spec: circle_leaf(int(spec.get("n", 16))),
    "torus": lambda spec: torus_leaf(int(spec.get("nx", 8)),
                                     int(spec.get("ny", spec.get("nx", 8)))),
}


def make_model(leaf_spec, transversal_spec, metric_scale=1.0,
               name="model") -> FoliatedModel:
    """leaf_spec: {"type": "circle", "n": 16} or {"type": "torus", "nx": 8,
    "ny": 8}.  transversal_spec: list of {"v": float, "weight": float} (or
    bare v values, weighted uniformly).  Weights must be positive and sum
    to 1."""
    kind = leaf_spec.get("type")
    if kind not in _LEAF_BUILDERS:
        raise ValueError(f"unknown leaf type {kind!r} (choose from "
                         f"{sorted(_LEAF_BUILDERS)})")
    leaf = _LEAF_BUILDERS[kind](leaf_spec)
    if not transversal_spec:
        raise BadWeights("transversal needs at least one sample")
    vs, ws = [], []
    uniform = not any(isinstance(s, dict) and "weight" in s for s in transversal_spec)
    for idx, s in enumerate(transversal_spec):
        if isinstance(s, dict):
            vs.append(float(s.get("v", idx)))
            ws.append(float(s["weight"]) if "weight" in s else None)
        else:
            vs.append(float(s))
            ws.append(None)
    if uniform:
        ws = [1.0 / len(vs)] * len(vs)
    elif any(w is None for w in ws):
        raise BadWeights("either weight every transversal sample or none")
    ws = np.array(ws, dtype=float)
    if np.any(~np.isfinite(ws)) or np.any(ws <= 0):
        raise BadWeights(f"transverse weights must be positive and finite, got {ws.tolist()}",
                         weights=ws.tolist())
    if abs(ws.sum() - 1.0) > 1e-9:
        raise BadWeights(f"transverse weights must sum to 1, got {ws.sum()!r}",
                         total=float(ws.sum()))
    scale = float(metric_scale)
    if not np.isfinite(scale) or scale <= 0:
        raise BadWeights(f"metric scale must be positive and finite, got {metric_scale}")
    if scale != 1.0:
        cx = leaf.complex
        grams = [scale ** k * np.eye(cx.dims[k], dtype=complex)
                 for k in range(cx.top + 1)]
        leaf.complex = make_complex(cx.dims, cx.diffs, grams, name=cx.name)
    return FoliatedModel(leaf=leaf, transversal=np.array(vs, dtype=float),
                         weights=ws, metric_scale=scale, name=name)


def load_model(source) -> FoliatedModel:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            source = json.load(fh)
    if not isinstance(source, dict) or "leaf" not in source or "transversal" not in source:
        raise BadWeights("model file needs 'leaf' and 'transversal' entries")
    return make_model(source["leaf"], source["transversal"],
                      metric_scale=source.get("metric_scale", 1.0),
                      name=source.get("name", "model"))


def model_to_json(model: FoliatedModel) -> dict:
    leaf = dict(model.leaf.meta)
    leaf["type"] = model.leaf.kind
    return {"name": model.name, "leaf": leaf,
            "transversal": [{"v": float(v), "weight": float(w)}
                            for v, w in zip(model.transversal, model.weights)],
            "metric_scale": float(model.metric_scale)}


PHI_PROFILES = {
    "zero": lambda pts, v: np.zeros(pts.shape[0]),
    "cos-h": lambda pts, v: np.cos(2 * np.pi * pts[:, 0]),
    "cos-hv": lambda pts, v: np.cos(2 * np.pi * pts[:, 0]) * (1.0 + 0.5 * np.sin(v)),
}


def resolve_phi(phi):
    if callable(phi):
        return phi
    try:
        return PHI_PROFILES[phi]
    except KeyError:
        raise ValueError(f"unknown phi profile {phi!r} (choose from "
                         f"{sorted(PHI_PROFILES)})") from None


def random_smooth_phi(rng, modes=2, amplitude=1.0):
    """Random low-order trigonometric polynomial in the leaf coordinates,
    modulated smoothly by the transversal coordinate."""
    ca = rng.normal(scale=amplitude, size=(modes + 1, 2))
    cb = rng.normal(scale=amplitude, size=(modes + 1, 2))
    vshift = rng.normal(scale=0.5)

    def phi(pts, v):
        out = np.zeros(pts.shape[0])
        for m in range(modes + 1):
            for axis in range(min(2, pts.shape[1])):
                t = 2 * np.pi * m * pts[:, axis]
                out = out + ca[m, axis] * np.cos(t) + cb[m, axis] * np.sin(t)
        return out * (1.0 + 0.25 * np.sin(v + vshift))

    return phi


def phi_vertex_values(model: FoliatedModel, phi, v) -> np.ndarray:
    vals = np.asarray(resolve_phi(phi)(model.leaf.vertex_points, v), dtype=float)
    vals = vals.reshape(-1)
    nv = model.leaf.vertex_points.shape[0]
    if vals.shape[0] != nv:
        raise ShapeMismatch(
            f"phi returned {vals.shape[0]} values for {nv} leaf vertices")
    return vals


def phi_per_degree(leaf: Leaf, vertex_values) -> list:
    """Degree-k diagonal weights: phi averaged over each k-cell's vertices."""
    return [np.asarray(vertex_values)[cells].mean(axis=1)
            for cells in leaf.cell_vertices]


def witten_leaf_complex(leaf: Leaf, vertex_values, tau) -> CochainComplex:
    """One deformed leaf complex; tau = 0 reproduces the differentials
    bit for bit because every scale factor is exactly exp(0) = 1."""
    tau = float(tau)
    per_deg = phi_per_degree(leaf, vertex_values)
    cx = leaf.complex
    diffs = []
    for k, d in enumerate(cx.diffs):
        row = np.exp(-tau * per_deg[k + 1]).reshape(-1, 1)
        col = np.exp(tau * per_deg[k]).reshape(1, -1)
        diffs.append(row * d * col)
    return make_complex(cx.dims, diffs, cx.grams,
                        name=f"{cx.name}@tau={tau}", tol=1e-9)


@dataclass
class DeformedModel:
    model: FoliatedModel
    tau: float
    complexes: list    # one per transversal sample


def witten_complex(model: FoliatedModel, phi, tau) -> DeformedModel:
    cxs = [witten_leaf_complex(model.leaf, phi_vertex_values(model, phi, v), tau)
           for v in model.transversal]
    return DeformedModel(model=model, tau=float(tau), complexes=cxs)


def tangential_betti(model: FoliatedModel, phi=None, tau=0.0, rel_tol=1e-8) -> list:
    """Weight-averaged leafwise Betti numbers (real numbers in general)."""
    if phi is None or tau == 0.0:
        per_leaf = betti_numbers(model.leaf.complex, rel_tol)
        return [float(b) for b in per_leaf]    # weights sum to 1
    deformed = witten_complex(model, phi, tau)
    out = np.zeros(model.top + 1)
    for cx, w in zip(deformed.complexes, model.weights):
        out += w * np.array(betti_numbers(cx, rel_tol), dtype=float)
    return [float(b) for b in out]


def harmonic_basis(cx: CochainComplex, k, rel_tol=1e-8) -> np.ndarray:
    """Basis of Ker Delta_k, orthonormal for the Gram inner product."""
    lap = laplacians(cx)[k]
    if lap.shape[0] == 0:
        return np.zeros((0, 0), complex)
    import scipy.linalg
    L = scipy.linalg.cholesky(cx.grams[k], lower=True)
    linv = scipy.linalg.solve_triangular(L, np.eye(lap.shape[0], dtype=complex),
                                         lower=True)
    S = L.conj().T @ lap @ linv.conj().T
    S = (S + S.conj().T) / 2
    eigs, vecs = np.linalg.eigh(S)
    scale = max(1.0, float(eigs.max()))
    kernel = vecs[:, eigs < rel_tol * scale]
    return linv.conj().T @ kernel


def intertwiner_ranks(model: FoliatedModel, phi, tau, rel_tol=1e-8):
    """Per sample and degree: rank of U = Q_tau^H T Q_0 pairing the
    undeformed harmonics with the deformed ones through the diagonal
    conjugating map.  Full rank exhibits the kernel isomorphism."""
    from . import exactla
    base = [harmonic_basis(model.leaf.complex, k, rel_tol)
            for k in range(model.top + 1)]
    deformed = witten_complex(model, phi, tau)
    table = []
    for v, cx in zip(model.transversal, deformed.complexes):
        per_deg = phi_per_degree(model.leaf, phi_vertex_values(model, phi, v))
        row = []
        for k in range(model.top + 1):
            q0 = base[k]
            if q0.shape[1] == 0:
                row.append(0)
                continue
            qt = harmonic_basis(cx, k, rel_tol)
            t = np.exp(-float(tau) * per_deg[k]).reshape(-1, 1)
            pairing = qt.conj().T @ cx.grams[k] @ (t * q0)
            row.append(exactla.rank(pairing, 1e-8))
        table.append(row)
    return table


def witten_betti_sweep(model: FoliatedModel, phi, taus, rel_tol=1e-8) -> dict:
    """Sweep tau; per value report the weighted Betti numbers, whether they
    match tau = 0, the intertwiner ranks, and at tau = 0 bit-identity of
    the deformed differentials with the originals."""
    taus = [float(t) for t in taus]
    base = tangential_betti(model, rel_tol=rel_tol)
    base_int = betti_numbers(model.leaf.complex, rel_tol)
    euler_ranks = model.leaf.complex.euler_characteristic()
    euler_betti = sum((-1) ** k * b for k, b in enumerate(base))
    rows = []
    all_ok = abs(euler_betti - euler_ranks) <= 1e-8
    for tau in taus:
        deformed = witten_complex(model, phi, tau)
        betti = np.zeros(model.top + 1)
        bit_identical = True
        for cx, w in zip(deformed.complexes, model.weights):
            if tau == 0.0:
                for d0, dt in zip(model.leaf.complex.diffs, cx.diffs):
                    if not np.array_equal(d0, dt):
                        bit_identical = False
            betti += w * np.array(betti_numbers(cx, rel_tol), dtype=float)
        ranks = intertwiner_ranks(model, phi, tau, rel_tol)
        matches = bool(np.allclose(betti, base, rtol=0, atol=1e-8))
        ranks_ok = all(tuple(row) == tuple(base_int) for row in ranks)
        ok = matches and ranks_ok and (tau != 0.0 or bit_identical)
        row = {"tau": tau,
               "betti": [float(b) for b in betti],
               "matches_base": matches,
               "intertwiner_ranks": ranks,
               "intertwiner_ranks_ok": bool(ranks_ok)}
        if tau == 0.0:
            row["bit_identical"] = bool(bit_identical)
        row["passed"] = bool(ok)
        all_ok = all_ok and ok
        rows.append(row)
    return {"model": model.name,
            "leaf": model.leaf.complex.name,
            "phi": phi if isinstance(phi, str) else getattr(phi, "__name__", "custom"),
            "weights": [float(w) for w in model.weights],
            "transversal": [float(v) for v in model.transversal],
            "base_betti": base,
            "euler_from_betti": float(euler_betti),
            "euler_from_ranks": int(euler_ranks),
            "taus": taus,
            "rows": rows,
            "passed": bool(all_ok)}


BUILTIN_MODELS = {
    "circle-leaves": lambda: make_model(
        {"type": "circle", "n": 16},
        [{"v": 0.0, "weight": 0.25}, {"v": 0.25, "weight": 0.25},
         {"v": 0.5, "weight": 0.25}, {"v": 0.75, "weight": 0.25}],
        name="circle-leaves"),
    "torus-leaves": lambda: make_model(
        {"type": "torus", "nx": 8, "ny": 8},
        [{"v": 0.0, "weight": 0.3}, {"v": 0.5, "weight": 0.7}],
        name="torus-leaves"),
}


def builtin_model(name) -> FoliatedModel:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise ValueError(f"unknown model {name!r} (choose from "
                         f"{sorted(BUILTIN_MODELS)})") from None
