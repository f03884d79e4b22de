import numpy as np
import pytest

import nchodge as nc
from nchodge.errors import BadWeights, LeafTooSmall, ShapeMismatch
from nchodge.foliation import (builtin_model, intertwiner_ranks, load_model,
                               make_model, model_to_json, phi_vertex_values,
                               witten_complex)


def test_leaf_betti_numbers():
    circle = builtin_model("circle-leaves")
    assert nc.betti_numbers(circle.leaf.complex) == (1, 1)
    torus = builtin_model("torus-leaves")
    assert nc.betti_numbers(torus.leaf.complex) == (1, 2, 1)


def test_leaf_too_small():
    with pytest.raises(LeafTooSmall):
        make_model({"type": "circle", "n": 2}, [0.0])
    with pytest.raises(LeafTooSmall):
        make_model({"type": "torus", "nx": 2, "ny": 8}, [0.0])


def test_weights_must_normalize():
    spec = {"type": "circle", "n": 8}
    with pytest.raises(BadWeights):
        make_model(spec, [{"v": 0.0, "weight": 0.4}, {"v": 0.5, "weight": 0.4}])
    with pytest.raises(BadWeights):
        make_model(spec, [{"v": 0.0, "weight": -0.5}, {"v": 0.5, "weight": 1.5}])
    with pytest.raises(BadWeights):
        # all-or-none: mixing weighted and bare samples is ambiguous
        make_model(spec, [{"v": 0.0, "weight": 0.5}, 0.5])
    with pytest.raises(BadWeights):
        make_model(spec, [0.0, 0.5], metric_scale=0.0)
    model = make_model(spec, [0.0, 0.25, 0.5, 0.75])
    assert np.allclose(model.weights, 0.25)


def test_metric_scale_scales_grams():
    m = make_model({"type": "circle", "n": 8}, [0.0], metric_scale=3.0)
    assert np.allclose(m.leaf.complex.grams[1], 3.0 * np.eye(8))


def test_tau_zero_is_bit_identical():
    model = builtin_model("circle-leaves")
    deformed = witten_complex(model, "cos-h", 0.0)
    for cx in deformed.complexes:
        for d0, d1 in zip(model.leaf.complex.diffs, cx.diffs):
            assert np.array_equal(d0, d1)


def test_witten_preserves_complex_property():
    model = builtin_model("torus-leaves")
    deformed = witten_complex(model, "cos-hv", 2.5)
    for cx in deformed.complexes:
        assert np.allclose(cx.diffs[1] @ cx.diffs[0], 0.0, atol=1e-12)


def test_intertwiner_ranks_equal_betti():
    model = builtin_model("torus-leaves")
    ranks = intertwiner_ranks(model, "cos-hv", 5.0)
    for per_leaf in ranks:
        assert per_leaf == [1, 2, 1]


def test_sweep_report_structure():
    model = builtin_model("circle-leaves")
    rep = nc.witten_betti_sweep(model, "cos-h", (0.0, 2.0))
    assert rep["passed"]
    assert rep["base_betti"] == [1.0, 1.0]
    assert rep["rows"][0]["bit_identical"] is True
    assert all(row["matches_base"] for row in rep["rows"])
    assert rep["euler_from_betti"] == rep["euler_from_ranks"]


def test_phi_shape_checked():
    model = builtin_model("circle-leaves")
    with pytest.raises(ShapeMismatch):
        phi_vertex_values(model, lambda pts, v: np.zeros(3), 0.0)


def test_random_phi_sweep_stays_flat():
    model = builtin_model("circle-leaves")
    phi = nc.random_smooth_phi(np.random.default_rng(21), modes=1,
                               amplitude=0.3)
    rep = nc.witten_betti_sweep(model, phi, (0.0, 1.0, 5.0))
    assert rep["passed"]


def test_model_json_roundtrip(tmp_path):
    import json
    model = builtin_model("torus-leaves")
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_json(model)))
    back = load_model(str(path))
    assert tuple(back.leaf.complex.dims) == tuple(model.leaf.complex.dims)
    assert np.allclose(back.weights, model.weights)
    assert np.allclose(back.transversal, model.transversal)
