import pytest

from nchodge.errors import GridTooCoarse
from nchodge.morse import builtin_chart, morse_scan


def test_cosine_chart_two_families():
    rep = morse_scan(builtin_chart("cos-h"))
    fams = rep["families"]
    assert len(fams) == 2
    assert sorted(f["index"] for f in fams) == [0, 1]
    # maximum at h = 0 (index 1), minimum at h = 1/2 (index 0)
    cell = 1.0 / rep["n_h"]
    by_index = {f["index"]: f for f in fams}
    assert min(by_index[1]["h_mean"], 1.0 - by_index[1]["h_mean"]) <= cell
    assert abs(by_index[0]["h_mean"] - 0.5) <= cell
    assert all(f["count"] == rep["n_v"] for f in fams)
    assert not rep["degenerate_events"]
    assert not rep["flat_slices"]
    assert rep["almost_morse"] and rep["passed"]


def test_cubic_chart_birth_death():
    """h^3/3 - v*h: two Morse branches for v > 0 merging at the origin."""
    rep = morse_scan(builtin_chart("cubic-bd"))
    events = rep["degenerate_events"]
    assert len(events) == 1
    cell = (rep["h_range"][1] - rep["h_range"][0]) / rep["n_h"]
    assert abs(events[0]["h"]) <= cell
    assert events[0]["v"] == 0.0
    assert events[0]["birth_death_ok"]
    assert events[0]["jacobian_rank"] >= 1
    assert len(rep["families"]) == 2
    assert sorted(f["index"] for f in rep["families"]) == [0, 1]
    assert rep["almost_morse"] and rep["passed"]


def test_constant_chart_not_almost_morse():
    rep = morse_scan(builtin_chart("constant"))
    assert len(rep["flat_slices"]) == rep["n_v"]
    assert not rep["families"]
    assert not rep["passed"]


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        morse_scan(builtin_chart("cos-h"), n_h=8)
    with pytest.raises(GridTooCoarse):
        morse_scan(builtin_chart("cos-h"), n_v=1)


def test_unknown_chart():
    with pytest.raises(ValueError):
        builtin_chart("saddle")
