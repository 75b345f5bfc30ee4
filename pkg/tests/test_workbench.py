#!/usr/bin/env python3
"""Tests for state/ansatz ingestion, analysis reports, sweeps and boundary export."""

import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from steering_geometry.ansatz_box import FiniteAnsatz, SphericalAnsatz, principal_vertex
from steering_geometry.classify import check_packing
from steering_geometry.epr import epr_map
from steering_geometry.errors import NoBracketError, ParseError, StateValidationError
from steering_geometry.states import BellPhiPlus, ModifiedWerner, Product, RandomState, Werner, build
from steering_geometry.workbench import (
    SWEEP_COLUMNS,
    analyze,
    detect_and_decode,
    export_boundary,
    load_ansatz,
    load_state,
    parse_state_spec,
    sweep,
    sweep_grid,
)

Q_STAR = np.sqrt(0.2) / 0.6


def write_file(directory: str, name: str, data) -> str:
    path = os.path.join(directory, name)
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as f:
        f.write(data)
    return path


def curve(df, name: str, branch: str):
    sel = df[(df["curve"] == name) & (df["branch"] == branch)]
    return sel["x0"].to_numpy(), sel["b_parallel"].to_numpy()


def test_parse_state_specs():
    assert parse_state_spec("werner:p=0.4") == Werner(0.4)
    assert parse_state_spec("modified_werner:p=0.4,q=0.75") == ModifiedWerner(0.4, 0.75)
    assert parse_state_spec("bell") == BellPhiPlus()
    assert parse_state_spec("random:seed=7") == RandomState(7)
    assert parse_state_spec("product:az=0.5, bx=0.3") == Product((0.0, 0.0, 0.5), (0.3, 0.0, 0.0))


def test_parse_state_spec_errors_name_the_field():
    cases = {
        "klein:p=0.1": "name",
        "werner": "p",
        "werner:q=0.3": "q",
        "werner:p=abc": "p",
        "modified_werner:p=0.4": "q",
    }
    for text, field in cases.items():
        with pytest.raises(ParseError) as exc:
            parse_state_spec(text)
        assert exc.value.field == field, text


def test_detect_and_decode_handles_bom_and_latin1():
    assert detect_and_decode("\ufeff{}".encode("utf-8")) == "{}"
    text = detect_and_decode('{"comment": "caf\xe9"}'.encode("latin-1"))
    assert json.loads(text)["comment"].startswith("caf")


def test_load_state_files():
    with tempfile.TemporaryDirectory() as tmpdir:
        theta = np.diag([1.0, 0.3, -0.3, 0.3]).tolist()
        path = write_file(tmpdir, "werner.json", json.dumps({"theta": theta}))
        np.testing.assert_allclose(load_state(path).theta, build(Werner(0.3)).theta)

        rho = build(Werner(0.3)).density
        path = write_file(
            tmpdir,
            "rho.json",
            json.dumps({"rho_re": rho.real.tolist(), "rho_im": rho.imag.tolist(), "comment": "caf\xe9"}, ensure_ascii=False).encode("latin-1"),
        )
        np.testing.assert_allclose(load_state(path).theta, build(Werner(0.3)).theta, atol=1e-12)


def test_load_state_file_errors():
    with tempfile.TemporaryDirectory() as tmpdir:
        theta = np.eye(4).tolist()
        both = write_file(tmpdir, "both.json", json.dumps({"theta": theta, "rho_re": theta, "rho_im": theta}))
        with pytest.raises(ParseError):
            load_state(both)

        broken = write_file(tmpdir, "broken.json", '{\n  "theta": [\n    [1, 0, 0, 0],\n  oops\n}')
        with pytest.raises(ParseError) as exc:
            load_state(broken)
        assert exc.value.line == 4

        shape = write_file(tmpdir, "shape.json", json.dumps({"theta": [[1, 0], [0, 1]]}))
        with pytest.raises(ParseError) as exc:
            load_state(shape)
        assert exc.value.field == "theta"

        not_psd = write_file(tmpdir, "not_psd.json", json.dumps({"theta": np.diag([1.0, 1, 1, 1]).tolist()}))
        with pytest.raises(StateValidationError):
            load_state(not_psd)

    with pytest.raises(FileNotFoundError):
        load_state(os.path.join(tempfile.gettempdir(), "no-such-state.json"))


def test_load_ansatz_choices():
    assert load_ansatz("uniform").is_uniform
    mixture = load_ansatz("mixture:50")
    assert isinstance(mixture, SphericalAnsatz) and len(mixture.weights) == 50
    with pytest.raises(ParseError):
        load_ansatz("mixture:zero")
    with pytest.raises(ParseError):
        load_ansatz("mixture:0")

    with tempfile.TemporaryDirectory() as tmpdir:
        gens = [[0.25, 0.1, 0, 0], [0.25, -0.1, 0, 0], [0.25, 0, 0.1, 0], [0.25, 0, 0, 0.1]]
        finite = load_ansatz(write_file(tmpdir, "box.json", json.dumps(gens)))
        assert isinstance(finite, FiniteAnsatz) and len(finite) == 4

        doc = {"mixture": [{"w": 0.5, "n": [0, 0, 2]}, {"w": 0.5, "n": [0, 0, -1]}]}
        mix = load_ansatz(write_file(tmpdir, "mix.json", json.dumps(doc)))
        np.testing.assert_allclose(mix.directions, [[0, 0, 1], [0, 0, -1]])

        bad = write_file(tmpdir, "bad.json", json.dumps([[0.0, 0, 0, 1]]))
        with pytest.raises(ParseError) as exc:
            load_ansatz(bad)
        assert exc.value.field == "generators"

        weights = write_file(tmpdir, "weights.json", json.dumps({"mixture": [{"w": 0.4, "n": [0, 0, 1]}]}))
        with pytest.raises(ParseError):
            load_ansatz(weights)


def test_mixture_ansatz_applies_to_unbiased_states():
    """Antipodal point masses keep the principal vertex at I/2 exactly."""
    mixture = load_ansatz("mixture:500")
    np.testing.assert_allclose(principal_vertex(mixture).as_array(), [1, 0, 0, 0], atol=1e-12)
    assert len(load_ansatz("mixture:7").weights) == 8

    cert = check_packing(epr_map(build(Werner(0.3))), mixture, n_directions=512)
    assert cert.contained
    assert not check_packing(epr_map(build(Werner(0.9))), mixture, n_directions=512).contained

    doc = json.loads(analyze("werner:p=0.3", ("mixture:500",), n_directions=512).to_json())
    assert doc["packing"]["mixture:500"]["contained"]


def test_analyze_entangled_werner():
    report = analyze("werner:p=0.4", n_directions=512)
    assert not report.ppt[0]
    assert report.ppt[1] == pytest.approx(-0.05)
    assert not report.separability.separable
    assert report.packing["uniform"].contained
    np.testing.assert_allclose(report.ellipsoid.semiaxes, [0.4, 0.4, 0.4], atol=1e-12)
    assert report.to_json() == analyze("werner:p=0.4", n_directions=512).to_json()


def test_analyze_separable_werner():
    doc = json.loads(analyze("werner:p=0.2", n_directions=512).to_json())
    assert doc["separability"]["separable"]
    assert doc["separability"]["method"] == "BoxCertificate"
    assert len(doc["separability"]["certificate"]) == 4
    assert doc["reduced_b"] == [1.0, 0.0, 0.0, 0.0]


def test_analyze_marks_inapplicable_packing():
    """Boxes anchored at I/2 do not apply when Bob's marginal is biased."""
    doc = json.loads(analyze("product:bz=0.5", n_directions=256).to_json())
    assert doc["packing"]["uniform"] == {"applicable": False}
    assert doc["separability"]["separable"]


def test_sweep_grid():
    assert len(sweep_grid(0.0, 1.0, 0.01)) == 101
    assert sweep_grid(0.0, 1.0, 0.01)[-1] == 1.0
    assert len(sweep_grid(0.5, 0.4, 0.01)) == 0


def test_werner_sweep_csv():
    with tempfile.TemporaryDirectory() as tmpdir:
        out = os.path.join(tmpdir, "werner.csv")
        df = sweep("werner", 0.0, 1.0, step=0.01, n_directions=256, out=out)
        assert list(df.columns) == SWEEP_COLUMNS
        assert len(df) == 101
        at = lambda p: df[np.isclose(df["param"], p)].iloc[0]
        assert at(0.49)["contained"] and at(0.49)["packing_slack"] >= -1e-9
        assert not at(0.51)["contained"] and at(0.51)["packing_slack"] < 0
        assert at(0.33)["separable"] and not at(0.34)["separable"]

        with open(out, "rb") as f:
            data = f.read()
        assert data.startswith(b"kind,param,ppt_min_eig,packing_slack,separable,contained\r\n")
        assert data.count(b"\r\n") == 102


def test_empty_sweep_writes_header_only():
    with tempfile.TemporaryDirectory() as tmpdir:
        out = os.path.join(tmpdir, "empty.csv")
        df = sweep("werner", 0.5, 0.4, out=out)
        assert df.empty
        with open(out, "rb") as f:
            assert f.read() == b"kind,param,ppt_min_eig,packing_slack,separable,contained\r\n"


def test_modified_werner_bisection():
    """The PPT predicate does not change with q at p = 0.4, so only containment is bisected."""
    df = sweep("modified_werner", 0.0, 1.0, step=None, bisect=True, p_fixed=0.4, bisect_tol=1e-4)
    assert list(df["kind"]) == ["threshold_contained"]
    assert df["param"].iloc[0] == pytest.approx(Q_STAR, abs=1e-3)


def test_werner_bisection_finds_both_thresholds():
    df = sweep("werner", 0.0, 1.0, step=None, bisect=True, bisect_tol=1e-4)
    thresholds = dict(zip(df["kind"], df["param"]))
    assert thresholds["threshold_separable"] == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert thresholds["threshold_contained"] == pytest.approx(0.5, abs=1e-3)


def test_bisection_without_bracket():
    with pytest.raises(NoBracketError):
        sweep("werner", 0.6, 0.9, step=None, bisect=True)


def test_export_uniform_box_only():
    df = export_boundary(SphericalAnsatz.uniform(), n_points=101)
    assert set(df["curve"]) == {"box", "light_cone"}
    x, b = curve(df, "box", "+")
    np.testing.assert_allclose(b, x * (1 - x), atol=1e-12)
    _, b_minus = curve(df, "box", "-")
    np.testing.assert_allclose(b_minus, -b, atol=1e-12)
    _, cone = curve(df, "light_cone", "+")
    assert np.all(b <= cone + 1e-12)


def test_export_werner_tangency():
    """At p = 1/2 the steering curve touches the box only at x0 = 1/2."""
    df = export_boundary(SphericalAnsatz.uniform(), epr_map(build(Werner(0.5))), n_points=101)
    x, box = curve(df, "box", "+")
    xs, steer = curve(df, "steering", "+")
    np.testing.assert_allclose(x, xs)
    np.testing.assert_allclose(steer, 0.5 * np.minimum(x, 1 - x), atol=1e-8)
    gap = box - steer
    assert abs(gap[50]) < 1e-6
    inner = np.r_[1:50, 51:100]
    assert np.all(gap[inner] > 0)


def test_export_modified_werner_touch():
    """Near the critical q the curves touch around x0 = (1 + q(1 - p))/2."""
    ansatz = SphericalAnsatz.uniform()

    def min_gap(q: float):
        df = export_boundary(ansatz, epr_map(build(ModifiedWerner(0.4, q))), n_points=1001)
        x, box = curve(df, "box", "+")
        _, steer = curve(df, "steering", "+")
        window = (x >= 0.2) & (x <= 0.95)
        gap = (box - steer)[window]
        return gap.min(), x[window][np.argmin(gap)]

    gap, where = min_gap(0.745)
    assert -1e-6 <= gap <= 1e-3
    assert 0.6 <= where <= 0.85

    gap, _ = min_gap(0.76)
    assert gap < 0
