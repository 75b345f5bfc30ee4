#!/usr/bin/env python3
"""Tests for the command-line interface and its exit codes."""

import json
import os
import sys
import tempfile
from pathlib import Path

import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import cli
from steering_geometry.errors import GeometricInfeasibilityError


def test_analyze_writes_json():
    """analyze writes a deterministic JSON report."""
    with tempfile.TemporaryDirectory() as tmpdir:
        out = os.path.join(tmpdir, "report.json")
        assert cli.main(["analyze", "--state", "werner:p=0.4", "--directions", "256", "-o", out]) == cli.EXIT_OK
        with open(out, encoding="utf-8") as f:
            doc = json.load(f)
        assert doc["ppt"]["is_ppt"] is False
        assert doc["packing"]["uniform"]["contained"] is True

    print("✓ Analyze JSON test passed")


def test_analyze_csv_row(capsys):
    assert cli.main(["analyze", "--state", "werner:p=0.2", "--directions", "256", "--format", "csv"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.endswith("\r\n") and out.count("\r\n") == 2
    header = out.splitlines()[0]
    assert header.startswith("source,is_ppt,ppt_min_eig,separable,method")
    assert "contained[uniform]" in header


def test_parse_errors_exit_one(capsys):
    assert cli.main(["analyze", "--state", "werner:p=oops"]) == cli.EXIT_PARSE
    assert "field 'p'" in capsys.readouterr().err
    assert cli.main(["analyze", "--state", "werner:p=1.5"]) == cli.EXIT_PARSE
    assert cli.main(["sweep", "--family", "modified_werner", "--lo", "0", "--hi", "1"]) == cli.EXIT_PARSE
    assert cli.main(["boundary", "--plane", "0,0,0"]) == cli.EXIT_PARSE


def test_argparse_errors_exit_one():
    assert cli.main(["frobnicate"]) == cli.EXIT_PARSE
    assert cli.main(["analyze"]) == cli.EXIT_PARSE
    assert cli.main(["sweep", "--family", "isotropic"]) == cli.EXIT_PARSE


def test_missing_file_exits_three():
    missing = os.path.join(tempfile.gettempdir(), "missing-state-file.json")
    assert cli.main(["analyze", "--state", missing]) == cli.EXIT_IO


def test_geometric_failure_exits_two(monkeypatch):
    def fail(*args, **kwargs):
        raise GeometricInfeasibilityError("cone generators do not surround the centre")

    monkeypatch.setattr(cli, "analyze", fail)
    assert cli.main(["analyze", "--state", "werner:p=0.3"]) == cli.EXIT_GEOMETRY


def test_empty_sweep_succeeds():
    with tempfile.TemporaryDirectory() as tmpdir:
        out = os.path.join(tmpdir, "sweep.csv")
        assert cli.main(["sweep", "--lo", "0.5", "--hi", "0.4", "-o", out]) == cli.EXIT_OK
        df = pd.read_csv(out)
        assert df.empty
        assert list(df.columns) == ["kind", "param", "ppt_min_eig", "packing_slack", "separable", "contained"]


def test_sweep_without_bracket_exits_one():
    assert cli.main(["sweep", "--lo", "0.6", "--hi", "0.9", "--step", "0.1", "--bisect"]) == cli.EXIT_PARSE


def test_boundary_export():
    with tempfile.TemporaryDirectory() as tmpdir:
        out = os.path.join(tmpdir, "boundary.csv")
        code = cli.main(["boundary", "--state", "werner:p=0.5", "--points", "21", "--plane", "1,0,0", "-o", out])
        assert code == cli.EXIT_OK
        df = pd.read_csv(out)
        assert list(df.columns) == ["curve", "branch", "x0", "b_parallel"]
        assert set(df["curve"]) == {"box", "steering", "light_cone"}
        assert len(df) == 3 * 2 * 21

    print("✓ Boundary export test passed")


def test_help_exits_zero():
    assert cli.main(["--help"]) == cli.EXIT_OK


def test_stdout_csv_matches_file_layout(capsys):
    """CSV on stdout uses the same CRLF rows as written files."""
    assert cli.main(["sweep", "--lo", "0", "--hi", "0.1", "--step", "0.05", "--directions", "256"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("kind,param,ppt_min_eig,packing_slack,separable,contained\r\n")
    assert out.count("\r\n") == 4
