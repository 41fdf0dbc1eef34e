"""Harness tests: config merging, family descriptors, outputs, exit codes."""

import csv
import filecmp
import json
import math
import os

import numpy as np
import pytest

from freqbounds import bounds, cli, geometry, solver


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def test_config_validation_rejects_bad_fields():
    with pytest.raises(ValueError):
        cli.RunConfig(h=-0.1)
    with pytest.raises(ValueError):
        cli.RunConfig(qs=(0.5,))
    with pytest.raises(ValueError):
        cli.RunConfig(seed=-1)
    with pytest.raises(ValueError):
        cli.RunConfig(jobs=0)
    with pytest.raises(ValueError):
        cli.RunConfig(property_trials=-5)
    with pytest.raises(ValueError):
        cli.RunConfig(slab_lengths=(0.0,))


def test_config_digest_tracks_content():
    a = cli.RunConfig()
    b = cli.RunConfig()
    c = cli.RunConfig(seed=999)
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"qs": [1.0, 2.0], "seed": 7}))
    data = cli.load_config_file(str(path))
    cfg = cli._merge_config(data, cli.build_parser().parse_args(["pi2q"]))
    assert cfg.qs == (1.0, 2.0)
    assert cfg.seed == 7


def test_config_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"spacing": 0.1}))
    with pytest.raises(ValueError):
        cli.load_config_file(str(path))


def test_flags_override_config_file_and_env_wins(tmp_path, monkeypatch):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 7, "out_dir": "from-file"}))
    args = cli.build_parser().parse_args(
        ["pi2q", "--config", str(path), "--seed", "11", "--out", "from-flag"]
    )
    cfg = cli._merge_config(cli.load_config_file(str(path)), args)
    assert cfg.seed == 11
    assert cfg.out_dir == "from-flag"

    monkeypatch.setenv("FREQ_OUT", "from-env")
    cfg = cli._merge_config(cli.load_config_file(str(path)), args)
    assert cfg.out_dir == "from-env"


def test_global_flags_accepted_before_subcommand():
    args = cli.build_parser().parse_args(["--seed", "3", "pi2q"])
    cfg = cli._merge_config({}, args)
    assert cfg.seed == 3


# ---------------------------------------------------------------------------
# Family descriptors
# ---------------------------------------------------------------------------


def test_default_family_composition():
    fam = cli.generate_family("default", 1234)
    assert [sid for sid, _ in fam] == [
        "disk",
        "square",
        "hexagon",
        "random-0",
        "random-1",
        "random-2",
        "slab-L2",
        "slab-L4",
        "slab-L8",
        "slab-L16",
        "union",
    ]


def test_family_is_reproducible_and_seed_clause_overrides():
    fam1 = cli.generate_family("random:2", 5)
    fam2 = cli.generate_family("random:2", 5)
    for (_, s1), (_, s2) in zip(fam1, fam2):
        assert np.array_equal(s1.vertices, s2.vertices)
    inline1 = cli.generate_family("random:1 seed:42", 5)
    inline2 = cli.generate_family("random:1 seed:42", 6)
    assert np.array_equal(inline1[0][1].vertices, inline2[0][1].vertices)


def test_slab_clause_builds_unit_thickness_rectangles():
    fam = cli.generate_family("slabs:2,4,8", 0)
    assert [sid for sid, _ in fam] == ["slab-L2", "slab-L4", "slab-L8"]
    for _, shape in fam:
        assert geometry.inradius(shape).inradius == pytest.approx(0.5, abs=1e-12)


def test_regular_clause_unit_circumradius():
    fam = cli.generate_family("regular:8,16,32", 0)
    assert [sid for sid, _ in fam] == ["regular-8", "regular-16", "regular-32"]
    for _, shape in fam:
        assert np.max(np.linalg.norm(shape.vertices, axis=1)) == pytest.approx(1.0)


def test_family_rejects_unknown_and_duplicate_clauses():
    with pytest.raises(ValueError):
        cli.generate_family("pentagon:5", 0)
    with pytest.raises(ValueError):
        cli.generate_family("disk disk", 0)


def test_random_hulls_are_valid_polygons():
    fam = cli.generate_family("random:10", 2024)
    for _, shape in fam:
        assert shape.num_edges >= 3
        assert shape.area > 0.0


def test_shape_files_override_family(tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(json.dumps({"type": "ball", "dim": 2, "radius": 1.0}))
    cfg = cli.RunConfig(shape_files=(str(path),), family="default")
    fam = cli.load_family(cfg)
    assert len(fam) == 1
    assert fam[0][0] == "ball"
    assert isinstance(fam[0][1], geometry.BallShape)


def test_empty_family_descriptor_gives_no_shapes():
    assert cli.load_family(cli.RunConfig(family="")) == []


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_cell_formatting():
    assert cli._cell(0.1) == "0.1"
    assert cli._cell(1.0 / 3.0) == repr(1.0 / 3.0)
    assert cli._cell(True) == "true"
    assert cli._cell(None) == ""
    assert cli._cell(42) == "42"


def test_parse_floats_rejects_empty():
    with pytest.raises(Exception):
        cli._parse_floats("")


# ---------------------------------------------------------------------------
# Commands end to end (small families to stay quick)
# ---------------------------------------------------------------------------


def run_main(args, out_dir):
    return cli.main([*args, "--out", str(out_dir)])


def test_compute_on_shape_file_writes_schema(tmp_path):
    ball = tmp_path / "ball.json"
    ball.write_text(json.dumps({"type": "ball", "dim": 2, "radius": 1.0}))
    out = tmp_path / "out"
    code = cli.main(["compute", "--shape", str(ball), "--q", "1", "--out", str(out)])
    assert code == 0
    data = json.loads((out / "compute.json").read_text())
    assert set(data) == {"provenance", "config", "results", "errors"}
    rec = data["results"][0]
    assert rec["shape"] == "ball"
    assert rec["lambda"] == pytest.approx(8.0 / math.pi, rel=1e-6)
    assert data["errors"] == []

    with open(out / "compute.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == cli.FREQ_FIELDS
    lam_idx = rows[0].index("lambda")
    assert rows[1][lam_idx] == repr(rec["lambda"])


def test_pi2q_command_values(tmp_path):
    out = tmp_path / "pi"
    code = cli.main(["pi2q", "--q", "1,2", "--out", str(out)])
    assert code == 0
    data = json.loads((out / "pi2q.json").read_text())
    values = {rec["q"]: rec["value"] for rec in data["constants"]}
    assert values[1.0] == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-6)
    assert values[2.0] == pytest.approx(math.pi, rel=1e-6)


def test_verify_exit_codes_follow_verdicts(tmp_path, monkeypatch):
    ball = tmp_path / "ball.json"
    ball.write_text(json.dumps({"type": "ball", "dim": 2, "radius": 1.0}))
    out = tmp_path / "v"
    code = cli.main(["verify", "--shape", str(ball), "--q", "1", "--out", str(out)])
    assert code == 0
    data = json.loads((out / "verify.json").read_text())
    assert data["verdict_counts"]["violated"] == 0
    assert len(data["reports"]) > 0

    # fabricate a violated report to confirm the exit-code mapping
    bad = bounds._report("FK", "ball", 1.0, 2.0, 1.0, 0.0)
    monkeypatch.setattr(
        cli, "_applicable_reports", lambda *a, **k: [bad]
    )
    code = cli.main(["verify", "--shape", str(ball), "--q", "1", "--out", str(out)])
    assert code == 2


def test_failed_work_item_is_recorded_and_suite_continues(tmp_path, monkeypatch):
    real = solver.solve_with_study

    def flaky(shape, q, h=None):
        if isinstance(shape, geometry.BallShape):
            raise RuntimeError("synthetic solver failure")
        return real(shape, q, h=h)

    monkeypatch.setattr(solver, "solve_with_study", flaky)
    out = tmp_path / "s"
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(
        json.dumps(
            {
                "family": "disk slabs:2,4",
                "qs": [1.0],
                "alphas": [0.0],
                "slab_lengths": [2.0, 4.0],
                "property_trials": 0,
            }
        )
    )
    code = cli.main(["suite", "--config", str(cfgp), "--out", str(out)])
    assert code == 1  # the broken item surfaces as an operational error
    rep = json.loads((out / "suite.json").read_text())
    assert any("disk" in err["item"] for err in rep["errors"])
    # the slabs still solved and were checked
    assert {r["shape"] for r in rep["frequencies"]} == {"slab-L2", "slab-L4"}
    assert len(rep["reports"]) > 0


def test_scan_command_tables(tmp_path):
    out = tmp_path / "scan"
    code = cli.main(
        [
            "scan",
            "--family",
            "slabs:2,4",
            "--q",
            "1",
            "--alphas",
            "0,1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    data = json.loads((out / "scan.json").read_text())
    scan = data["scans"][0]
    assert scan["trends"][0] in ("vanishing", "blowing-up", "bounded-below-positive")
    assert len(scan["values"]) == 2  # one row per alpha
    with open(out / "scan.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == cli.SCAN_FIELDS
    assert len(rows) == 1 + 2 * 2  # alphas x shapes
    assert (out / "scan.tsv").exists()


@pytest.fixture(scope="module")
def suite_runs(tmp_path_factory):
    """One small suite executed twice into different directories."""
    base = tmp_path_factory.mktemp("suite")
    cfgp = base / "cfg.json"
    cfgp.write_text(
        json.dumps(
            {
                "family": "square slabs:2,4",
                "qs": [1.0, 2.0],
                "alphas": [0.0, 1.0],
                "slab_lengths": [2.0, 4.0],
                "property_trials": 5,
            }
        )
    )
    dirs = (base / "run1", base / "run2")
    codes = [
        cli.main(["suite", "--config", str(cfgp), "--out", str(d)]) for d in dirs
    ]
    return codes, dirs


def test_suite_exit_clean_and_report_schema(suite_runs):
    codes, dirs = suite_runs
    assert codes == [0, 0]
    rep = json.loads((dirs[0] / "suite.json").read_text())
    assert set(rep) == {
        "provenance",
        "config",
        "frequencies",
        "reports",
        "verdict_counts",
        "scans",
        "slabs",
        "pi_constants",
        "properties",
        "errors",
        "skipped",
    }
    assert rep["verdict_counts"]["violated"] == 0
    assert rep["errors"] == []
    # every (shape, q) pair appears exactly once in the frequencies
    keys = [(r["shape"], r["q"]) for r in rep["frequencies"]]
    assert len(keys) == len(set(keys)) == 6
    # every report row carries a known inequality id
    known = {
        "FK",
        "HPQ",
        "HP",
        "BANALE",
        "HPWEAK",
        "HPWEAKUP",
        "MPS_LOWER",
        "MPS_UPPER",
        "BFNT_IMPROVED",
        "CERTIFICATE",
    }
    assert {r["inequality"] for r in rep["reports"]} <= known
    # (shape, q, check) triples unique
    triples = [(r["shape"], r["q"], r["inequality"]) for r in rep["reports"]]
    assert len(triples) == len(set(triples))
    assert [p["name"] for p in rep["properties"]] == list(cli.PROPERTY_CHECKS)
    assert all(p["failures"] == 0 for p in rep["properties"])


def test_suite_reruns_byte_identical_except_timestamp(suite_runs):
    _, dirs = suite_runs
    names = sorted(os.listdir(dirs[0]))
    assert names == sorted(os.listdir(dirs[1]))
    for name in names:
        p1, p2 = dirs[0] / name, dirs[1] / name
        if name.endswith(".json"):
            d1 = json.loads(p1.read_text())
            d2 = json.loads(p2.read_text())
            for d in (d1, d2):
                d["provenance"].pop("timestamp")
                d["provenance"].pop("config_sha256")  # differs via out_dir
                d["config"].pop("out_dir")
            assert d1 == d2, name
        else:
            assert filecmp.cmp(str(p1), str(p2), shallow=False), name


def test_suite_csv_and_json_values_identical(suite_runs):
    _, dirs = suite_runs
    rep = json.loads((dirs[0] / "suite.json").read_text())
    with open(dirs[0] / "verify.csv") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    assert header == cli.REPORT_FIELDS
    for row, rec in zip(rows[1:], rep["reports"]):
        for col in ("lhs", "rhs", "slack", "slack_rel", "tolerance"):
            assert row[header.index(col)] == repr(rec[col])


def test_suite_empty_family_empty_report(tmp_path):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"family": ""}))
    out = tmp_path / "empty"
    code = cli.main(["suite", "--config", str(cfgp), "--out", str(out)])
    assert code == 0
    rep = json.loads((out / "suite.json").read_text())
    assert rep["frequencies"] == []
    assert rep["reports"] == []
    assert rep["properties"] == []


def test_suite_without_slabs_skips_scan(tmp_path):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(
        json.dumps(
            {
                "family": "square",
                "qs": [1.0],
                "slab_lengths": [2.0, 4.0],
                "property_trials": 0,
            }
        )
    )
    out = tmp_path / "noslab"
    code = cli.main(["suite", "--config", str(cfgp), "--out", str(out)])
    assert code == 0
    rep = json.loads((out / "suite.json").read_text())
    assert rep["scans"] == []
    assert any("scan" in note for note in rep["skipped"])


def test_main_reports_operational_errors(tmp_path):
    assert cli.main(["compute", "--config", "/nonexistent/cfg.json"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["compute", "--config", str(bad)]) == 1


def test_parallel_compute_matches_serial(tmp_path):
    fam = cli.generate_family("slabs:2,4", 0)
    serial, _ = cli.compute_matrix(cli.RunConfig(qs=(1.0,), jobs=1), fam)
    parallel, _ = cli.compute_matrix(cli.RunConfig(qs=(1.0,), jobs=2), fam)
    assert set(serial) == set(parallel)
    for key in serial:
        assert serial[key].lam == parallel[key].lam
