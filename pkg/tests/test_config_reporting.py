import json
import math
from pathlib import Path

import pytest

import nhpump
from nhpump.cli import COMMANDS
from nhpump.config import DEFAULT_PRESETS_PATH, Band, Boundary, TorusGrid, load_presets, resolve_preset
from nhpump.io import RunManifest, default_run_dir, manifest_path, write_csv, write_manifest
from nhpump.reporting import build_summary_message, quartile_deviation
from nhpump.workers import resolve_jobs, run_ordered


def test_load_presets_from_environment(presets_file):
    bundles = load_presets()
    assert set(bundles) == {"tiny_spectrum", "tiny_gbz"}
    assert bundles["tiny_spectrum"].command == "spectrum"
    assert bundles["tiny_gbz"].description == ""
    assert resolve_preset("tiny_gbz").options["n_phi"] == 10


def test_resolve_preset_unknown(presets_file):
    with pytest.raises(KeyError):
        resolve_preset("nope")


def test_load_presets_rejects_empty_file(temp_config_dir):
    path = temp_config_dir / "empty.json"
    path.write_text(json.dumps({"presets": []}), encoding="utf-8")
    with pytest.raises(ValueError):
        load_presets(path)
    with pytest.raises(FileNotFoundError):
        load_presets(temp_config_dir / "missing.json")


def test_shipped_presets_cover_every_command(monkeypatch):
    monkeypatch.delenv("NHPUMP_PRESETS", raising=False)
    commands = {bundle.command for bundle in load_presets().values()}
    assert commands == set(COMMANDS)


def test_presets_ship_inside_the_package():
    assert DEFAULT_PRESETS_PATH.is_file()
    assert DEFAULT_PRESETS_PATH.parent.parent == Path(nhpump.__file__).resolve().parent


def test_cycle_spectrum_preset_samples_the_drive(monkeypatch):
    monkeypatch.delenv("NHPUMP_PRESETS", raising=False)
    bundle = resolve_preset("spectrum_pbc_gapped")
    assert bundle.options["n_t"] > 0


def test_torus_grid():
    grid = TorusGrid(8, 16, "obc")
    assert grid.boundary is Boundary.OBC
    momenta, phases = grid.mesh()
    assert momenta.shape == phases.shape == (8, 16)
    assert grid.spacing == (2 * math.pi / 8, 2 * math.pi / 16)
    assert grid.doubled().n_phase == 32
    with pytest.raises(ValueError):
        TorusGrid(4, 16)


def test_band_helpers():
    assert Band.PLUS.sign == 1
    assert Band.MINUS.other is Band.PLUS


def test_write_csv_formats_cells(tmp_path):
    path = tmp_path / "out" / "table.csv"
    count = write_csv(path, ["a", "b", "c", "d"], [[0.1, True, None, float("nan")], [1, False, "x", 2.5]])
    assert count == 2
    assert path.read_text(encoding="utf-8") == "a,b,c,d\n0.1,true,,nan\n1,false,x,2.5\n"


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest(command="chern", argv=["chern", "--grid", "16"])
    manifest.derived["value"] = float("nan")
    manifest.derived["point"] = complex(1.0, -2.0)
    manifest.finish()
    csv_path = tmp_path / "chern.csv"
    path = write_manifest(csv_path, manifest)
    assert path == manifest_path(csv_path) == tmp_path / "chern.manifest.json"
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["derived"] == {"value": None, "point": [1.0, -2.0]}
    assert payload["elapsed_seconds"] >= 0
    assert "_clock" not in payload


def test_default_run_dir_is_timestamped(tmp_path):
    path = default_run_dir("pump", base=tmp_path)
    assert path.parent == tmp_path
    assert path.name.endswith("_pump")


def test_build_summary_message_formats_output(tmp_path):
    run_dir = tmp_path / "20240101-000000_chern"
    run_dir.mkdir()
    summary = {
        "command": "chern",
        "parameters": {"gamma": 0.3, "boundary": "pbc"},
        "highlights": ["Chern plateaus: [-1, 0, 1]"],
        "outputs": ["chern.csv"],
        "elapsed_seconds": 2.04,
    }

    message = build_summary_message(summary, run_dir)

    assert message.splitlines()[0] == "nhpump chern completed: gamma=0.3 boundary=pbc (2.0s)"
    assert "Chern plateaus: [-1, 0, 1]" in message
    assert "Outputs: chern.csv" in message
    assert str(run_dir) in message


def test_quartile_deviation():
    rows = [
        {"mu": 1.0 + 0.1 * i, "re_bod": 1.0 + 0.05 * i, "chern": 1, "im_range": 0.1 * i}
        for i in range(8)
    ]
    rows.append({"mu": 0.5, "re_bod": float("nan"), "chern": None, "im_range": 0.2})
    rows.append({"mu": 0.45, "re_bod": 0.2, "chern": 0, "converged": False, "gapless": True, "im_range": 0.9})
    rows.append({"mu": 0.55, "re_bod": 0.9, "chern": 1, "gapless": True, "im_range": 0.8})
    summary = quartile_deviation(rows, threshold=0.12)
    assert summary.n_points == 8
    assert summary.top_quartile_mean == pytest.approx((0.30 + 0.35) / 2)
    assert summary.bottom_quartile_mean == pytest.approx(0.025)
    assert summary.fluctuation_correlated
    assert summary.outliers == pytest.approx([1.3, 1.4, 1.5, 1.6, 1.7])


def test_quartile_deviation_needs_rows():
    assert quartile_deviation([{"mu": 0.0, "re_bod": 0.0, "chern": 0, "im_range": 0.0}]) is None


def test_resolve_jobs(monkeypatch):
    monkeypatch.delenv("NHPUMP_JOBS", raising=False)
    assert resolve_jobs() == 1
    assert resolve_jobs("3") == 3
    assert resolve_jobs(0) == 1
    monkeypatch.setenv("NHPUMP_JOBS", "lots")
    assert resolve_jobs() == 1


def test_run_ordered_keeps_order():
    assert run_ordered(abs, [-3, 2, -1]) == [3, 2, 1]
