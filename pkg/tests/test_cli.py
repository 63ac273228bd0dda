"""End-to-end command line behavior: files in, rendered results out."""

from __future__ import annotations

import json

import pytest

from nstload import Config, build_features, build_report, load_manifest, report_from_dict
from nstload.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, FIT_CSV_HEADER, main
from nstload.features import FEATURE_CSV_HEADER, study_metrics
from nstload.signal import samples_csv_text

from conftest import golden_recording

TLX = {"mental_demand": 40.0, "own_performance": 55.0, "effort": 60.0, "frustration": 30.0}


def write_golden_study(root, rest_nasal=None):
    recording = golden_recording()
    samples = list(recording.samples)
    if rest_nasal is not None:
        for i, value in enumerate(rest_nasal):
            samples[i] = type(samples[i])(samples[i].time_s, samples[i].forehead_c, value)
    (root / "s01_t1.csv").write_text(samples_csv_text(tuple(samples)), encoding="utf-8")
    manifest = {"sessions": [{
        "subject_id": "s01",
        "task_id": "t1",
        "difficulty": "easy",
        "task_time_min": 8.0,
        "samples_csv": "s01_t1.csv",
        "rest_interval_s": list(recording.rest_interval),
        "task_interval_s": list(recording.task_interval),
        "tlx": TLX,
    }]}
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def golden_manifest(tmp_path):
    return write_golden_study(tmp_path)


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("study")
    assert main(["synth", "--seed", "42", "--out", str(out)]) == EXIT_OK
    return out


# ---------------------------------------------------------------------------
# synth and validate


def test_synth_then_validate(synth_dir, capsys):
    code = main(["validate", str(synth_dir / "manifest.json")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "ok: study is valid" in out


def test_synth_reports_what_it_wrote(tmp_path, capsys):
    out_dir = tmp_path / "s"
    assert main(["synth", "--subjects", "2", "--tasks", "3",
                 "--out", str(out_dir)]) == EXIT_OK
    message = capsys.readouterr().out
    assert "wrote 6 sessions" in message
    assert str(out_dir / "manifest.json") in message
    assert len(list(out_dir.rglob("*.csv"))) == 6


def test_synth_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["synth", "--seed", "5", "--out", str(a)]) == EXIT_OK
    assert main(["synth", "--seed", "5", "--out", str(b)]) == EXIT_OK
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_validate_reports_each_problem(tmp_path, capsys):
    path = write_golden_study(tmp_path)
    doc = json.loads(path.read_text())
    doc["sessions"][0]["tlx"]["effort"] = 150.0
    path.write_text(json.dumps(doc))
    code = main(["validate", str(path)])
    err = capsys.readouterr().err
    assert code == EXIT_DOMAIN
    assert "sessions[0].tlx.effort" in err
    assert "invalid: 1 problem(s)" in err


def test_missing_manifest_is_an_io_error(tmp_path, capsys):
    code = main(["validate", str(tmp_path / "nope.json")])
    assert code == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_missing_samples_csv_is_an_io_error(tmp_path, capsys):
    path = write_golden_study(tmp_path)
    (tmp_path / "s01_t1.csv").unlink()
    assert main(["metrics", str(path)]) == EXIT_IO
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# metrics


def test_metrics_text_shows_golden_values(golden_manifest, capsys):
    assert main(["metrics", str(golden_manifest)]) == EXIT_OK
    out = capsys.readouterr().out
    row = next(l for l in out.splitlines() if l.startswith("s01"))
    assert row.split() == ["s01", "t1", "1.2000", "1.1000", "4.4000", "4", "1.5000"]


def test_metrics_json_matches_library(synth_dir, capsys):
    manifest = synth_dir / "manifest.json"
    assert main(["metrics", str(manifest), "--output-format", "json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    expected = study_metrics(load_manifest(manifest))
    assert len(rows) == len(expected) == 14
    for row, sm in zip(rows, expected):
        assert (row["subject_id"], row["task_id"]) == (sm.subject_id, sm.task_id)
        assert row["wmax"] == pytest.approx(sm.metrics.wmax, rel=1e-12)
        assert row["rest_nst_c"] == pytest.approx(sm.rest_nst_c, rel=1e-12)


def test_metrics_csv_round_trips_floats(golden_manifest, capsys):
    assert main(["metrics", str(golden_manifest), "--output-format", "csv"]) == EXIT_OK
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header == "subject_id,task_id,wmax,wave,wsum,n_windows,rest_nst_c"
    cells = row.split(",")
    assert float(cells[2]) == pytest.approx(1.2, abs=1e-9)
    assert cells[5] == "4"


def test_window_length_flag_changes_windowing(golden_manifest, capsys):
    assert main(["metrics", str(golden_manifest), "--window-secs", "240",
                 "--output-format", "json"]) == EXIT_OK
    (row,) = json.loads(capsys.readouterr().out)
    assert row["n_windows"] == 2


def test_rest_agg_flag_changes_baseline(tmp_path, capsys):
    # rest NST readings 1.4, 1.5, 1.6: mean 1.5, last 1.6
    path = write_golden_study(tmp_path, rest_nasal=(33.4, 33.5, 33.6))
    assert main(["metrics", str(path), "--output-format", "json"]) == EXIT_OK
    (mean_row,) = json.loads(capsys.readouterr().out)
    assert main(["metrics", str(path), "--rest-agg", "last",
                 "--output-format", "json"]) == EXIT_OK
    (last_row,) = json.loads(capsys.readouterr().out)
    assert mean_row["rest_nst_c"] == pytest.approx(1.5, abs=1e-9)
    assert last_row["rest_nst_c"] == pytest.approx(1.6, abs=1e-9)
    assert last_row["wmax"] == pytest.approx(mean_row["wmax"] - 0.1, abs=1e-9)


def test_bad_config_value_exits_domain(golden_manifest, capsys):
    code = main(["metrics", str(golden_manifest), "--tolerance-threshold", "0"])
    assert code == EXIT_DOMAIN
    assert "tolerance_threshold" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# features


def test_features_csv_header_and_rows(synth_dir, capsys):
    assert main(["features", str(synth_dir / "manifest.json"),
                 "--output-format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(FEATURE_CSV_HEADER)
    assert len(lines) == 15


def test_features_text_table(golden_manifest, capsys):
    assert main(["features", str(golden_manifest)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == list(FEATURE_CSV_HEADER)
    row = out.splitlines()[1].split()
    assert row[:2] == ["s01", "t1"]
    assert row[2] == "1.2000"  # wmax


# ---------------------------------------------------------------------------
# fit and report


def test_fit_json_equals_local_pipeline(synth_dir, tmp_path, capsys):
    manifest = synth_dir / "manifest.json"
    out_file = tmp_path / "report.json"
    assert main(["fit", str(manifest), "--output-format", "json",
                 "--out", str(out_file)]) == EXIT_OK
    assert capsys.readouterr().out == ""  # --out suppresses stdout
    parsed = report_from_dict(json.loads(out_file.read_text()))
    table = build_features(load_manifest(manifest), Config())
    assert parsed == build_report(table, Config())


def test_fit_text_has_both_tables(synth_dir, capsys):
    assert main(["fit", str(synth_dir / "manifest.json")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("Adjusted R^2 of each model")
    assert "Standardized partial regression coefficients (biometric full)" in out
    assert "tolerance admission threshold: 0.1" in out


def test_fit_literal_tolerance_flag(synth_dir, capsys):
    assert main(["fit", str(synth_dir / "manifest.json"),
                 "--paper-literal-tolerance"]) == EXIT_OK
    assert "threshold 1.0" in capsys.readouterr().out


def test_fit_time_only_models_use_only_time(synth_dir, capsys):
    assert main(["fit", str(synth_dir / "manifest.json"),
                 "--output-format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    time_models = [m for m in report["models"] if m["mode"] == "time_only"]
    assert len(time_models) == 4
    assert all(m["selected"] == ["log_time"] for m in time_models)


def test_fit_csv_grid(synth_dir, capsys):
    assert main(["fit", str(synth_dir / "manifest.json"),
                 "--output-format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(FIT_CSV_HEADER)
    assert len(lines) == 9  # header + 4 targets x 2 modes


def test_report_rerenders_saved_fit(synth_dir, tmp_path, capsys):
    manifest = synth_dir / "manifest.json"
    report_file = tmp_path / "report.json"
    assert main(["fit", str(manifest), "--output-format", "json",
                 "--out", str(report_file)]) == EXIT_OK
    assert main(["fit", str(manifest)]) == EXIT_OK
    fit_text = capsys.readouterr().out
    assert main(["report", str(report_file)]) == EXIT_OK
    assert capsys.readouterr().out == fit_text


def test_report_rejects_invalid_json(tmp_path, capsys):
    bad = tmp_path / "report.json"
    bad.write_text("{not json")
    assert main(["report", str(bad)]) == EXIT_DOMAIN
    assert "not valid JSON" in capsys.readouterr().err


def test_out_flag_writes_file(golden_manifest, tmp_path, capsys):
    target = tmp_path / "metrics.txt"
    assert main(["metrics", str(golden_manifest), "--out", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert "1.2000" in target.read_text()
