from __future__ import annotations

import csv
import io
import json

import pytest

from conftest import FIXTURES
from ghabuse.cli import RunConfig, main
from ghabuse.evalharness import read_manifest
from ghabuse.ingest import load_snapshot, store_snapshot
from ghabuse.model import IssueRecord, RepoSnapshot, Subcategory
from ghabuse.scan import ALL_DETECTORS, load_batch, parse_detectors, snapshot_paths
from ghabuse.textkit import SpamModel

CLEAN = str(FIXTURES / "scan" / "clean_repo.json")
FAKE_STARS = str(FIXTURES / "scan" / "fake_stars")


def run(capsys, *args: str) -> tuple[int, str, str]:
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- scan ------------------------------------------------------------------


def test_scan_formats(capsys):
    code, out, _ = run(capsys, "scan", FAKE_STARS, "--format", "csv", "--detectors", "fake_stars")
    assert code == 2
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and {r["detector"] for r in rows} == {"fake_stars"}
    assert any(r["flagged"] == "true" for r in rows)
    code, out, _ = run(capsys, "scan", CLEAN, "--format", "markdown")
    assert code == 0
    assert out.startswith("| detector | subject | flagged | evidence |")


def test_scan_writes_out_file(capsys, tmp_path):
    target = tmp_path / "verdicts.jsonl"
    code, out, _ = run(capsys, "scan", CLEAN, "--out", str(target))
    assert code == 0 and out == ""
    assert all(not json.loads(line)["flagged"] for line in target.read_text().splitlines())


def test_unknown_detector_is_a_one_line_error(capsys):
    code, out, err = run(capsys, "scan", CLEAN, "--detectors", "fake_stars,bogus")
    assert code == 1 and out == ""
    assert err.count("\n") == 1 and "unknown detector: bogus" in err


def test_missing_path_and_bad_option_exit_one(capsys):
    assert run(capsys, "scan", "/nonexistent/snap.json")[0] == 1
    assert run(capsys, "scan", CLEAN, "--format", "xml")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


# -- configuration ---------------------------------------------------------


def test_config_unknown_key_exits_one(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('colour = "blue"\n')
    code, _, err = run(capsys, "scan", CLEAN, "--config", str(cfg))
    assert code == 1 and "unknown config key: colour" in err
    cfg.write_text("[thresholds]\ntheta_k = 2.0\n")
    code, _, err = run(capsys, "scan", CLEAN, "--config", str(cfg))
    assert code == 1 and "theta_k" in err


def test_config_file_changes_thresholds(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    # with x1 = 0 no stargazer can have starred few enough repositories
    cfg.write_text(json.dumps({"thresholds": {"x1": 0}, "detectors": ["fake_stars"], "format": "jsonl"}))
    code, out, _ = run(capsys, "scan", FAKE_STARS, "--config", str(cfg))
    assert code == 0
    assert all(not json.loads(line)["flagged"] for line in out.splitlines())


def test_run_config_loading(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('format = "csv"\nseed = 4\ndetectors = "fake_stats"\n[client]\nper_page = 50\n')
    loaded = RunConfig.load(path)
    assert (loaded.format, loaded.seed, loaded.client.per_page) == ("csv", 4, 50)
    assert loaded.detectors == {Subcategory.FAKE_STATS}
    assert loaded.override(format="markdown", detectors="all").detectors == ALL_DETECTORS
    path.write_text("[client]\npassword = 1\n")
    with pytest.raises(ValueError, match="password"):
        RunConfig.load(path)


# -- scan helpers ----------------------------------------------------------


def test_parse_detectors():
    assert parse_detectors(None) == ALL_DETECTORS
    assert parse_detectors("all") == ALL_DETECTORS
    assert parse_detectors(" issue_spam , fake_stats") == {Subcategory.ISSUE_SPAM, Subcategory.FAKE_STATS}
    with pytest.raises(ValueError):
        parse_detectors(",")


def test_load_batch_rejects_duplicate_subjects(tmp_path):
    snap = load_snapshot(CLEAN)
    (tmp_path / "a.json").write_text(open(CLEAN).read())
    (tmp_path / "b.json").write_text(open(CLEAN).read())
    with pytest.raises(ValueError, match=snap.full_name):
        load_batch([tmp_path])
    assert snapshot_paths([tmp_path]) == [tmp_path / "a.json", tmp_path / "b.json"]


# -- corpus and model commands ---------------------------------------------


def test_gen_fixtures_then_eval(capsys, tmp_path):
    out_dir = tmp_path / "corpus"
    code, _, _ = run(capsys, "gen-fixtures", str(out_dir), "--counts", "1,1", "--seed", "3")
    assert code == 0
    assert len(read_manifest(out_dir / "manifest.jsonl")) == 16
    plot = tmp_path / "plot.csv"
    code, out, _ = run(capsys, "eval", str(out_dir / "manifest.jsonl"), "--format", "csv", "--plot-data", str(plot))
    assert code == 0
    assert len(out.strip().splitlines()) == 1 + len(Subcategory)
    assert plot.read_text().startswith("subcategory,metric,value")
    assert run(capsys, "gen-fixtures", str(out_dir), "--counts", "three")[0] == 1


def test_train_spam_writes_a_loadable_model(capsys, tmp_path):
    data = tmp_path / "train.jsonl"
    data.write_text(
        '{"text": "claim your free airdrop https://x.example", "label": 1}\n'
        '{"text": "crash when parsing empty csv", "label": 0}\n'
    )
    model_path = tmp_path / "model.json"
    assert run(capsys, "train-spam", str(data), str(model_path), "--epochs", "20")[0] == 0
    model = SpamModel.load(model_path)
    assert 0.0 < model.probability("free airdrop") < 1.0
    repo = RepoSnapshot("me/app", 1_700_000_000, issues=(IssueRecord(1, "x", "free airdrop", "https://x.example", 1),))
    store_snapshot(tmp_path / "repo.json", repo)
    code, out, _ = run(capsys, "scan", str(tmp_path / "repo.json"), "--detectors", "issue_spam", "--spam-model", str(model_path))
    [verdict] = [json.loads(line) for line in out.splitlines()]
    assert code == (2 if verdict["flagged"] else 0)
    assert verdict["subject"].startswith("me/app")


def test_fetch_error_is_reported(capsys):
    code, _, err = run(capsys, "fetch", "repo", "not a repo")
    assert code == 1 and err.startswith("error: malformed repository name")
