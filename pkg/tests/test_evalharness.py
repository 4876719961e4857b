from __future__ import annotations

import dataclasses
import json
import random

import pytest

from conftest import CORPUS, MANIFEST
from ghabuse.detectors import detect_issue_spam
from ghabuse.evalharness import (
    EvaluationError,
    LabeledInstance,
    MetricsRow,
    confusion_rows,
    emit_report,
    evaluate,
    generate_fixture_corpus,
    plot_data_csv,
    read_manifest,
    write_manifest,
)
from ghabuse.evalharness.evaluate import SnapshotLoader, evaluate_instances
from ghabuse.model import SnapshotError, Subcategory, ThresholdConfig
from ghabuse.textkit import default_spam_model

SMALL = {Subcategory.FAKE_STATS: (2, 2), Subcategory.AUTOMATIC_UPDATES: (2, 3)}


# -- metrics ---------------------------------------------------------------


def test_metrics_example():
    row = MetricsRow(Subcategory.FAKE_STARS, tp=9, fp=1, tn=9, fn=1)
    assert (row.precision, row.recall, row.f1, row.accuracy) == pytest.approx((0.9, 0.9, 0.9, 0.9))


def test_undefined_metrics_are_none():
    row = MetricsRow(Subcategory.FAKE_STARS, tp=0, fp=0, tn=5, fn=0)
    assert row.precision is None and row.recall is None and row.f1 is None
    assert row.accuracy == 1.0
    assert MetricsRow(Subcategory.FAKE_STARS, 0, 2, 0, 3).f1 == 0.0


def test_confusion_rows_follow_subcategory_order():
    rows = confusion_rows([
        (Subcategory.FAKE_STATS, True, True),
        (Subcategory.FAKE_STARS, False, True),
        (Subcategory.FAKE_STARS, True, False),
        (Subcategory.FAKE_STARS, False, False),
    ])
    assert [r.subcategory for r in rows] == [Subcategory.FAKE_STARS, Subcategory.FAKE_STATS]
    assert (rows[0].tp, rows[0].fp, rows[0].tn, rows[0].fn) == (0, 1, 1, 1)


def test_report_formats():
    rows = [MetricsRow(Subcategory.FAKE_STARS, 9, 1, 9, 1), MetricsRow(Subcategory.ISSUE_SPAM, 0, 0, 4, 0)]
    assert [MetricsRow.from_dict(json.loads(line)) for line in emit_report(rows, "jsonl").splitlines()] == rows
    csv_lines = emit_report(rows, "csv").split("\r\n")
    assert csv_lines[0] == "subcategory,precision,recall,f1,accuracy"
    assert csv_lines[1] == "fake_stars,0.9000,0.9000,0.9000,0.9000"
    assert csv_lines[2] == "issue_spam,,,,1.0000"
    markdown = emit_report(rows).splitlines()
    assert markdown[2] == "| fake_stars | 0.9000 | 0.9000 | 0.9000 | 0.9000 |"
    assert "n/a" in markdown[3]
    assert plot_data_csv(rows[:1]).split("\r\n")[1] == "fake_stars,precision,0.9000"


def test_report_needs_rows_and_known_format():
    with pytest.raises(ValueError):
        emit_report([])
    with pytest.raises(ValueError):
        emit_report([MetricsRow(Subcategory.FAKE_STARS, 1, 0, 0, 0)], "html")


# -- manifest --------------------------------------------------------------


def test_manifest_round_trip_and_validation(tmp_path):
    inst = LabeledInstance("a-1", Subcategory.FAKE_STATS, "user", "users/a.json", True, near_miss={"knob": "x5", "value": 9})
    path = tmp_path / "m.jsonl"
    write_manifest(path, [inst])
    assert read_manifest(path) == [inst]
    write_manifest(path, [inst, inst])
    with pytest.raises(SnapshotError, match="duplicate"):
        read_manifest(path)
    with pytest.raises(SnapshotError):
        LabeledInstance("b", Subcategory.FAKE_STATS, "repo", "repos/b.json", True)
    with pytest.raises(SnapshotError, match="unknown fields"):
        LabeledInstance.from_dict(dict(inst.to_dict(), extra=1))


# -- generated corpus ------------------------------------------------------


def test_regeneration_matches_shipped_corpus(tmp_path):
    manifest = generate_fixture_corpus(seed=0, out_dir=tmp_path / "corpus")
    out = manifest.parent
    shipped = sorted(p.relative_to(CORPUS) for p in CORPUS.rglob("*.json*"))
    regenerated = sorted(p.relative_to(out) for p in out.rglob("*.json*"))
    assert shipped == regenerated
    for rel in shipped:
        assert (out / rel).read_bytes() == (CORPUS / rel).read_bytes(), rel


def test_shipped_corpus_shape():
    instances = read_manifest(MANIFEST)
    assert len(instances) == 392
    assert sum(i.subject_kind == "repo" for i in instances) == 310
    assert sum(i.label for i in instances) == 196
    for inst in instances:
        for rel in (inst.snapshot_path, *inst.context):
            assert (CORPUS / rel).is_file()


def test_closed_loop_on_small_corpus(tmp_path):
    manifest = generate_fixture_corpus(seed=5, per_category=SMALL, out_dir=tmp_path)
    result = evaluate(manifest)
    assert [r.subcategory for r in result.rows] == [Subcategory.AUTOMATIC_UPDATES, Subcategory.FAKE_STATS]
    assert all(r.f1 == 1.0 for r in result.rows)
    assert json.loads(result.to_json())["predictions"] == result.predictions


def test_evaluation_invariant_under_manifest_order():
    instances = read_manifest(MANIFEST)
    shuffled = list(instances)
    random.Random(4).shuffle(shuffled)
    cfg = ThresholdConfig()
    first = evaluate_instances(instances, CORPUS, cfg)
    second = evaluate_instances(shuffled, CORPUS, cfg)
    assert first.rows == second.rows
    assert first.predictions == second.predictions


def test_near_misses_flip_with_their_knob():
    instances = [i for i in read_manifest(MANIFEST) if i.near_miss]
    assert {i.subcategory for i in instances} == set(Subcategory)
    spam = default_spam_model()
    load = SnapshotLoader(CORPUS)
    cfg = ThresholdConfig()
    for inst in instances:
        assert not inst.label
        assert not evaluate_instances([inst], CORPUS, cfg, spam).predictions[inst.instance_id]
        knob = inst.near_miss["knob"]
        if knob == "classifier_threshold":
            gated = [v for v in detect_issue_spam(load.repo(inst.snapshot_path), spam.classifier, spam.tfidf, cfg)
                     if v.clause("has_link_or_command").observed]
            observed = max(v.clause("spam_probability").observed for v in gated)
            flipped = dataclasses.replace(spam, classifier=dataclasses.replace(spam.classifier, threshold=observed))
            assert evaluate_instances([inst], CORPUS, cfg, flipped).predictions[inst.instance_id], inst.instance_id
        else:
            changed = cfg.replace(**{knob: type(getattr(cfg, knob))(inst.near_miss["value"])})
            assert evaluate_instances([inst], CORPUS, changed, spam).predictions[inst.instance_id], inst.instance_id


# -- errors ----------------------------------------------------------------


def test_missing_snapshot_names_the_instance(tmp_path):
    manifest = generate_fixture_corpus(seed=1, per_category=SMALL, out_dir=tmp_path)
    victim = read_manifest(manifest)[0]
    (tmp_path / victim.snapshot_path).unlink()
    with pytest.raises(EvaluationError, match=victim.instance_id):
        evaluate(manifest)


def test_generation_refuses_foreign_directory(tmp_path):
    (tmp_path / "notes.txt").write_text("keep me")
    with pytest.raises(FileExistsError):
        generate_fixture_corpus(seed=0, per_category=SMALL, out_dir=tmp_path)
    assert (tmp_path / "notes.txt").read_text() == "keep me"


def test_generation_counts_must_be_positive(tmp_path):
    with pytest.raises(ValueError):
        generate_fixture_corpus(per_category=(0, 3), out_dir=tmp_path)
