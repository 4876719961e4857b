"""The seven numbered acceptance criteria, one test each.

Each test carries an ``acceptance`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion in the terminal summary.
"""

from __future__ import annotations

import json
import math
import random
import subprocess
import sys
import threading
import time

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, MANIFEST
from ghabuse import detectors as det
from ghabuse.evalharness import evaluate, read_manifest
from ghabuse.evalharness.evaluate import SnapshotLoader, batch_corpus
from ghabuse.ingest import (
    ApiClientConfig,
    GitHubClient,
    RateLimitedError,
    ReplayTransport,
    dumps_snapshot,
    fetch_repo_snapshot,
    fetch_user_snapshot,
)
from ghabuse.ingest.transport import Response
from ghabuse.model import Subcategory, ThresholdConfig
from ghabuse.textkit import Corpus, bm25_score, default_spam_model, levenshtein, name_similarity
from ghabuse.textkit.mlp import SpamClassifier, classifier_predict, classifier_train, loss_and_gradients

INGEST = FIXTURES / "ingest"
TRIALS = 1000


# -- 1 ---------------------------------------------------------------------


def _oracle_mismatches(seed: int = 20240501) -> dict[str, int]:
    rng = random.Random(seed)
    cfg = ThresholdConfig()
    spam = default_spam_model()
    bad = {sub.value: 0 for sub in Subcategory}

    for _ in range(TRIALS):
        repo, users = oracles.random_fake_stars_case(rng)
        trial_cfg = cfg.replace(x1=rng.randint(0, 4), epsilon=rng.randint(0, 2))
        got = {v.subject: v.flagged for v in det.detect_fake_stars(repo, users, trial_cfg)}
        bad["fake_stars"] += got != oracles.fake_star_flags(repo, users, trial_cfg)

    for _ in range(TRIALS):
        repo = oracles.random_commit_repo(rng)
        trial_cfg = oracles.auto_update_cfg(rng)
        bad["automatic_updates"] += det.detect_automatic_updates(repo, trial_cfg).flagged != oracles.auto_update_flag(
            repo, trial_cfg
        )

    # batches of 50 repos share one corpus, as a scan batch would
    for start in range(0, TRIALS, 50):
        repos = [oracles.random_keyword_repo(rng, start + k) for k in range(50)]
        corpus = Corpus.from_texts([(r.full_name, r.readme) for r in repos])
        docs = {r.full_name: oracles.tokens(r.readme) for r in repos}
        for repo in repos:
            trial_cfg = cfg.replace(x3=rng.randint(0, 6), theta_k=rng.choice([0.05, 0.1, 0.3, 0.6]))
            got = det.detect_keyword_stuffing(repo, corpus, trial_cfg).flagged
            bad["keyword_stuffing"] += got != oracles.keyword_stuffing_flag(repo, docs, trial_cfg)

    for _ in range(TRIALS):
        cand, refs = oracles.random_typo_case(rng)
        references = [det.PopularReference(*r) for r in refs]
        got = any(v.flagged for v in det.detect_typo_squatting(cand, references, cfg))
        bad["typo_squatting"] += got != oracles.typo_flag(cand, refs, cfg)

    for _ in range(TRIALS):
        repo, user = oracles.random_spoof_case(rng)
        bad["spoofed_contributor"] += det.detect_spoofed_contributor(repo, user, cfg).flagged != oracles.spoofed_flag(
            repo, user, cfg
        )

    for _ in range(TRIALS):
        repo = oracles.random_issue_repo(rng)
        got = [v.flagged for v in det.detect_issue_spam(repo, spam.classifier, spam.tfidf, cfg)]
        bad["issue_spam"] += got != oracles.issue_spam_flags(repo, spam)

    for _ in range(TRIALS):
        user, repos, trial_cfg = oracles.random_farming_case(rng)
        strict = rng.random() < 0.3
        got = det.detect_reputation_farming(user, repos, trial_cfg, strict=strict).flagged
        bad["reputation_farming"] += got != oracles.farming_flag(user, repos, trial_cfg, strict)

    for _ in range(TRIALS):
        user = oracles.random_stats_user(rng)
        bad["fake_stats"] += det.detect_fake_stats(user, cfg).flagged != oracles.fake_stats_flag(user, cfg)
    return bad


@pytest.mark.acceptance(1, "predicate-oracle equivalence, 8 detectors x 1000 random snapshots, exact, < 60 s")
def test_predicate_oracle_equivalence():
    started = time.perf_counter()
    bad = _oracle_mismatches()
    elapsed = time.perf_counter() - started
    assert bad == {sub.value: 0 for sub in Subcategory}
    assert elapsed < 60, f"took {elapsed:.1f}s"


# -- 2 ---------------------------------------------------------------------


@pytest.mark.acceptance(2, "fixture-corpus metrics: P/R/F1 >= 0.89 everywhere, kw F1 >= 0.932, fake stats F1 >= 0.936")
def test_fixture_corpus_metrics():
    started = time.perf_counter()
    instances = read_manifest(MANIFEST)
    kinds = [i.subject_kind for i in instances]
    assert (len(instances), kinds.count("repo"), kinds.count("user")) == (392, 310, 82)
    labels = [i.label for i in instances]
    assert labels.count(True) == labels.count(False) == 196

    rows = {r.subcategory: r for r in evaluate(MANIFEST).rows}
    assert set(rows) == set(Subcategory)
    for sub, row in rows.items():
        for metric in ("precision", "recall", "f1"):
            value = getattr(row, metric)
            assert value is not None and value >= 0.89, f"{sub.value} {metric} = {value}"
    assert rows[Subcategory.KEYWORD_STUFFING].f1 >= 0.932
    assert rows[Subcategory.FAKE_STATS].f1 >= 0.936
    assert time.perf_counter() - started < 300


# -- 3 ---------------------------------------------------------------------

# Two documents, query "parser" on A. N = 2 and df = 1, so idf = ln(1 + 1.5/1.5) = ln 2.
# avgdl = 2.5 and |A| = 3 with tf = 2, so the term weight is 2 * 2.2 / (2 + 1.2 * (0.25 + 0.75 * 3 / 2.5)) = 4.4 / 3.38.
BM25_CLOSED_FORM = math.log(2) * 4.4 / 3.38


def _random_name(rng: random.Random) -> str:
    alphabet = "abcdeAB01-_."
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))


@pytest.mark.acceptance(3, "text-kit oracles: BM25 closed form within 1e-9, Levenshtein exact on 10,000 pairs")
def test_textkit_oracles():
    corpus = Corpus.from_tokens([("A", ["rust", "parser", "parser"]), ("B", ["game", "engine"])])
    score = bm25_score(corpus, ["parser"], "A")
    assert abs(score - BM25_CLOSED_FORM) / BM25_CLOSED_FORM <= 1e-9
    assert BM25_CLOSED_FORM == pytest.approx(0.902321773509988, rel=1e-12)

    rng = random.Random(7)
    for _ in range(10_000):
        a, b = _random_name(rng), _random_name(rng)
        assert levenshtein(a, b) == oracles.edit_distance(a, b), (a, b)
        assert name_similarity(a, b) == oracles.name_sim(a, b), (a, b)


# -- 4 ---------------------------------------------------------------------

_PARAMS = ("weights_1", "bias_1", "weights_2", "bias_2")


def _classifier(params: dict, dtype=np.float64) -> SpamClassifier:
    return SpamClassifier(
        params["weights_1"].astype(dtype),
        params["bias_1"].astype(dtype),
        params["weights_2"].astype(dtype),
        dtype(params["bias_2"]),
    )


def gradient_errors(seed: int, input_dim: int = 6, hidden_dim: int = 5, h: float = 1e-5) -> list[float]:
    """Relative error between analytic gradients and central differences, one entry per parameter.

    The analytic side runs in float64. The finite differences are evaluated
    in extended precision so cancellation in ``up - down`` does not swamp
    small gradients. An entry whose +h and -h evaluations put some hidden
    unit on opposite sides of the ReLU kink has no meaningful difference
    quotient and is reported as NaN.
    """
    rng = np.random.default_rng(seed)
    params = {
        "weights_1": rng.standard_normal((hidden_dim, input_dim)),
        "bias_1": rng.standard_normal(hidden_dim) * 0.1,
        "weights_2": rng.standard_normal(hidden_dim),
        "bias_2": np.asarray(rng.standard_normal()),
    }
    x = rng.standard_normal((5, input_dim))
    y = np.array([0.0, 1.0, 1.0, 0.0, 1.0])
    _, grads = loss_and_gradients(_classifier(params), x, y)

    wide = {name: value.astype(np.longdouble) for name, value in params.items()}
    x_wide, y_wide = x.astype(np.longdouble), y.astype(np.longdouble)

    def wide_loss() -> tuple[np.longdouble, np.ndarray]:
        c = _classifier(wide, np.longdouble)
        z1 = x_wide @ c.weights_1.T + c.bias_1
        z2 = np.maximum(z1, 0) @ c.weights_2 + c.bias_2
        return np.mean(np.logaddexp(0, z2) - y_wide * z2), z1 > 0

    errors = []
    for name in _PARAMS:
        flat = wide[name].reshape(-1)
        analytic = np.asarray(grads[name]).reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up, active_up = wide_loss()
            flat[i] = keep - h
            down, active_down = wide_loss()
            flat[i] = keep
            if not np.array_equal(active_up, active_down):
                errors.append(math.nan)
                continue
            numeric = float((up - down) / (2 * h))
            scale = max(abs(numeric), abs(analytic[i]), 1e-8)
            errors.append(abs(numeric - analytic[i]) / scale)
    return errors


def check_gradients(seed: int) -> None:
    errors = gradient_errors(seed)
    measured = [e for e in errors if not math.isnan(e)]
    assert len(measured) >= 0.8 * len(errors), "too many parameters straddle a ReLU kink"
    assert max(measured) <= 1e-5


def separable_toy_set() -> list[tuple[np.ndarray, int]]:
    rng = random.Random(3)
    points = []
    while len(points) < 20:
        a, b = rng.uniform(-1, 1), rng.uniform(-1, 1)
        margin = a + 2 * b - 0.2
        if abs(margin) > 0.15:
            points.append((np.array([a, b]), int(margin > 0)))
    return points


@pytest.mark.acceptance(4, "classifier soundness: gradients within 1e-5, bitwise determinism, toy set 100% in 500 epochs")
def test_classifier_soundness():
    check_gradients(seed=11)

    data = [({0: 1.0, 3: 0.5}, 1), ({1: 1.0}, 0), ({2: 0.7, 3: 0.7}, 1), ({1: 0.2, 2: 0.9}, 0)]
    first = classifier_train((4, 8), data, epochs=50, learning_rate=0.5, seed=42)
    second = classifier_train((4, 8), data, epochs=50, learning_rate=0.5, seed=42)
    for name in ("weights_1", "bias_1", "weights_2"):
        assert getattr(first, name).tobytes() == getattr(second, name).tobytes()
    assert first.bias_2 == second.bias_2

    toy = separable_toy_set()
    model = classifier_train((2, 16), toy, epochs=500, learning_rate=0.5, seed=0)
    correct = sum((classifier_predict(model, x) >= 0.5) == bool(label) for x, label in toy)
    assert correct == len(toy)


# -- 5 ---------------------------------------------------------------------


class ConcurrencyProbe:
    """Forwards to a replay transport while recording the peak number of concurrent sends."""

    def __init__(self, inner) -> None:
        self.inner = inner
        self.lock = threading.Lock()
        self.active = 0
        self.peak = 0

    def send(self, request):
        with self.lock:
            self.active += 1
            self.peak = max(self.peak, self.active)
        try:
            time.sleep(0.002)
            return self.inner.send(request)
        finally:
            with self.lock:
                self.active -= 1


class RateLimitedOnce:
    """First request gets a 403 with an exhausted budget; later requests succeed."""

    def __init__(self, clock: list[float], reset_at: int, failures: int = 1) -> None:
        self.clock = clock
        self.reset_at = reset_at
        self.failures = failures
        self.sent_at: list[float] = []

    def send(self, request):
        self.sent_at.append(self.clock[0])
        if len(self.sent_at) <= self.failures:
            headers = {"X-RateLimit-Remaining": "0", "X-RateLimit-Reset": str(self.reset_at)}
            return Response(403, headers, {"message": "API rate limit exceeded"})
        return Response(200, {"X-RateLimit-Remaining": "4999"}, {"ok": True})


def fake_time(start: float):
    clock = [start]
    sleeps: list[float] = []

    def sleep(seconds: float) -> None:
        sleeps.append(seconds)
        clock[0] += seconds

    return clock, sleeps, sleep


@pytest.mark.acceptance(5, "ingestion replay: golden snapshots bytewise, max_in_flight never exceeded, reset times respected")
def test_ingestion_replay():
    cfg = ApiClientConfig(per_page=30)
    repo, _ = fetch_repo_snapshot(cfg, "octo-lab/parsekit", transport=ReplayTransport.from_file(INGEST / "repo_transcript.json"))
    assert dumps_snapshot(repo) == (INGEST / "repo_golden.json").read_text(encoding="utf-8")
    user, _ = fetch_user_snapshot(cfg, "mallory-dev", transport=ReplayTransport.from_file(INGEST / "user_transcript.json"))
    assert dumps_snapshot(user) == (INGEST / "user_golden.json").read_text(encoding="utf-8")

    for limit in (1, 2, 3):
        probe = ConcurrencyProbe(ReplayTransport.from_file(INGEST / "repo_transcript.json"))
        client = GitHubClient(ApiClientConfig(per_page=30, max_in_flight=limit), probe)
        snap, _ = fetch_repo_snapshot(client.cfg, "octo-lab/parsekit", client=client)
        assert dumps_snapshot(snap) == (INGEST / "repo_golden.json").read_text(encoding="utf-8")
        assert probe.peak <= limit
        if limit > 1:
            assert probe.peak > 1, "fan-out never overlapped, so the bound was not exercised"

    now = 1_700_000_000
    clock, sleeps, sleep = fake_time(now)
    transport = RateLimitedOnce(clock, reset_at=now + 120)
    client = GitHubClient(ApiClientConfig(retry_budget=2), transport, sleep=sleep, clock=lambda: clock[0])
    assert client.get_json("/rate/probe") == {"ok": True}
    assert transport.sent_at[1] >= now + 120
    assert sum(sleeps) >= 120

    clock, sleeps, sleep = fake_time(now)
    transport = RateLimitedOnce(clock, reset_at=now + 60, failures=99)
    client = GitHubClient(ApiClientConfig(retry_budget=3), transport, sleep=sleep, clock=lambda: clock[0])
    with pytest.raises(RateLimitedError) as err:
        client.get("/rate/probe")
    assert err.value.reset_at == now + 60
    assert len(transport.sent_at) == 3 + 1


# -- 6 ---------------------------------------------------------------------


def _is_chain(sets: list[frozenset], growing: bool) -> bool:
    pairs = zip(sets, sets[1:])
    return all(a <= b for a, b in pairs) if growing else all(a >= b for a, b in pairs)


def monotonicity_sweeps() -> dict[str, tuple[list[frozenset], bool]]:
    instances = read_manifest(MANIFEST)
    load = SnapshotLoader(MANIFEST.parent)
    by_sub = {sub: [i for i in instances if i.subcategory is sub] for sub in Subcategory}
    base = ThresholdConfig()

    fake = []
    for x1 in range(0, 9):
        cfg = base.replace(x1=x1)
        flagged = set()
        for inst in by_sub[Subcategory.FAKE_STARS]:
            repo = load.repo(inst.snapshot_path)
            for v in det.detect_fake_stars(repo, [load.user(p) for p in inst.context], cfg):
                if v.flagged:
                    flagged.add((repo.full_name, v.subject))
        fake.append(frozenset(flagged))

    corpus = batch_corpus(instances, load)
    kw_repos = [load.repo(i.snapshot_path) for i in by_sub[Subcategory.KEYWORD_STUFFING]]
    low = []
    for step in range(0, 21):
        cfg = base.replace(theta_k=step / 20)
        found = set()
        for repo in kw_repos:
            for e in det.detect_keyword_stuffing(repo, corpus, cfg).evidence[1:]:
                found.add((repo.full_name, e.clause))
        low.append(frozenset(found))

    auto_repos = [load.repo(i.snapshot_path) for i in by_sub[Subcategory.AUTOMATIC_UPDATES]]
    auto = []
    for y in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0, 100.0]:
        cfg = base.replace(y=y)
        auto.append(frozenset(r.full_name for r in auto_repos if det.detect_automatic_updates(r, cfg).flagged))

    stuffed = []
    for x3 in range(0, 13):
        cfg = base.replace(x3=x3)
        stuffed.append(frozenset(r.full_name for r in kw_repos if det.detect_keyword_stuffing(r, corpus, cfg).flagged))

    return {"x1": (fake, True), "theta_k": (low, True), "y": (auto, True), "x3": (stuffed, False)}


@pytest.mark.acceptance(6, "monotonicity sweeps over x1, theta_k, y and x3 on the fixture corpus")
def test_monotonicity_sweeps():
    for knob, (sets, growing) in monotonicity_sweeps().items():
        assert _is_chain(sets, growing), f"{knob} sweep is not monotone"
        assert sets[0] != sets[-1], f"{knob} sweep never changed the flagged set"


# -- 7 ---------------------------------------------------------------------


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "ghabuse", *args], capture_output=True, text=True, timeout=300)


@pytest.mark.acceptance(7, "CLI exit codes 0/2 and eight-row eval report, bytewise-stable stdout across runs")
def test_cli_contract():
    clean = [run_cli("scan", str(FIXTURES / "scan" / "clean_repo.json")) for _ in range(2)]
    assert [r.returncode for r in clean] == [0, 0]
    assert clean[0].stdout == clean[1].stdout
    verdicts = [json.loads(line) for line in clean[0].stdout.splitlines()]
    assert verdicts and not any(v["flagged"] for v in verdicts)

    positive = [run_cli("scan", str(FIXTURES / "scan" / "fake_stars")) for _ in range(2)]
    assert [r.returncode for r in positive] == [2, 2]
    assert positive[0].stdout == positive[1].stdout
    verdicts = [json.loads(line) for line in positive[0].stdout.splitlines()]
    summary = next(v for v in verdicts if v["detector"] == "fake_stars" and "/" in v["subject"])
    assert summary["flagged"]
    clauses = {row[0]: row[1:] for row in summary["evidence"]}
    assert clauses["flagged_fraction"][0] >= clauses["flagged_fraction"][1]

    report = [run_cli("eval", str(MANIFEST), "--format", "jsonl") for _ in range(2)]
    assert [r.returncode for r in report] == [0, 0]
    assert report[0].stdout == report[1].stdout
    rows = [json.loads(line) for line in report[0].stdout.splitlines()]
    assert [r["subcategory"] for r in rows] == [s.value for s in Subcategory]
