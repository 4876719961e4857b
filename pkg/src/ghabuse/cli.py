"""``ghabuse`` command line.

Exit codes: 0 success with nothing flagged, 2 success with at least one
flagged verdict, 1 operational error (one-line diagnostic on stderr).
Machine-readable output goes to stdout or ``--out``; logs go to stderr.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import click

from ghabuse.evalharness.evaluate import EvaluationError, evaluate
from ghabuse.evalharness.fixtures import DEFAULT_COUNTS, generate_fixture_corpus
from ghabuse.evalharness.metrics import emit_report, plot_data_csv
from ghabuse.ingest.client import ApiClientConfig, GitHubError
from ghabuse.ingest.fetch import RepoLimits, UserLimits, fetch_repo_snapshot, fetch_user_snapshot
from ghabuse.ingest.store import dumps_snapshot
from ghabuse.ingest.transport import TransportError
from ghabuse.model import DetectionVerdict, SnapshotError, Subcategory, ThresholdConfig
from ghabuse.scan import ALL_DETECTORS, load_batch, parse_detectors, scan
from ghabuse.textkit.spam import SpamModel, default_spam_model, read_training_jsonl, train_spam_model

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger("ghabuse")

FORMATS = ("jsonl", "csv", "markdown")
EXIT_OK, EXIT_ERROR, EXIT_FLAGGED = 0, 1, 2

# errors that become exit code 1 with a one-line message
_OPERATIONAL = (
    OSError,
    ValueError,  # covers SnapshotError, DetectorInputError, ClassifierInputError
    GitHubError,
    TransportError,
    EvaluationError,
    KeyError,
)


class ConfigError(ValueError):
    pass


# -- configuration ---------------------------------------------------------

_CLIENT_KEYS = ("base_url", "max_in_flight", "retry_budget", "per_page", "token_env")
_TOP_KEYS = ("thresholds", "client", "detectors", "format", "seed")


@dataclass(frozen=True)
class RunConfig:
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    client: ApiClientConfig = field(default_factory=ApiClientConfig)
    detectors: frozenset[Subcategory] = ALL_DETECTORS
    format: str = "jsonl"
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.detectors:
            raise ConfigError("detector selection is empty")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r} (choose from {', '.join(FORMATS)})")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        unknown = sorted(set(data) - set(_TOP_KEYS))
        if unknown:
            raise ConfigError(f"unknown config key: {unknown[0]}")
        kwargs: dict[str, Any] = {}
        try:
            if "thresholds" in data:
                kwargs["thresholds"] = ThresholdConfig.from_dict(data["thresholds"])
            if "client" in data:
                client = data["client"]
                if not isinstance(client, dict):
                    raise ConfigError("client must be a mapping")
                bad = sorted(set(client) - set(_CLIENT_KEYS))
                if bad:
                    raise ConfigError(f"unknown client config key: {bad[0]}")
                kwargs["client"] = ApiClientConfig(**client)
            if "detectors" in data:
                kwargs["detectors"] = parse_detectors(data["detectors"])
        except (TypeError, SnapshotError) as exc:
            raise ConfigError(str(exc)) from exc
        if "format" in data:
            kwargs["format"] = data["format"]
        if "seed" in data:
            if not isinstance(data["seed"], int) or isinstance(data["seed"], bool):
                raise ConfigError("seed must be an integer")
            kwargs["seed"] = data["seed"]
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path | None) -> RunConfig:
        if path is None:
            return cls()
        path = Path(path)
        raw = path.read_bytes()
        try:
            if path.suffix.lower() == ".toml":
                data = tomllib.loads(raw.decode("utf-8"))
            else:
                data = json.loads(raw)
        except (ValueError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"{path}: malformed config: {exc}") from exc
        return cls.from_dict(data)

    def override(self, **flags: Any) -> RunConfig:
        """Apply command-line flags; ``None`` means the flag was not given."""
        changes = {k: v for k, v in flags.items() if v is not None and k in ("format", "seed")}
        cfg = dataclasses.replace(self, **changes)
        if flags.get("detectors") is not None:
            cfg = dataclasses.replace(cfg, detectors=parse_detectors(flags["detectors"]))
        if flags.get("token_env") is not None:
            cfg = dataclasses.replace(cfg, client=dataclasses.replace(cfg.client, token_env=flags["token_env"]))
        return cfg


# -- output helpers --------------------------------------------------------

def _write(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _evidence_text(v: DetectionVerdict) -> str:
    parts = []
    for e in v.evidence:
        observed = json.dumps(e.observed, ensure_ascii=False)
        parts.append(f"{e.clause}={observed}" if e.threshold is None else f"{e.clause}={observed} (vs {e.threshold})")
    return "; ".join(parts)


def render_verdicts(verdicts: Sequence[DetectionVerdict], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(v.to_dict(), ensure_ascii=False) + "\n" for v in verdicts)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(("detector", "subject", "flagged", "indeterminate", "evidence"))
        for v in verdicts:
            evidence = json.dumps(v.to_dict()["evidence"], ensure_ascii=False)
            writer.writerow((v.detector.value, v.subject, str(v.flagged).lower(), str(v.indeterminate).lower(), evidence))
        return buf.getvalue()
    lines = ["| detector | subject | flagged | evidence |", "|---|---|---|---|"]
    for v in verdicts:
        flag = "indeterminate" if v.indeterminate else ("yes" if v.flagged else "no")
        evidence = _evidence_text(v).replace("|", "\\|")
        lines.append(f"| {v.detector.value} | {v.subject} | {flag} | {evidence} |")
    return "\n".join(lines) + "\n"


# -- commands --------------------------------------------------------------

config_option = click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON or TOML run config.")
out_option = click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout.")
format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), help="Output format (default jsonl).")
seed_option = click.option("--seed", type=int, help="Seed for every random choice (default 0).")


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging on stderr.")
def cli(verbose: int) -> None:
    """Detect platform-abuse symptoms in GitHub repository and user snapshots."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command("fetch")
@click.argument("kind", type=click.Choice(("repo", "user")))
@click.argument("name")
@config_option
@out_option
@click.option("--token-env", help="Environment variable holding the API token (default GH_TOKEN).")
@click.option("--max-commits", type=click.IntRange(min=0), default=RepoLimits().max_commits, show_default=True)
@click.option("--max-issues", type=click.IntRange(min=0), default=RepoLimits().max_issues, show_default=True)
@click.option("--max-stars", type=click.IntRange(min=0), default=RepoLimits().max_stars, show_default=True)
@click.option("--max-starred", type=click.IntRange(min=0), default=UserLimits().max_starred, show_default=True)
@click.option("--max-events", type=click.IntRange(min=0), default=UserLimits().max_events, show_default=True)
@click.option("--max-repos", type=click.IntRange(min=0), default=UserLimits().max_repos, show_default=True)
def fetch_cmd(kind, name, config_path, out, token_env, max_commits, max_issues, max_stars, max_starred, max_events, max_repos):
    """Capture a repo (owner/name) or user (login) snapshot from the GitHub API."""
    run = RunConfig.load(config_path).override(token_env=token_env)
    if kind == "repo":
        snap, report = fetch_repo_snapshot(run.client, name, RepoLimits(max_commits, max_issues, max_stars))
    else:
        snap, report = fetch_user_snapshot(run.client, name, UserLimits(max_starred, max_events, max_repos))
    for warning in report.warnings:
        logger.warning("%s: %s", report.subject, warning)
    logger.info("%s: %d requests, rate limit remaining %s", report.subject, report.requests_made, report.rate_limit_remaining)
    _write(dumps_snapshot(snap), out)
    return EXIT_OK


@cli.command("scan")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@config_option
@out_option
@format_option
@seed_option
@click.option("--detectors", help="Comma-separated detector names, or 'all'.")
@click.option("--spam-model", type=click.Path(dir_okay=False), help="Saved spam model (default: train on bundled data).")
def scan_cmd(paths, config_path, out, fmt, seed, detectors, spam_model):
    """Run detectors over snapshot files and directories as one batch.

    Exits 2 when any verdict is flagged.
    """
    run = RunConfig.load(config_path).override(format=fmt, seed=seed, detectors=detectors)
    repos, users = load_batch(paths)
    model = SpamModel.load(spam_model) if spam_model else (lambda: default_spam_model(run.seed))
    verdicts = scan([*repos, *users], run.detectors, run.thresholds, model)
    _write(render_verdicts(verdicts, run.format), out)
    flagged = sum(v.flagged for v in verdicts)
    logger.info("%d verdicts, %d flagged", len(verdicts), flagged)
    return EXIT_FLAGGED if flagged else EXIT_OK


@cli.command("eval")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@config_option
@out_option
@format_option
@seed_option
@click.option("--spam-model", type=click.Path(dir_okay=False), help="Saved spam model (default: train on bundled data).")
@click.option("--plot-data", type=click.Path(dir_okay=False), help="Also write subcategory,metric,value CSV here.")
def eval_cmd(manifest, config_path, out, fmt, seed, spam_model, plot_data):
    """Score a labeled corpus and report per-subcategory metrics."""
    run = RunConfig.load(config_path).override(format=fmt, seed=seed)
    model = SpamModel.load(spam_model) if spam_model else default_spam_model(run.seed)
    result = evaluate(manifest, run.thresholds, model)
    _write(emit_report(result.rows, run.format), out)
    if plot_data:
        Path(plot_data).write_text(plot_data_csv(result.rows), encoding="utf-8", newline="")
    return EXIT_OK


def _parse_counts(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        pos, neg = (int(p) for p in text.split(","))
    except ValueError:
        raise click.BadParameter("expected POSITIVES,NEGATIVES", param_hint="--counts") from None
    return pos, neg


@cli.command("gen-fixtures")
@click.argument("out_dir", type=click.Path(file_okay=False))
@config_option
@seed_option
@click.option("--counts", help="POSITIVES,NEGATIVES for every subcategory (default: 392-instance corpus).")
def gen_fixtures_cmd(out_dir, config_path, seed, counts):
    """Write a synthetic labeled corpus and its manifest."""
    run = RunConfig.load(config_path).override(seed=seed)
    per_category = _parse_counts(counts)
    manifest = generate_fixture_corpus(run.seed, per_category or DEFAULT_COUNTS, run.thresholds, out_dir)
    logger.info("wrote %s", manifest)
    return EXIT_OK


@cli.command("train-spam")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.argument("model_out", type=click.Path(dir_okay=False))
@seed_option
@click.option("--epochs", type=click.IntRange(min=1), default=400, show_default=True)
@click.option("--learning-rate", type=click.FloatRange(min=0, min_open=True), default=2.0, show_default=True)
def train_spam_cmd(corpus, model_out, seed, epochs, learning_rate):
    """Train the issue-spam classifier on {text, label} JSON lines."""
    rows = read_training_jsonl(corpus)
    model = train_spam_model(rows, seed=seed or 0, epochs=epochs, learning_rate=learning_rate)
    model.save(model_out)
    logger.info("trained on %d examples, vocabulary %d", len(rows), model.tfidf.dim)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; maps click's usage errors (normally exit 2) to exit 1."""
    try:
        rc = cli.main(args=list(argv) if argv is not None else None, prog_name="ghabuse", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("error: aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}".replace("\n", " "), err=True)
        return EXIT_ERROR
    except _OPERATIONAL as exc:
        message = str(exc).replace("\n", " ") or type(exc).__name__
        click.echo(f"error: {message}", err=True)
        return EXIT_ERROR
    return rc if isinstance(rc, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
