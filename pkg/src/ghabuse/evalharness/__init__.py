from ghabuse.evalharness.corpus import LabeledInstance, read_manifest, write_manifest
from ghabuse.evalharness.evaluate import EvaluationError, EvaluationResult, evaluate
from ghabuse.evalharness.fixtures import DEFAULT_COUNTS, build_fixture_corpus, generate_fixture_corpus
from ghabuse.evalharness.metrics import MetricsRow, confusion_rows, emit_report, plot_data_csv

__all__ = [
    "DEFAULT_COUNTS",
    "EvaluationError",
    "EvaluationResult",
    "LabeledInstance",
    "MetricsRow",
    "build_fixture_corpus",
    "confusion_rows",
    "emit_report",
    "evaluate",
    "generate_fixture_corpus",
    "plot_data_csv",
    "read_manifest",
    "write_manifest",
]
