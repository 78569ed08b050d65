"""Record-stream classifier that raises alerts, for host or network sensors.

Both sensor roles run the same pipeline; the role only tags the alerts.
Each line is parsed, encoded, standardized and scored on its own, through
the same batch-independent kernels used for offline prediction.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .dataset import RawRecord, binarize_label, encode_records, parse_line, standardize
from .errors import AmidsError, ConfigError, FormatError
from .experiments import EvalReport, evaluate
from .serialize import ModelBundle, deserialize_model, load_model

EXCERPT_FIELDS = 6


class SensorRole(str, Enum):
    HOST = "host"
    NETWORK = "network"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown sensor role {name!r} (choose host or network)") from None


@dataclass(frozen=True)
class Alert:
    seq: int                 # 1-based position of the record in the stream
    timestamp: float         # monotonic clock reading
    role: SensorRole
    confidence: float
    record: RawRecord
    predicted_class: int = 1

    def excerpt(self):
        return ":".join(self.record.features[:EXCERPT_FIELDS])

    def to_line(self):
        return f"{self.seq},{self.timestamp:.6f},{self.role.value},{self.confidence:.6f},{self.excerpt()}"


@dataclass
class StreamSummary:
    records_seen: int = 0
    classified: int = 0
    alerts: int = 0
    skipped: int = 0
    warnings: list = field(default_factory=list)
    report: EvalReport | None = None

    def to_dict(self):
        out = {
            "records_seen": self.records_seen,
            "classified": self.classified,
            "alerts": self.alerts,
            "skipped": self.skipped,
            "warnings": list(self.warnings),
        }
        if self.report is not None:
            r = self.report
            out["evaluation"] = {
                "accuracy": r.accuracy,
                "loss": r.loss,
                "p_detection": r.p_detection,
                "p_false_alarm": r.p_false_alarm,
                "p_miss_detection": r.p_miss_detection,
                "tp": r.confusion.tp, "tn": r.confusion.tn,
                "fp": r.confusion.fp, "fn": r.confusion.fn,
            }
        return out


class StreamClassifier:
    def __init__(self, bundle: ModelBundle, role=SensorRole.NETWORK, threshold=0.5, clock=time.monotonic):
        if bundle.encoding is None or bundle.standardization is None:
            raise FormatError("model document lacks the encoding table or standardization parameters", "$")
        if not bundle.probabilistic:
            raise ConfigError(f"{bundle.kind} models give no confidence and cannot drive alerts")
        threshold = float(threshold)
        if not 0.5 <= threshold <= 1.0:
            raise ConfigError(f"threshold must lie in [0.5, 1], got {threshold}")
        self.bundle = bundle
        self.role = SensorRole.parse(role)
        self.threshold = threshold
        self.clock = clock
        self.summary = StreamSummary()
        self._pred = []
        self._conf = []
        self._truth = []

    def score(self, record: RawRecord):
        """``(class, confidence)`` for one record; raises on unknown symbols."""
        X, _ = encode_records([record], self.bundle.encoding)
        X = standardize(X, self.bundle.standardization)
        cls, conf = self.bundle.predict_batch(X)
        return int(cls[0]), float(conf[0])

    def run(self, lines: Iterable[str]) -> Iterator[Alert]:
        seq = 0
        for line in lines:
            if not line.strip():
                continue
            seq += 1
            self.summary.records_seen += 1
            try:
                record = parse_line(line, seq, allow_unlabeled=True)
                cls, conf = self.score(record)
            except AmidsError as exc:
                self.summary.skipped += 1
                self.summary.warnings.append(f"record {seq}: {exc}")
                continue
            self.summary.classified += 1
            if record.label is not None:
                self._pred.append(cls)
                self._conf.append(conf)
                self._truth.append(binarize_label(record.label))
            if cls == 1 and conf >= self.threshold:
                self.summary.alerts += 1
                yield Alert(seq, self.clock(), self.role, conf, record)
        if self._truth:
            self.summary.report = evaluate(np.array(self._pred), np.array(self._truth), np.array(self._conf))


def classify_stream(model, lines, role=SensorRole.NETWORK, threshold=0.5, clock=time.monotonic):
    """Run a whole stream; ``model`` is a bundle, a document string or a path.

    Returns ``(alerts, summary)``.
    """
    if isinstance(model, ModelBundle):
        bundle = model
    elif isinstance(model, str) and model.lstrip().startswith("{"):
        bundle = deserialize_model(model)
    else:
        bundle = load_model(model)
    clf = StreamClassifier(bundle, role, threshold, clock)
    alerts = list(clf.run(lines))
    return alerts, clf.summary
