"""NSL-KDD parsing, nominal encoding, standardization, folds and subsampling.

Encoded data is carried as a pair of arrays: ``X`` of shape ``(n, 41)``
(float64) and ``y`` of shape ``(n,)`` (int64, 0 = normal, 1 = attack).
``EncodedRecord`` is the single-row view of the same thing.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BoundsError,
    EmptyDatasetError,
    InsufficientDataError,
    ParseError,
    StratificationError,
    UnknownSymbolError,
)

N_FEATURES = 41

FEATURE_NAMES = (
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
)

PROTOCOL_COL = 1
SERVICE_COL = 2
FLAG_COL = 3
NOMINAL_COLS = (PROTOCOL_COL, SERVICE_COL, FLAG_COL)
NUMERIC_COLS = tuple(i for i in range(N_FEATURES) if i not in NOMINAL_COLS)

PROTOCOL_CODES = {"tcp": 2, "udp": 3, "icmp": 4}
FLAG_CODES = {
    "OTH": 5, "REJ": 6, "RSTO": 7, "RSTR": 8, "S0": 9,
    "S1": 10, "S2": 11, "S3": 12, "SF": 13, "SH": 14,
}
SERVICE_BASE = 15
LABEL_CODES = {"normal": 0, "attack": 1}

# attack name -> category, covering the training and test files
_CATEGORIES = {
    "dos": (
        "back", "land", "neptune", "pod", "smurf", "teardrop", "apache2",
        "udpstorm", "processtable", "worm", "mailbomb",
    ),
    "probe": ("satan", "ipsweep", "nmap", "portsweep", "mscan", "saint"),
    "r2l": (
        "guess_passwd", "ftp_write", "imap", "phf", "multihop", "warezmaster",
        "warezclient", "spy", "xlock", "xsnoop", "snmpguess", "snmpgetattack",
        "httptunnel", "sendmail", "named",
    ),
    "u2r": (
        "buffer_overflow", "loadmodule", "rootkit", "perl", "ps", "sqlattack",
        "xterm",
    ),
}
ATTACK_CATEGORY = {name: cat for cat, names in _CATEGORIES.items() for name in names}
CATEGORY_ORDER = ("dos", "r2l", "u2r", "probe", "normal", "unknown")


@dataclass(frozen=True)
class RawRecord:
    features: tuple
    label: str | None
    difficulty: int | None = None

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise ParseError(f"expected {N_FEATURES} features, got {len(self.features)}")
        if self.label is not None and not self.label:
            raise ParseError("empty label")

    @property
    def protocol(self):
        return self.features[PROTOCOL_COL]

    @property
    def service(self):
        return self.features[SERVICE_COL]

    @property
    def flag(self):
        return self.features[FLAG_COL]


@dataclass(frozen=True)
class EncodedRecord:
    x: np.ndarray
    y: int


def parse_line(text, lineno=None, allow_unlabeled=False):
    """Parse one comma-separated NSL-KDD line.

    42 fields: features + label; 43 fields: + difficulty.  With
    ``allow_unlabeled`` a bare 41-feature line is accepted (label None).
    """
    fields = [s.strip() for s in text.strip().split(",")]
    n = len(fields)
    if n == N_FEATURES and allow_unlabeled:
        return RawRecord(tuple(fields), None)
    if n not in (N_FEATURES + 1, N_FEATURES + 2):
        raise ParseError(f"expected 42 or 43 comma-separated fields, found {n}", lineno)
    label = fields[N_FEATURES]
    if not label:
        raise ParseError("empty label", lineno)
    difficulty = None
    if n == N_FEATURES + 2:
        try:
            difficulty = int(fields[N_FEATURES + 1])
        except ValueError:
            raise ParseError(f"difficulty {fields[N_FEATURES + 1]!r} is not an integer", lineno) from None
    return RawRecord(tuple(fields[:N_FEATURES]), label, difficulty)


def parse_nslkdd(lines: Iterable[str]) -> list[RawRecord]:
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        records.append(parse_line(line, lineno))
    if not records:
        raise EmptyDatasetError("no records in input")
    return records


def read_nslkdd(path) -> list[RawRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_nslkdd(fh)


def binarize_label(label: str) -> int:
    return 0 if label.strip().lower() == "normal" else 1


def attack_category(label: str) -> str:
    name = label.strip().lower()
    if name == "normal":
        return "normal"
    return ATTACK_CATEGORY.get(name, "unknown")


@dataclass(frozen=True)
class EncodingTable:
    protocol_map: dict = field(default_factory=lambda: dict(PROTOCOL_CODES))
    flag_map: dict = field(default_factory=lambda: dict(FLAG_CODES))
    service_map: dict = field(default_factory=dict)
    label_map: dict = field(default_factory=lambda: dict(LABEL_CODES))

    def protocol_code(self, symbol):
        try:
            return self.protocol_map[symbol.lower()]
        except KeyError:
            raise UnknownSymbolError("protocol", symbol) from None

    def flag_code(self, symbol):
        try:
            return self.flag_map[symbol.upper()]
        except KeyError:
            raise UnknownSymbolError("flag", symbol) from None

    def service_code(self, symbol):
        try:
            return self.service_map[symbol]
        except KeyError:
            raise UnknownSymbolError("service", symbol) from None

    def to_dict(self):
        return {
            "protocol_map": dict(sorted(self.protocol_map.items(), key=lambda kv: kv[1])),
            "flag_map": dict(sorted(self.flag_map.items(), key=lambda kv: kv[1])),
            "service_map": dict(sorted(self.service_map.items(), key=lambda kv: kv[1])),
            "label_map": dict(sorted(self.label_map.items(), key=lambda kv: kv[1])),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            protocol_map={str(k): int(v) for k, v in d["protocol_map"].items()},
            flag_map={str(k): int(v) for k, v in d["flag_map"].items()},
            service_map={str(k): int(v) for k, v in d["service_map"].items()},
            label_map={str(k): int(v) for k, v in d["label_map"].items()},
        )


def build_encoding(records: Sequence[RawRecord]) -> EncodingTable:
    if not records:
        raise EmptyDatasetError("cannot build an encoding from zero records")
    table = EncodingTable()
    services = set()
    for rec in records:
        table.protocol_code(rec.protocol)
        table.flag_code(rec.flag)
        services.add(rec.service)
    service_map = {name: SERVICE_BASE + i for i, name in enumerate(sorted(services))}
    return EncodingTable(service_map=service_map)


def _encode_row(rec: RawRecord, table: EncodingTable, lineno=None) -> np.ndarray:
    x = np.empty(N_FEATURES)
    for i, value in enumerate(rec.features):
        if i == PROTOCOL_COL:
            x[i] = table.protocol_code(value)
        elif i == SERVICE_COL:
            x[i] = table.service_code(value)
        elif i == FLAG_COL:
            x[i] = table.flag_code(value)
        else:
            try:
                x[i] = float(value)
            except ValueError:
                raise ParseError(f"feature {FEATURE_NAMES[i]} is not numeric: {value!r}", lineno) from None
    if not np.all(np.isfinite(x)):
        raise ParseError("non-finite feature value", lineno)
    return x


def encode(record: RawRecord, table: EncodingTable) -> EncodedRecord:
    y = binarize_label(record.label) if record.label is not None else 0
    return EncodedRecord(_encode_row(record, table), y)


def encode_records(records: Sequence[RawRecord], table: EncodingTable):
    """Encode many records at once; returns ``(X, y)``."""
    if not records:
        raise EmptyDatasetError("no records to encode")
    n = len(records)
    X = np.empty((n, N_FEATURES))
    raw = np.array([rec.features for rec in records], dtype=str)
    try:
        X[:, NUMERIC_COLS] = raw[:, NUMERIC_COLS].astype(np.float64)
    except ValueError:
        # slow path only to locate the offending record
        for i, rec in enumerate(records):
            _encode_row(rec, table, lineno=i + 1)
        raise
    for col, lookup in (
        (PROTOCOL_COL, table.protocol_code),
        (SERVICE_COL, table.service_code),
        (FLAG_COL, table.flag_code),
    ):
        symbols, inverse = np.unique(raw[:, col], return_inverse=True)
        codes = np.array([lookup(s) for s in symbols], dtype=np.float64)
        X[:, col] = codes[inverse.ravel()]
    if not np.all(np.isfinite(X)):
        bad = int(np.nonzero(~np.isfinite(X).all(axis=1))[0][0])
        raise ParseError("non-finite feature value", bad + 1)
    y = np.array([binarize_label(rec.label) if rec.label is not None else 0 for rec in records], dtype=np.int64)
    return X, y


@dataclass(frozen=True)
class StandardizationParams:
    mu: np.ndarray
    sigma: np.ndarray
    constant_mask: np.ndarray

    def to_dict(self):
        return {
            "mu": [float(v) for v in self.mu],
            "sigma": [float(v) for v in self.sigma],
            "constant_mask": [bool(v) for v in self.constant_mask],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["mu"], dtype=np.float64),
            np.asarray(d["sigma"], dtype=np.float64),
            np.asarray(d["constant_mask"], dtype=bool),
        )


def _as_matrix(data):
    if isinstance(data, np.ndarray):
        return np.atleast_2d(np.asarray(data, dtype=np.float64))
    return np.array([r.x for r in data], dtype=np.float64)


def fit_standardization(data) -> StandardizationParams:
    """Per-feature mean and population standard deviation."""
    X = _as_matrix(data)
    if X.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 records to standardize, got {X.shape[0]}")
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    # exact test, since a mean of identical values can round away from them;
    # a spread so small that its variance underflows counts as constant too
    constant = np.all(X == X[0], axis=0) | (sigma == 0)
    mu = np.where(constant, X[0], mu)
    sigma = np.where(constant, 0.0, sigma)
    return StandardizationParams(mu, sigma, constant)


def standardize(data, params: StandardizationParams):
    """Apply ``(x - mu) / sigma``; constant features map to 0.

    Accepts an ``EncodedRecord``, a single feature vector or a matrix.
    """
    if isinstance(data, EncodedRecord):
        return EncodedRecord(standardize(data.x, params), data.y)
    X = np.asarray(data, dtype=np.float64)
    safe = np.where(params.constant_mask, 1.0, params.sigma)
    Z = (X - params.mu) / safe
    return np.where(params.constant_mask, 0.0, Z)


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    assignment: np.ndarray

    def test_indices(self, fold):
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignment != fold)

    def splits(self):
        for fold in range(self.k):
            yield self.train_indices(fold), self.test_indices(fold)


def _labels(data):
    if isinstance(data, np.ndarray):
        return data.astype(np.int64, copy=False)
    return np.array([r.y for r in data], dtype=np.int64)


def stratified_kfold(labels, k: int, seed: int) -> FoldAssignment:
    """Class-stratified fold assignment.

    Each class is shuffled and dealt round-robin, continuing where the
    previous class stopped, so fold sizes differ by at most one as well.
    """
    y = _labels(labels)
    if k < 2:
        raise StratificationError(f"fold count must be >= 2, got {k}")
    classes, counts = np.unique(y, return_counts=True)
    for c, cnt in zip(classes, counts):
        if cnt < k:
            raise StratificationError(f"class {c} has {cnt} members, fewer than k={k}")
    rng = np.random.default_rng(seed)
    assignment = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for c in classes:
        members = rng.permutation(np.flatnonzero(y == c))
        assignment[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return FoldAssignment(k, assignment)


def subsample_indices(labels, n: int, seed: int) -> np.ndarray:
    """Stratified sample of ``n`` indices without replacement, shuffled.

    Per-class quotas use largest remainders (ties go to the lower class).
    """
    y = _labels(labels)
    total = y.shape[0]
    if n < 0 or n > total:
        raise BoundsError(f"cannot draw {n} records from {total}")
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(y, return_counts=True)
    quota = n * counts // total
    remainder = n * counts % total
    short = n - int(quota.sum())
    for j in sorted(range(len(classes)), key=lambda j: (-remainder[j], j))[:short]:
        quota[j] += 1
    picked = [
        rng.choice(np.flatnonzero(y == c), size=int(q), replace=False)
        for c, q in zip(classes, quota)
    ]
    return rng.permutation(np.concatenate(picked))


def subsample(X, y, n: int, seed: int):
    idx = subsample_indices(y, n, seed)
    return X[idx], y[idx]


def csv_header():
    return [f"f{i}" for i in range(1, N_FEATURES + 1)] + ["label"]


def write_encoded_csv(path_or_file, X, y):
    """41 numeric columns plus label; floats use ``repr`` so they reload exactly."""
    close = False
    if isinstance(path_or_file, (str, os.PathLike)):
        fh = open(path_or_file, "w", newline="", encoding="utf-8")
        close = True
    else:
        fh = path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header())
        for row, label in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [int(label)])
    finally:
        if close:
            fh.close()


def read_encoded_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != csv_header():
            raise ParseError("not an encoded dataset (bad header)", 1)
        data = np.loadtxt(fh, delimiter=",", dtype=np.float64, ndmin=2)
    if data.shape[0] == 0:
        raise EmptyDatasetError(f"{path}: no records")
    if data.shape[1] != N_FEATURES + 1:
        raise ParseError(f"expected {N_FEATURES + 1} columns, found {data.shape[1]}")
    return data[:, :N_FEATURES].copy(), data[:, N_FEATURES].astype(np.int64)


def is_encoded_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.readline().startswith("f1,")


def category_counts(records: Sequence[RawRecord]):
    counts = dict.fromkeys(CATEGORY_ORDER, 0)
    for rec in records:
        counts[attack_category(rec.label)] += 1
    return counts


def records_from_text(text: str) -> list[RawRecord]:
    return parse_nslkdd(io.StringIO(text))
