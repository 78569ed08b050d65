"""Metrics, k-fold cross-validation, parameter sweeps and the four-way comparison.

Seeding: the fold assignment and any subsample use ``seed`` directly; the
model trained on fold ``i`` gets ``fold_seed(seed, i)``.
"""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import mlp
from .baselines import forest, naive_bayes, svm
from .dataset import FoldAssignment, fit_standardization, standardize, stratified_kfold, subsample_indices
from .errors import BoundsError, ConfigError, ShapeError
from .fileio import atomic_write_text

# Table 3 accuracies, shown beside ours in comparison output
REFERENCE_ACCURACY = {
    "deep_learning": 0.995,
    "random_forest": 0.993,
    "svm": 0.617,
    "naive_bayes": 0.889,
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other):
        return ConfusionMatrix(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)


def confusion_matrix(predicted, truth):
    p = np.asarray(predicted, dtype=np.int64)
    t = np.asarray(truth, dtype=np.int64)
    return ConfusionMatrix(
        int(np.sum((p == 1) & (t == 1))),
        int(np.sum((p == 0) & (t == 0))),
        int(np.sum((p == 1) & (t == 0))),
        int(np.sum((p == 0) & (t == 1))),
    )


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    loss: float | None
    p_detection: float | None
    p_false_alarm: float | None
    p_miss_detection: float | None
    train_seconds: float = 0.0
    inference_seconds: float = 0.0


def class1_probability(classes, confidences):
    classes = np.asarray(classes, dtype=np.int64)
    conf = np.asarray(confidences, dtype=np.float64)
    return np.where(classes == 1, conf, 1.0 - conf)


def evaluate(classes, truths, confidences=None, train_seconds=0.0, inference_seconds=0.0) -> EvalReport:
    """Confusion-derived metrics; attack (1) is the positive class.

    ``confidences`` are the probabilities of the predicted classes; when
    given, the mean cross-entropy is reported, otherwise ``loss`` is None.
    Rates with an empty denominator are None.
    """
    classes = np.asarray(classes, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if classes.shape != truths.shape:
        raise ShapeError(f"{classes.shape[0]} predictions for {truths.shape[0]} truths")
    if classes.size == 0:
        raise ShapeError("nothing to evaluate")
    cm = confusion_matrix(classes, truths)
    accuracy = (cm.tp + cm.tn) / cm.total
    loss = None
    if confidences is not None:
        p1 = class1_probability(classes, confidences)
        loss = float(np.mean(mlp.cross_entropy(truths, p1)))
    pd = pm = pfa = None
    if cm.tp + cm.fn:
        pd = cm.tp / (cm.tp + cm.fn)
        pm = 1.0 - pd
    if cm.fp + cm.tn:
        pfa = cm.fp / (cm.fp + cm.tn)
    return EvalReport(cm, accuracy, loss, pd, pfa, pm, train_seconds, inference_seconds)


# algorithms ------------------------------------------------------------------

@dataclass(frozen=True)
class MLPAlgorithm:
    config: mlp.TrainConfig = field(default_factory=mlp.TrainConfig)
    name: str = "deep_learning"
    probabilistic = True

    def fit(self, X, y, seed):
        model, _ = mlp.train(X, y, replace(self.config, seed=seed))
        return model

    def predict(self, model, X):
        return mlp.predict_batch(model, X)


@dataclass(frozen=True)
class ForestAlgorithm:
    tree_count: int = 100
    max_features: int | None = None
    name: str = "random_forest"
    probabilistic = True

    def fit(self, X, y, seed):
        return forest.train_forest(X, y, self.tree_count, seed, self.max_features)

    def predict(self, model, X):
        return forest.predict_forest_batch(model, X)


@dataclass(frozen=True)
class NaiveBayesAlgorithm:
    var_smoothing: float = 1e-9
    name: str = "naive_bayes"
    probabilistic = True

    def fit(self, X, y, seed):
        return naive_bayes.train_nb(X, y, self.var_smoothing)

    def predict(self, model, X):
        return naive_bayes.predict_nb_batch(model, X)


@dataclass(frozen=True)
class SVMAlgorithm:
    C: float = 1.0
    gamma: float | None = None
    tolerance: float = 1e-3
    max_passes: int = 10
    max_train: int | None = 5000
    name: str = "svm"
    probabilistic = False

    def fit(self, X, y, seed):
        if self.max_train is not None and X.shape[0] > self.max_train:
            idx = subsample_indices(y, self.max_train, seed)
            X, y = X[idx], y[idx]
        return svm.train_svm(X, y, self.C, self.gamma, self.tolerance, self.max_passes, seed)

    def predict(self, model, X):
        cls, _ = svm.predict_svm_batch(model, X)
        return cls, None


def fold_seed(seed, fold):
    return int(np.random.SeedSequence([seed, fold]).generate_state(1)[0])


# cross-validation ------------------------------------------------------------

@dataclass
class CVResult:
    folds: FoldAssignment
    reports: list

    def _values(self, attr):
        vals = [getattr(r, attr) for r in self.reports]
        if any(v is None for v in vals):
            return None
        return np.array(vals, dtype=np.float64)

    def mean(self, attr):
        v = self._values(attr)
        return None if v is None else float(v.mean())

    def std(self, attr):
        v = self._values(attr)
        return None if v is None else float(v.std())

    @property
    def accuracy(self):
        return self.mean("accuracy")

    @property
    def loss(self):
        return self.mean("loss")

    @property
    def train_seconds(self):
        return float(sum(r.train_seconds for r in self.reports))

    @property
    def inference_seconds(self):
        return float(sum(r.inference_seconds for r in self.reports))

    @property
    def confusion(self):
        total = ConfusionMatrix(0, 0, 0, 0)
        for r in self.reports:
            total = total + r.confusion
        return total


def cross_validate(algorithm, X, y, k=10, seed=0, folds=None, fitted=None) -> CVResult:
    """Per fold: standardize on the training part, fit, score the held-out part.

    ``fitted`` (optional) is called with ``(fold, model)`` after each fit.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if folds is None:
        folds = stratified_kfold(y, k, seed)
    elif folds.assignment.shape[0] != y.shape[0]:
        raise ShapeError("fold assignment does not match the data")
    reports = []
    for fold, (train_idx, test_idx) in enumerate(folds.splits()):
        params = fit_standardization(X[train_idx])
        Xtr = standardize(X[train_idx], params)
        Xte = standardize(X[test_idx], params)
        t0 = time.perf_counter()
        model = algorithm.fit(Xtr, y[train_idx], fold_seed(seed, fold))
        t1 = time.perf_counter()
        cls, conf = algorithm.predict(model, Xte)
        t2 = time.perf_counter()
        if fitted is not None:
            fitted(fold, model)
        reports.append(evaluate(cls, y[test_idx], conf, t1 - t0, t2 - t1))
    return CVResult(folds, reports)


# sweeps ----------------------------------------------------------------------

@dataclass
class SweepRow:
    value: object
    result: CVResult


@dataclass
class SweepResult:
    param: str
    rows: list = field(default_factory=list)


def _run_sweep(param, points, on_row):
    out = SweepResult(param)
    for label, thunk in points:
        out.rows.append(SweepRow(label, thunk()))
        if on_row is not None:
            on_row(out)
    return out


def sweep_packets(X, y, grid, algorithm, k=10, seed=0, on_row=None) -> SweepResult:
    """Cross-validate on stratified subsamples of each size in ``grid``."""
    grid = sorted(int(n) for n in grid)
    for n in grid:
        if n < 0 or n > len(y):
            raise BoundsError(f"grid point {n} exceeds the {len(y)} available records")

    def point(n):
        def run():
            idx = subsample_indices(y, n, seed)
            return cross_validate(algorithm, X[idx], y[idx], k, seed)
        return n, run

    return _run_sweep("packets", [point(n) for n in grid], on_row)


def sweep_epochs(X, y, grid, config: mlp.TrainConfig, k=10, seed=0, on_row=None) -> SweepResult:
    grid = sorted(int(e) for e in grid)
    configs = [replace(config, epochs=e) for e in grid]  # validates every point up front

    def point(cfg):
        return cfg.epochs, lambda: cross_validate(MLPAlgorithm(cfg), X, y, k, seed)

    return _run_sweep("epochs", [point(c) for c in configs], on_row)


def architecture_label(layers, nodes):
    return f"{layers}x{nodes}"


def sweep_architecture(X, y, grid, config: mlp.TrainConfig, k=10, seed=0, on_row=None) -> SweepResult:
    """One row per (hidden layer count, nodes per layer); activation forced to sigmoid."""
    shapes = sorted((int(l), int(n)) for l, n in grid)
    configs = []
    for layers, nodes in shapes:
        if layers < 1 or nodes < 1:
            raise ConfigError(f"invalid architecture {layers} layers x {nodes} nodes")
        configs.append(replace(config, hidden_layers=(nodes,) * layers, activation=mlp.Activation.SIGMOID))

    def point(shape, cfg):
        return architecture_label(*shape), lambda: cross_validate(MLPAlgorithm(cfg), X, y, k, seed)

    return _run_sweep("architecture", [point(s, c) for s, c in zip(shapes, configs)], on_row)


# comparison ------------------------------------------------------------------

@dataclass
class ComparisonRow:
    algorithm: str
    result: CVResult
    reference_accuracy: float | None


@dataclass
class ComparisonResult:
    rows: list
    folds: FoldAssignment


def default_algorithms(mlp_config=None):
    if mlp_config is None:
        mlp_config = mlp.TrainConfig(hidden_layers=(5, 5), activation=mlp.Activation.SIGMOID, epochs=100)
    return [MLPAlgorithm(mlp_config), ForestAlgorithm(100), SVMAlgorithm(), NaiveBayesAlgorithm()]


def compare_algorithms(X, y, seed=0, algorithms=None, k=10, on_row=None) -> ComparisonResult:
    """Cross-validate every algorithm on one shared fold assignment."""
    algorithms = default_algorithms() if algorithms is None else algorithms
    folds = stratified_kfold(y, k, seed)
    out = ComparisonResult([], folds)
    for algo in algorithms:
        res = cross_validate(algo, X, y, k, seed, folds=folds)
        out.rows.append(ComparisonRow(algo.name, res, REFERENCE_ACCURACY.get(algo.name)))
        if on_row is not None:
            on_row(out)
    return out


# CSV emission ----------------------------------------------------------------

METRIC_COLUMNS = (
    "accuracy_mean", "accuracy_std", "loss_mean", "loss_std",
    "p_detection", "p_false_alarm", "p_miss",
)


def _fmt(v):
    return "" if v is None else f"{v:.6f}"


def _metric_cells(res: CVResult):
    return [
        _fmt(res.mean("accuracy")), _fmt(res.std("accuracy")),
        _fmt(res.mean("loss")), _fmt(res.std("loss")),
        _fmt(res.mean("p_detection")), _fmt(res.mean("p_false_alarm")),
        _fmt(res.mean("p_miss_detection")),
    ]


def _render(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def csv_text(result) -> str:
    """Deterministic CSV; wall-clock timings live in ``timing_csv_text``."""
    if isinstance(result, ComparisonResult):
        rows = [("algorithm", *METRIC_COLUMNS, "reference_accuracy")]
        for r in result.rows:
            rows.append((r.algorithm, *_metric_cells(r.result), _fmt(r.reference_accuracy)))
    else:
        rows = [("param", *METRIC_COLUMNS)]
        for r in result.rows:
            rows.append((r.value, *_metric_cells(r.result)))
    return _render(rows)


def timing_csv_text(result) -> str:
    key = "algorithm" if isinstance(result, ComparisonResult) else "param"
    rows = [(key, "train_seconds", "inference_seconds")]
    for r in result.rows:
        name = r.algorithm if isinstance(result, ComparisonResult) else r.value
        rows.append((name, _fmt(r.result.train_seconds), _fmt(r.result.inference_seconds)))
    return _render(rows)


def emit_csv(result, destination, timing_destination=None):
    atomic_write_text(destination, csv_text(result))
    if timing_destination is not None:
        atomic_write_text(timing_destination, timing_csv_text(result))


def fold_table_text(result: CVResult) -> str:
    """Per-fold metrics plus a closing ``mean`` row."""
    rows = [("fold", "accuracy", "loss", "p_detection", "p_false_alarm", "p_miss", "tp", "tn", "fp", "fn")]
    for i, r in enumerate(result.reports):
        c = r.confusion
        rows.append((i, _fmt(r.accuracy), _fmt(r.loss), _fmt(r.p_detection), _fmt(r.p_false_alarm),
                     _fmt(r.p_miss_detection), c.tp, c.tn, c.fp, c.fn))
    c = result.confusion
    rows.append(("mean", _fmt(result.mean("accuracy")), _fmt(result.mean("loss")),
                 _fmt(result.mean("p_detection")), _fmt(result.mean("p_false_alarm")),
                 _fmt(result.mean("p_miss_detection")), c.tp, c.tn, c.fp, c.fn))
    return _render(rows)
