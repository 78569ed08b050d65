"""Self-describing JSON model documents.

Every document carries the model kind, its parameters, and the encoding
table plus standardization parameters needed to score raw NSL-KDD lines::

    {"format": "amids-model", "schema_version": 1, "model_kind": "mlp",
     "encoding": {...}, "standardization": {...}, "model": {...}}

Floats are written with ``repr``, which round-trips every double exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import mlp
from .baselines import forest, naive_bayes, svm
from .dataset import EncodingTable, StandardizationParams, encode_records, standardize
from .errors import FormatError
from .fileio import atomic_write_text

FORMAT = "amids-model"
SCHEMA_VERSION = 1
MODEL_KINDS = ("mlp", "random_forest", "gaussian_nb", "svm")
PROBABILISTIC_KINDS = ("mlp", "random_forest", "gaussian_nb")


def model_kind(model):
    if isinstance(model, mlp.MLPModel):
        return "mlp"
    if isinstance(model, forest.RandomForestModel):
        return "random_forest"
    if isinstance(model, naive_bayes.GaussianNBModel):
        return "gaussian_nb"
    if isinstance(model, svm.SVMModel):
        return "svm"
    raise TypeError(f"cannot serialize {type(model).__name__}")


@dataclass
class ModelBundle:
    """A model with the preprocessing it was trained behind."""
    model: object
    encoding: EncodingTable | None = None
    standardization: StandardizationParams | None = None

    @property
    def kind(self):
        return model_kind(self.model)

    @property
    def probabilistic(self):
        return self.kind in PROBABILISTIC_KINDS

    def predict_batch(self, X):
        """Scores already-standardized rows: ``(classes, confidence or margin)``."""
        return predict_any(self.model, X)

    def prepare(self, records):
        if self.encoding is None or self.standardization is None:
            raise FormatError("model document lacks encoding or standardization", "$")
        X, y = encode_records(records, self.encoding)
        return standardize(X, self.standardization), y


def predict_any(model, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    kind = model_kind(model)
    if kind == "mlp":
        return mlp.predict_batch(model, X)
    if kind == "random_forest":
        return forest.predict_forest_batch(model, X)
    if kind == "gaussian_nb":
        return naive_bayes.predict_nb_batch(model, X)
    return svm.predict_svm_batch(model, X)


def _floats(a):
    return [float(v) for v in np.asarray(a, dtype=np.float64).ravel()]


def _ints(a):
    return [int(v) for v in np.asarray(a).ravel()]


def _model_body(model):
    kind = model_kind(model)
    if kind == "mlp":
        return {
            "layer_sizes": list(model.layer_sizes),
            "activation": model.activation.value,
            "weights": [_floats(W) for W in model.weights],
            "biases": [_floats(b) for b in model.biases],
        }
    if kind == "random_forest":
        return {
            "n_features": model.n_features,
            "max_features": model.max_features,
            "tree_seeds": list(model.tree_seeds),
            "trees": [
                {
                    "feature": _ints(t.feature),
                    "threshold": _floats(t.threshold),
                    "left": _ints(t.left),
                    "right": _ints(t.right),
                    "counts": _ints(t.counts),
                }
                for t in model.trees
            ],
        }
    if kind == "gaussian_nb":
        return {
            "n_features": int(model.means.shape[1]),
            "priors": _floats(model.priors),
            "means": _floats(model.means),
            "variances": _floats(model.variances),
            "smoothing": float(model.smoothing),
        }
    return {
        "n_features": int(model.support_vectors.shape[1]) if model.support_vectors.ndim == 2 else 0,
        "gamma": model.gamma,
        "C": model.C,
        "b": model.b,
        "converged": model.converged,
        "max_kkt_violation": model.max_kkt_violation,
        "sweeps": model.sweeps,
        "support_vectors": _floats(model.support_vectors),
        "coef": _floats(model.coef),
        "alphas": _floats(model.alphas),
    }


def serialize_model(model, encoding=None, standardization=None) -> str:
    if isinstance(model, ModelBundle):
        model, encoding, standardization = model.model, model.encoding, model.standardization
    doc = {
        "format": FORMAT,
        "schema_version": SCHEMA_VERSION,
        "model_kind": model_kind(model),
        "encoding": encoding.to_dict() if encoding is not None else None,
        "standardization": standardization.to_dict() if standardization is not None else None,
        "model": _model_body(model),
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise FormatError("expected an object", path)
    if key not in obj:
        raise FormatError(f"missing field {key!r}", path)
    return obj[key]


def _array(obj, key, path, shape=None, dtype=np.float64):
    where = f"{path}.{key}"
    value = _get(obj, key, path)
    if not isinstance(value, list):
        raise FormatError("expected a list", where)
    try:
        arr = np.asarray(value, dtype=dtype)
    except (TypeError, ValueError):
        raise FormatError("expected a list of numbers", where) from None
    if shape is not None:
        if arr.size != int(np.prod(shape)):
            raise FormatError(f"expected {int(np.prod(shape))} values, got {arr.size}", where)
        arr = arr.reshape(shape)
    return arr


def _scalar(obj, key, path, kind):
    value = _get(obj, key, path)
    if kind is bool:
        ok = isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not ok:
        raise FormatError(f"expected {kind.__name__}", f"{path}.{key}")
    return kind(value)


def _parse_mlp(body, path):
    sizes = [int(s) for s in _array(body, "layer_sizes", path, dtype=np.int64)]
    activation = _get(body, "activation", path)
    try:
        activation = mlp.Activation.parse(activation)
    except Exception:
        raise FormatError(f"unknown activation {activation!r}", f"{path}.activation") from None
    weights_raw = _get(body, "weights", path)
    biases_raw = _get(body, "biases", path)
    n_layers = len(sizes) - 1
    if not isinstance(weights_raw, list) or len(weights_raw) != n_layers:
        raise FormatError(f"expected {n_layers} weight matrices", f"{path}.weights")
    if not isinstance(biases_raw, list) or len(biases_raw) != n_layers:
        raise FormatError(f"expected {n_layers} bias vectors", f"{path}.biases")
    weights = [
        _array({"w": w}, "w", f"{path}.weights[{l}]", shape=(sizes[l + 1], sizes[l]))
        for l, w in enumerate(weights_raw)
    ]
    biases = [
        _array({"b": b}, "b", f"{path}.biases[{l}]", shape=(sizes[l + 1],))
        for l, b in enumerate(biases_raw)
    ]
    try:
        return mlp.MLPModel(tuple(sizes), weights, biases, activation)
    except Exception as exc:
        raise FormatError(str(exc), path) from None


def _parse_forest(body, path):
    trees_raw = _get(body, "trees", path)
    if not isinstance(trees_raw, list) or not trees_raw:
        raise FormatError("expected a non-empty list of trees", f"{path}.trees")
    trees = []
    for i, t in enumerate(trees_raw):
        tp = f"{path}.trees[{i}]"
        feature = _array(t, "feature", tp, dtype=np.int64)
        n = feature.shape[0]
        trees.append(forest.DecisionTree(
            feature,
            _array(t, "threshold", tp, shape=(n,)),
            _array(t, "left", tp, shape=(n,), dtype=np.int64),
            _array(t, "right", tp, shape=(n,), dtype=np.int64),
            _array(t, "counts", tp, shape=(n, 2), dtype=np.int64),
        ))
    seeds = _get(body, "tree_seeds", path)
    if not isinstance(seeds, list) or len(seeds) != len(trees):
        raise FormatError("expected one seed per tree", f"{path}.tree_seeds")
    return forest.RandomForestModel(
        tuple(trees), tuple(int(s) for s in seeds),
        _scalar(body, "max_features", path, int), _scalar(body, "n_features", path, int),
    )


def _parse_nb(body, path):
    d = _scalar(body, "n_features", path, int)
    return naive_bayes.GaussianNBModel(
        _array(body, "priors", path, shape=(2,)),
        _array(body, "means", path, shape=(2, d)),
        _array(body, "variances", path, shape=(2, d)),
        _scalar(body, "smoothing", path, float),
    )


def _parse_svm(body, path):
    d = _scalar(body, "n_features", path, int)
    coef = _array(body, "coef", path)
    return svm.SVMModel(
        _array(body, "support_vectors", path, shape=(coef.shape[0], d)),
        coef,
        _array(body, "alphas", path, shape=coef.shape),
        _scalar(body, "b", path, float),
        _scalar(body, "gamma", path, float),
        _scalar(body, "C", path, float),
        _scalar(body, "converged", path, bool),
        _scalar(body, "max_kkt_violation", path, float),
        _scalar(body, "sweeps", path, int),
    )


_PARSERS = {
    "mlp": _parse_mlp,
    "random_forest": _parse_forest,
    "gaussian_nb": _parse_nb,
    "svm": _parse_svm,
}


def deserialize_model(text: str) -> ModelBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise FormatError("document must be a JSON object", "$")
    if doc.get("format") != FORMAT:
        raise FormatError(f"not an {FORMAT} document", "$.format")
    version = _get(doc, "schema_version", "$")
    if version != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema version {version!r}", "$.schema_version")
    kind = _get(doc, "model_kind", "$")
    if kind not in _PARSERS:
        raise FormatError(f"unknown model kind {kind!r}", "$.model_kind")
    model = _PARSERS[kind](_get(doc, "model", "$"), "$.model")
    encoding = standardization = None
    enc = _get(doc, "encoding", "$")
    if enc is not None:
        try:
            encoding = EncodingTable.from_dict(enc)
        except (KeyError, TypeError, ValueError, AttributeError):
            raise FormatError("malformed encoding table", "$.encoding") from None
    std = _get(doc, "standardization", "$")
    if std is not None:
        mu = _array(std, "mu", "$.standardization")
        standardization = StandardizationParams(
            mu,
            _array(std, "sigma", "$.standardization", shape=mu.shape),
            _array(std, "constant_mask", "$.standardization", shape=mu.shape, dtype=bool),
        )
    return ModelBundle(model, encoding, standardization)


def save_model(path, model, encoding=None, standardization=None):
    atomic_write_text(path, serialize_model(model, encoding, standardization))


def load_model(path) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize_model(fh.read())
