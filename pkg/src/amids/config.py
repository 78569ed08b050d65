"""Run configuration: an INI file with sections, overridable by CLI flags.

Schema (every key optional; defaults shown)::

    [data]
    train =                         ; NSL-KDD file(s), comma separated
    test =                          ; held-out file(s) for `evaluate --model`
    encoding =                      ; encoding.json written by `preprocess`

    [run]
    seed = 42
    folds = 10
    output_dir = out

    [model]
    hidden_layers = 300,300
    activation = sigmoid
    epochs = 3
    batch_size = 128
    learning_rate = 0.001
    beta1 = 0.9
    beta2 = 0.999
    epsilon = 1e-8

    [sweep]
    packets = 62980,100768,125960
    epochs = 2,10,50,100
    architecture = 1x5,2x5,2x300,5x5,10x5
    activations = sigmoid

    [compare]
    mlp_hidden_layers = 5,5
    mlp_epochs = 100
    packets =                       ; stratified sample size; empty = all records

    [baselines]
    trees = 100
    nb_smoothing = 1e-9
    svm_c = 1.0
    svm_gamma = auto                ; auto = 1 / feature count
    svm_tolerance = 0.001
    svm_max_passes = 10
    svm_max_train = 5000

    [monitor]
    role = network
    threshold = 0.5

Relative data paths resolve against the config file's directory;
``output_dir`` resolves against the working directory.

Randomness: ``seed`` fixes the fold assignment and subsamples; fold ``i``
trains with ``SeedSequence([seed, i])``; forest trees derive their seeds
from the training seed; ``train`` uses ``seed`` directly.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace

from . import mlp
from .errors import ConfigError

DEFAULT_SEED = 42


def _ints(text):
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _paths(text):
    return tuple(p.strip() for p in str(text).replace("\n", ",").split(",") if p.strip())


def _shapes(text):
    out = []
    for item in str(text).split(","):
        item = item.strip().lower()
        if not item:
            continue
        try:
            layers, nodes = item.split("x")
            out.append((int(layers), int(nodes)))
        except ValueError:
            raise ConfigError(f"architecture {item!r} is not of the form LAYERSxNODES") from None
    return tuple(out)


def _names(text):
    return tuple(v.strip().lower() for v in str(text).split(",") if v.strip())


def _gamma(text):
    text = str(text).strip().lower()
    return None if text in ("", "auto") else float(text)


@dataclass
class RunConfig:
    train: tuple = ()
    test: tuple = ()
    encoding: str | None = None
    seed: int = DEFAULT_SEED
    folds: int = 10
    output_dir: str = "out"
    hidden_layers: tuple = (300, 300)
    activation: str = "sigmoid"
    epochs: int = 3
    batch_size: int = 128
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    sweep_packets: tuple = (62980, 100768, 125960)
    sweep_epochs: tuple = (2, 10, 50, 100)
    sweep_architecture: tuple = ((1, 5), (2, 5), (2, 300), (5, 5), (10, 5))
    sweep_activations: tuple = ("sigmoid",)
    compare_hidden_layers: tuple = (5, 5)
    compare_epochs: int = 100
    compare_packets: int | None = None
    trees: int = 100
    nb_smoothing: float = 1e-9
    svm_c: float = 1.0
    svm_gamma: float | None = None
    svm_tolerance: float = 1e-3
    svm_max_passes: int = 10
    svm_max_train: int = 5000
    role: str = "network"
    threshold: float = 0.5

    def train_config(self, **overrides):
        values = dict(
            hidden_layers=self.hidden_layers, activation=self.activation, epochs=self.epochs,
            batch_size=self.batch_size, seed=self.seed, alpha=self.learning_rate,
            beta1=self.beta1, beta2=self.beta2, epsilon=self.epsilon,
        )
        values.update(overrides)
        return mlp.TrainConfig(**values)

    def validate(self):
        self.train_config()
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.trees < 1:
            raise ConfigError("trees must be >= 1")
        if self.compare_packets is not None and self.compare_packets < 2:
            raise ConfigError("compare packets must be >= 2")
        if self.svm_c <= 0:
            raise ConfigError("svm_c must be positive")
        for name in self.sweep_activations:
            mlp.Activation.parse(name)
        for path in (*self.train, *self.test, *((self.encoding,) if self.encoding else ())):
            if not os.path.exists(path):
                raise ConfigError(f"no such file: {path}")
        return self


# (section, key) -> (RunConfig field, converter)
_SCHEMA = {
    ("data", "train"): ("train", _paths),
    ("data", "test"): ("test", _paths),
    ("data", "encoding"): ("encoding", lambda s: s.strip() or None),
    ("run", "seed"): ("seed", int),
    ("run", "folds"): ("folds", int),
    ("run", "output_dir"): ("output_dir", str),
    ("model", "hidden_layers"): ("hidden_layers", _ints),
    ("model", "activation"): ("activation", lambda s: s.strip().lower()),
    ("model", "epochs"): ("epochs", int),
    ("model", "batch_size"): ("batch_size", int),
    ("model", "learning_rate"): ("learning_rate", float),
    ("model", "beta1"): ("beta1", float),
    ("model", "beta2"): ("beta2", float),
    ("model", "epsilon"): ("epsilon", float),
    ("sweep", "packets"): ("sweep_packets", _ints),
    ("sweep", "epochs"): ("sweep_epochs", _ints),
    ("sweep", "architecture"): ("sweep_architecture", _shapes),
    ("sweep", "activations"): ("sweep_activations", _names),
    ("compare", "mlp_hidden_layers"): ("compare_hidden_layers", _ints),
    ("compare", "mlp_epochs"): ("compare_epochs", int),
    ("compare", "packets"): ("compare_packets", lambda s: int(s) if s.strip() else None),
    ("baselines", "trees"): ("trees", int),
    ("baselines", "nb_smoothing"): ("nb_smoothing", float),
    ("baselines", "svm_c"): ("svm_c", float),
    ("baselines", "svm_gamma"): ("svm_gamma", _gamma),
    ("baselines", "svm_tolerance"): ("svm_tolerance", float),
    ("baselines", "svm_max_passes"): ("svm_max_passes", int),
    ("baselines", "svm_max_train"): ("svm_max_train", int),
    ("monitor", "role"): ("role", lambda s: s.strip().lower()),
    ("monitor", "threshold"): ("threshold", float),
}

CONVERTERS = {name: conv for name, conv in _SCHEMA.values()}


def load_config(path=None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    if not os.path.exists(path):
        raise ConfigError(f"no such config file: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = os.path.dirname(os.path.abspath(path))
    updates = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if (section, key) not in _SCHEMA:
                raise ConfigError(f"{path}: unknown key [{section}] {key}")
            name, conv = _SCHEMA[(section, key)]
            try:
                value = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: [{section}] {key}: {exc}") from None
            if name in ("train", "test"):
                value = tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in value)
            elif name == "encoding" and value and not os.path.isabs(value):
                value = os.path.join(base, value)
            updates[name] = value
    return replace(cfg, **updates)


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    return replace(cfg, **{k: v for k, v in overrides.items() if k in known and v is not None})
