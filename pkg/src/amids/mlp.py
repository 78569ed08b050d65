"""Dense feedforward classifier with a two-way softmax head, trained by Adam.

Hidden layers share one activation (sigmoid, relu or tanh).  Training runs
on BLAS matmuls; inference (``predict_proba`` and friends) goes through
``kernels.dense_affine`` so a record's output does not depend on the batch
it was scored in.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import kernels
from .errors import ConfigError, EmptyDatasetError, ShapeError, TrainingError

N_CLASSES = 2
CLIP_EPS = 1e-12


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    RELU = "relu"
    TANH = "tanh"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(a.value for a in cls)
            raise ConfigError(f"unknown activation {name!r} (choose from {choices})") from None


def _sigmoid(z):
    # exp(-|z|) never overflows; the two branches are 1/(1+e) and e/(1+e)
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    r = 1.0 / (1.0 + e)
    return np.where(z >= 0, r, e * r)


def activation_apply(kind, z):
    kind = Activation.parse(kind)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.float64)
    if kind is Activation.SIGMOID:
        out = _sigmoid(z)
    elif kind is Activation.RELU:
        out = np.maximum(z, 0.0)
    else:
        out = np.tanh(z)
    return float(out) if scalar else out


def activation_derivative(kind, z):
    """Derivative w.r.t. the pre-activation; relu'(0) is taken as 0."""
    kind = Activation.parse(kind)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=np.float64)
    if kind is Activation.SIGMOID:
        s = _sigmoid(z)
        out = s * (1.0 - s)
    elif kind is Activation.RELU:
        out = (z > 0).astype(np.float64)
    else:
        t = np.tanh(z)
        out = 1.0 - t * t
    return float(out) if scalar else out


def _derivative_from_output(kind, a):
    """Same values as ``activation_derivative`` but from the activation output."""
    if kind is Activation.SIGMOID:
        return a * (1.0 - a)
    if kind is Activation.RELU:
        return (a > 0).astype(np.float64)
    return 1.0 - a * a


def softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise ShapeError("softmax of an empty vector")
    with np.errstate(over="ignore"):
        # a gap beyond the float range gives -inf, and exp(-inf) = 0 is right
        shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(y, y_hat, clip=CLIP_EPS):
    """Binary cross-entropy of the class-1 probability; elementwise."""
    p = np.clip(np.asarray(y_hat, dtype=np.float64), clip, 1.0 - clip)
    y = np.asarray(y, dtype=np.float64)
    loss = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(loss) if loss.ndim == 0 else loss


@dataclass
class MLPModel:
    layer_sizes: tuple
    weights: list
    biases: list
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        self.activation = Activation.parse(self.activation)
        self.validate()

    def validate(self):
        sizes = self.layer_sizes
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ShapeError(f"invalid layer sizes {sizes}")
        if sizes[-1] != N_CLASSES:
            raise ShapeError(f"output layer must have {N_CLASSES} units, got {sizes[-1]}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ShapeError("need one weight matrix and bias vector per layer")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (sizes[l + 1], sizes[l]):
                raise ShapeError(f"weights[{l}] has shape {W.shape}, expected {(sizes[l + 1], sizes[l])}")
            if b.shape != (sizes[l + 1],):
                raise ShapeError(f"biases[{l}] has shape {b.shape}, expected {(sizes[l + 1],)}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ShapeError(f"layer {l} has non-finite parameters")

    @property
    def n_inputs(self):
        return self.layer_sizes[0]

    def params(self):
        """Flat parameter list ``[W0, b0, W1, b1, ...]`` (views, not copies)."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend((W, b))
        return out

    def with_params(self, params):
        return MLPModel(self.layer_sizes, list(params[0::2]), list(params[1::2]), self.activation)


def init_model(layer_sizes, activation=Activation.SIGMOID, seed=0, rng=None):
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed) if rng is None else rng
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MLPModel(tuple(layer_sizes), weights, biases, activation)


@dataclass
class ForwardCache:
    inputs: np.ndarray
    pre: list          # pre-activation of every layer
    post: list         # activation of every layer (softmax for the last)
    single: bool


def _check_input(model, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise ShapeError(f"input has {X.shape[-1]} features, model expects {model.n_inputs}")
    return X, single


def forward(model: MLPModel, x):
    """Probabilities of both classes plus the cache for ``backward``.

    ``x`` may be a single vector or a batch; the probability array has
    the matching rank.
    """
    X, single = _check_input(model, x)
    pre, post = [], []
    a = X
    last = len(model.weights) - 1
    for l, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W.T + b
        a = softmax(z) if l == last else activation_apply(model.activation, z)
        pre.append(z)
        post.append(a)
    probs = a[0] if single else a
    return probs, ForwardCache(X, pre, post, single)


def backward(model: MLPModel, cache: ForwardCache, y):
    """Gradients of the mean cross-entropy, as ``[dW0, db0, dW1, db1, ...]``."""
    y = np.atleast_1d(np.asarray(y, dtype=np.int64))
    n = cache.inputs.shape[0]
    if y.shape[0] != n or len(cache.pre) != len(model.weights):
        raise ShapeError("cache does not match labels or model")
    for l, z in enumerate(cache.pre):
        if z.shape != (n, model.layer_sizes[l + 1]):
            raise ShapeError("stale cache: layer shapes do not match the model")
    onehot = np.zeros((n, N_CLASSES))
    onehot[np.arange(n), y] = 1.0
    delta = (cache.post[-1] - onehot) / n
    grads = [None] * (2 * len(model.weights))
    for l in range(len(model.weights) - 1, -1, -1):
        a_prev = cache.inputs if l == 0 else cache.post[l - 1]
        grads[2 * l] = delta.T @ a_prev
        grads[2 * l + 1] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l]) * _derivative_from_output(model.activation, cache.post[l - 1])
    return grads


def loss_of(model, X, y):
    probs, _ = forward(model, X)
    return float(np.mean(cross_entropy(y, np.atleast_2d(probs)[:, 1])))


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.alpha > 0 or not self.epsilon > 0:
            raise ConfigError("adam alpha and epsilon must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("adam betas must lie in [0, 1)")
        if self.t < 0:
            raise ConfigError("adam step counter must be >= 0")


def adam_init(params, alpha=0.001, beta1=0.9, beta2=0.999, epsilon=1e-8):
    return AdamState(
        [np.zeros_like(p) for p in params],
        [np.zeros_like(p) for p in params],
        0, alpha, beta1, beta2, epsilon,
    )


def adam_step(state: AdamState, params, grads):
    """One bias-corrected Adam update; returns ``(new_params, new_state)``."""
    if not (len(params) == len(grads) == len(state.m) == len(state.v)):
        raise ShapeError("parameter, gradient and moment lists differ in length")
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        g = np.asarray(g, dtype=np.float64)
        if not (p.shape == g.shape == m.shape == v.shape):
            raise ShapeError(f"shape mismatch: param {p.shape}, grad {g.shape}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        new_params.append(p - state.alpha * (m / c1) / (np.sqrt(v / c2) + state.epsilon))
        new_m.append(m)
        new_v.append(v)
    return new_params, replace(state, m=new_m, v=new_v, t=t)


def _adam_step_inplace(state: AdamState, params, grads):
    """``adam_step`` without the copies: updates params and moments in place.

    The kernel orders its arithmetic exactly as ``adam_step`` does, so both
    give bit-identical parameters.
    """
    state.t += 1
    c1 = 1.0 - state.beta1 ** state.t
    c2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        kernels.adam_update(
            p.reshape(-1), np.ascontiguousarray(g).reshape(-1), m.reshape(-1), v.reshape(-1),
            state.alpha, state.beta1, state.beta2, c1, c2, state.epsilon,
        )


@dataclass(frozen=True)
class TrainConfig:
    hidden_layers: tuple = (300, 300)
    activation: Activation = Activation.SIGMOID
    epochs: int = 3
    batch_size: int = 128
    seed: int = 0
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        object.__setattr__(self, "activation", Activation.parse(self.activation))
        self.validate()

    def validate(self):
        if int(self.epochs) < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if int(self.batch_size) < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if len(self.hidden_layers) < 1 or any(h < 1 for h in self.hidden_layers):
            raise ConfigError(f"need at least one hidden layer of >= 1 node, got {self.hidden_layers}")
        # delegate the hyperparameter range checks
        AdamState([], [], 0, self.alpha, self.beta1, self.beta2, self.epsilon)

    def layer_sizes(self, n_inputs):
        return (n_inputs, *self.hidden_layers, N_CLASSES)


@dataclass(frozen=True)
class EpochTrace:
    epoch: int
    loss: float
    accuracy: float


def train(X, y, config: TrainConfig):
    """Mini-batch Adam on mean cross-entropy.

    One generator seeded with ``config.seed`` draws the initial weights and
    then one permutation per epoch, so a run is reproducible bit for bit.
    Returns ``(model, traces)``; each trace holds the sample-weighted mean
    of the batch losses and accuracies seen during that epoch.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDatasetError("no training records")
    if y.shape != (X.shape[0],):
        raise ShapeError("labels and records differ in count")
    config.validate()
    rng = np.random.default_rng(config.seed)
    model = init_model(config.layer_sizes(X.shape[1]), config.activation, rng=rng)
    params = model.params()
    state = adam_init(params, config.alpha, config.beta1, config.beta2, config.epsilon)
    n = X.shape[0]
    bs = min(config.batch_size, n)
    traces = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, bs):
            batch = order[start:start + bs]
            xb, yb = X[batch], y[batch]
            probs, cache = forward(model, xb)
            loss_sum += float(np.sum(cross_entropy(yb, probs[:, 1])))
            correct += int(np.sum((probs[:, 1] > probs[:, 0]).astype(np.int64) == yb))
            # params are views of the model's arrays, updated in place
            _adam_step_inplace(state, params, backward(model, cache, yb))
        traces.append(EpochTrace(epoch, loss_sum / n, correct / n))
    if not all(np.all(np.isfinite(p)) for p in params):
        raise TrainingError("training diverged: non-finite parameters")
    return model, traces


def predict_proba(model: MLPModel, X):
    """Class probabilities, row-independent of batch composition."""
    A, single = _check_input(model, X)
    last = len(model.weights) - 1
    for l, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = kernels.dense_affine(np.ascontiguousarray(A), np.ascontiguousarray(W.T), b)
        A = softmax(z) if l == last else activation_apply(model.activation, z)
    return A[0] if single else A


def decide(probs):
    """Argmax with ties to class 0; returns ``(classes, confidences)``."""
    probs = np.atleast_2d(probs)
    cls = (probs[:, 1] > probs[:, 0]).astype(np.int64)
    return cls, probs[np.arange(probs.shape[0]), cls]


def predict_batch(model: MLPModel, X):
    cls, conf = decide(predict_proba(model, X))
    return cls, conf


def predict(model: MLPModel, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("predict takes one feature vector; use predict_batch for many")
    cls, conf = decide(predict_proba(model, x))
    return int(cls[0]), float(conf[0])
