from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError, TrainingError


@dataclass(frozen=True)
class GaussianNBModel:
    priors: np.ndarray      # (2,)
    means: np.ndarray       # (2, d)
    variances: np.ndarray   # (2, d), already smoothed
    smoothing: float


def train_nb(X, y, var_smoothing=1e-9):
    """Per-class Gaussian likelihoods.

    Every variance gets ``var_smoothing * max feature variance`` added so
    constant features stay finite.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise TrainingError("no training records")
    counts = np.bincount(y, minlength=2)
    if counts.size != 2 or np.any(counts == 0):
        raise TrainingError("naive Bayes needs both classes in the training data")
    epsilon = var_smoothing * float(np.var(X, axis=0).max())
    if epsilon <= 0:
        epsilon = var_smoothing
    means = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.stack([X[y == c].var(axis=0) for c in (0, 1)]) + epsilon
    return GaussianNBModel(counts / counts.sum(), means, variances, epsilon)


def joint_log_likelihood(model, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.means.shape[1]:
        raise ShapeError(f"input has {X.shape[1]} features, model expects {model.means.shape[1]}")
    out = np.empty((X.shape[0], 2))
    for c in (0, 1):
        var = model.variances[c]
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * var)) - 0.5 * np.sum((X - model.means[c]) ** 2 / var, axis=1)
        out[:, c] = np.log(model.priors[c]) + ll
    return out


def posterior(model, X):
    jll = joint_log_likelihood(model, X)
    jll -= jll.max(axis=1, keepdims=True)
    p = np.exp(jll)
    return p / p.sum(axis=1, keepdims=True)


def predict_nb_batch(model, X):
    """``(classes, posterior of the chosen class)``; ties go to class 0."""
    jll = joint_log_likelihood(model, X)
    cls = (jll[:, 1] > jll[:, 0]).astype(np.int64)
    p = posterior(model, X)
    return cls, p[np.arange(p.shape[0]), cls]


def predict_nb(model, x):
    cls, conf = predict_nb_batch(model, np.asarray(x, dtype=np.float64)[None, :])
    return int(cls[0]), float(conf[0])
