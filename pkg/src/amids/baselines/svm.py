"""RBF-kernel SVM trained by sequential minimal optimization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigError, ShapeError, TrainingError


def rbf_kernel(x1, x2, gamma):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape:
        raise ShapeError(f"vector lengths differ: {x1.shape} vs {x2.shape}")
    if not gamma > 0:
        raise ConfigError("gamma must be positive")
    diff = x1 - x2
    return float(np.exp(-gamma * np.dot(diff, diff)))


def rbf_kernel_matrix(A, B, gamma):
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ShapeError(f"feature counts differ: {A.shape[1]} vs {B.shape[1]}")
    d2 = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


@dataclass(frozen=True)
class SVMModel:
    support_vectors: np.ndarray
    coef: np.ndarray        # alpha_i * y_i, y in {-1, +1}
    alphas: np.ndarray
    b: float
    gamma: float
    C: float
    converged: bool
    max_kkt_violation: float
    sweeps: int


def kkt_violation(K, y_pm, alpha, b, C):
    """Largest KKT violation over the training set (0 when optimal)."""
    f = K @ (alpha * y_pm) + b
    r = y_pm * f - 1.0
    lower = np.where(alpha < C, np.maximum(-r, 0.0), 0.0)
    upper = np.where(alpha > 0, np.maximum(r, 0.0), 0.0)
    return float(np.max(np.maximum(lower, upper))) if alpha.size else 0.0


def train_svm(X, y, C=1.0, gamma=None, tolerance=1e-3, max_passes=10, seed=0, max_sweeps=10_000):
    """Fit on labels {0, 1} (mapped to {-1, +1} internally).

    ``max_passes`` consecutive full sweeps without an update end the
    search; hitting ``max_sweeps`` first returns the current iterate with
    ``converged=False``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if not C > 0:
        raise ConfigError(f"C must be positive, got {C}")
    if gamma is None:
        gamma = 1.0 / X.shape[1]
    if not gamma > 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    if max_passes < 1:
        raise ConfigError("max_passes must be >= 1")
    if X.shape[0] == 0 or np.unique(y).size < 2:
        raise TrainingError("SVM needs both classes in the training data")
    y_pm = np.where(y == 1, 1.0, -1.0)
    K = rbf_kernel_matrix(X, X, gamma)
    alpha, b, converged, sweeps = kernels.smo_solve(K, y_pm, float(C), float(tolerance), int(max_passes), int(seed), int(max_sweeps))
    alpha = np.asarray(alpha)
    violation = kkt_violation(K, y_pm, alpha, b, C)
    sv = alpha > 0
    return SVMModel(
        X[sv].copy(), alpha[sv] * y_pm[sv], alpha[sv].copy(), float(b), float(gamma),
        float(C), bool(converged), violation, int(sweeps),
    )


def decision_function(model, X, chunk=4096):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.support_vectors.shape[0] and X.shape[1] != model.support_vectors.shape[1]:
        raise ShapeError("input width does not match the support vectors")
    out = np.empty(X.shape[0])
    for s in range(0, X.shape[0], chunk):
        Kx = rbf_kernel_matrix(X[s:s + chunk], model.support_vectors, model.gamma)
        out[s:s + chunk] = Kx @ model.coef + model.b
    return out


def predict_svm_batch(model, X):
    """``(classes, signed margins)``; a zero margin counts as class 0."""
    margin = decision_function(model, X)
    return (margin > 0).astype(np.int64), margin


def predict_svm(model, x):
    cls, margin = predict_svm_batch(model, np.asarray(x, dtype=np.float64)[None, :])
    return int(cls[0]), float(margin[0])
