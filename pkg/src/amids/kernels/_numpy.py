"""Pure-numpy kernels. Same contracts as the numba versions."""
import numpy as np

from . import _smo


def best_split(XT, y, idx, feature_order, max_features):
    """Gini-optimal ``x[f] <= t`` split over the first ``max_features``
    non-constant features of ``feature_order``.

    ``XT`` is the feature-major (transposed) design matrix.

    Returns ``(feature, threshold, score)``; feature is -1 when no feature
    separates the samples.  Ties keep the earliest candidate.
    """
    n = idx.shape[0]
    best_f, best_t, best_score = -1, 0.0, np.inf
    if n < 2:
        return best_f, best_t, best_score
    ys = y[idx]
    counted = 0
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    for f in feature_order:
        vals = XT[f, idx]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        if sv[0] == sv[n - 1]:
            continue
        counted += 1
        l1 = np.cumsum(ys[order])[:-1].astype(np.float64)
        l0 = nl - l1
        r1 = ys.sum() - l1
        r0 = nr - r1
        p0 = l0 / nl
        p1 = l1 / nl
        gl = 1.0 - p0 * p0 - p1 * p1
        q0 = r0 / nr
        q1 = r1 / nr
        gr = 1.0 - q0 * q0 - q1 * q1
        score = (nl * gl + nr * gr) / n
        valid = sv[:-1] < sv[1:]
        score = np.where(valid, score, np.inf)
        p = int(np.argmin(score))
        if score[p] < best_score:
            best_score = score[p]
            best_f = int(f)
            t = 0.5 * (sv[p] + sv[p + 1])
            if t >= sv[p + 1]:
                t = sv[p]
            best_t = float(t)
        if counted == max_features:
            break
    return best_f, best_t, float(best_score)


def tree_apply(X, feature, threshold, left, right):
    """Leaf index reached by every row of ``X``."""
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = left[node] != -1
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active[r] = left[node[r]] != -1
    return node


def adam_update(p, g, m, v, alpha, beta1, beta2, c1, c2, epsilon):
    """In-place bias-corrected Adam update of flat arrays ``p``, ``m``, ``v``."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    num = m / c1
    num *= alpha
    den = v / c2
    np.sqrt(den, out=den)
    den += epsilon
    num /= den
    p -= num


def dense_affine(A, WT, b):
    # einsum reduces each output independently, so a row's result does not
    # depend on which other rows share the batch (BLAS gemm does not promise this)
    return np.einsum("ij,jk->ik", A, WT, optimize=False) + b


smo_solve = _smo.build(lambda fn: fn)
