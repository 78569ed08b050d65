"""numba kernels. Same contracts as ``_numpy``."""
import numba
import numpy as np

from . import _smo


@numba.njit(cache=True)
def best_split(XT, y, idx, feature_order, max_features):
    n = idx.shape[0]
    best_f = -1
    best_t = 0.0
    best_score = np.inf
    if n < 2:
        return best_f, best_t, best_score
    ys = np.empty(n, dtype=np.int64)
    total1 = 0
    for i in range(n):
        ys[i] = y[idx[i]]
        total1 += ys[i]
    vals = np.empty(n)
    counted = 0
    for f in feature_order:
        for i in range(n):
            vals[i] = XT[f, idx[i]]
        order = np.argsort(vals)
        if vals[order[0]] == vals[order[n - 1]]:
            continue
        counted += 1
        l1 = 0
        for p in range(n - 1):
            l1 += ys[order[p]]
            lo = vals[order[p]]
            hi = vals[order[p + 1]]
            if not lo < hi:
                continue
            nl = float(p + 1)
            nr = n - nl
            fl1 = float(l1)
            p0 = (nl - fl1) / nl
            p1 = fl1 / nl
            gl = 1.0 - p0 * p0 - p1 * p1
            r1 = float(total1 - l1)
            q0 = (nr - r1) / nr
            q1 = r1 / nr
            gr = 1.0 - q0 * q0 - q1 * q1
            score = (nl * gl + nr * gr) / n
            if score < best_score:
                best_score = score
                best_f = f
                t = 0.5 * (lo + hi)
                if t >= hi:
                    t = lo
                best_t = t
        if counted == max_features:
            break
    return best_f, best_t, best_score


@numba.njit(cache=True)
def tree_apply(X, feature, threshold, left, right):
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while left[node] != -1:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


@numba.njit(cache=True)
def adam_update(p, g, m, v, alpha, beta1, beta2, c1, c2, epsilon):
    # one fused pass; operation order matches the numpy version exactly
    for i in range(p.shape[0]):
        mi = beta1 * m[i] + (1.0 - beta1) * g[i]
        vi = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i])
        m[i] = mi
        v[i] = vi
        p[i] -= (mi / c1) * alpha / (np.sqrt(vi / c2) + epsilon)


@numba.njit(cache=True)
def dense_affine(A, WT, b):
    n, d = A.shape
    h = WT.shape[1]
    out = np.empty((n, h))
    for i in range(n):
        for k in range(h):
            out[i, k] = 0.0
        for j in range(d):
            a = A[i, j]
            for k in range(h):
                out[i, k] += a * WT[j, k]
        for k in range(h):
            out[i, k] += b[k]
    return out


# closures cannot use the on-disk cache; compiled lazily on first call
smo_solve = _smo.build(numba.njit)
