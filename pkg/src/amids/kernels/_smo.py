"""Platt-style SMO written in the numba-compatible subset of Python.

``build(jit)`` returns the solver compiled with ``jit`` (``numba.njit``) or
left as plain Python (identity), so both backends share one source and give
bit-identical results.
"""
import numpy as np

_LCG_MUL = 48271
_LCG_MOD = 2147483647
_ALPHA_SNAP = 1e-8
_STEP_EPS = 1e-6


def build(jit):

    @jit
    def lcg_next(state):
        return (state * _LCG_MUL) % _LCG_MOD

    @jit
    def take_step(i1, i2, K, y, alpha, f, bstate, C):
        if i1 == i2:
            return 0
        a1 = alpha[i1]
        a2 = alpha[i2]
        y1 = y[i1]
        y2 = y[i2]
        E1 = f[i1] - y1
        E2 = f[i2] - y2
        s = y1 * y2
        if y1 != y2:
            L = max(0.0, a2 - a1)
            H = min(C, C + a2 - a1)
        else:
            L = max(0.0, a1 + a2 - C)
            H = min(C, a1 + a2)
        if H - L < 1e-12:
            return 0
        k11 = K[i1, i1]
        k12 = K[i1, i2]
        k22 = K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        b = bstate[0]
        if eta > 0.0:
            a2n = a2 + y2 * (E1 - E2) / eta
            if a2n < L:
                a2n = L
            elif a2n > H:
                a2n = H
        else:
            # degenerate curvature: pick the better end of the segment
            g1 = y1 * (E1 - b) - a1 * k11 - s * a2 * k12
            g2 = y2 * (E2 - b) - s * a1 * k12 - a2 * k22
            L1 = a1 + s * (a2 - L)
            H1 = a1 + s * (a2 - H)
            lobj = L1 * g1 + L * g2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12
            hobj = H1 * g1 + H * g2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12
            if lobj < hobj - _STEP_EPS:
                a2n = L
            elif lobj > hobj + _STEP_EPS:
                a2n = H
            else:
                a2n = a2
        if a2n < _ALPHA_SNAP:
            a2n = 0.0
        elif a2n > C - _ALPHA_SNAP:
            a2n = C
        if abs(a2n - a2) < _STEP_EPS * (a2n + a2 + _STEP_EPS):
            return 0
        a1n = a1 + s * (a2 - a2n)
        if a1n < _ALPHA_SNAP:
            a1n = 0.0
        elif a1n > C - _ALPHA_SNAP:
            a1n = C
        d1 = y1 * (a1n - a1)
        d2 = y2 * (a2n - a2)
        b1 = b - E1 - d1 * k11 - d2 * k12
        b2 = b - E2 - d1 * k12 - d2 * k22
        if 0.0 < a1n < C:
            bn = b1
        elif 0.0 < a2n < C:
            bn = b2
        else:
            bn = 0.5 * (b1 + b2)
        db = bn - b
        n = f.shape[0]
        for k in range(n):
            f[k] += d1 * K[i1, k] + d2 * K[i2, k] + db
        alpha[i1] = a1n
        alpha[i2] = a2n
        bstate[0] = bn
        return 1

    @jit
    def examine(i2, K, y, alpha, f, bstate, C, tol, rng):
        y2 = y[i2]
        a2 = alpha[i2]
        E2 = f[i2] - y2
        r2 = E2 * y2
        if not ((r2 < -tol and a2 < C) or (r2 > tol and a2 > 0.0)):
            return 0
        n = y.shape[0]
        nonbound = (alpha > 0.0) & (alpha < C)
        if nonbound.sum() > 1:
            gap = np.where(nonbound, np.abs((f - y) - E2), -1.0)
            i1 = int(np.argmax(gap))
            if take_step(i1, i2, K, y, alpha, f, bstate, C):
                return 1
        rng[0] = lcg_next(rng[0])
        start = rng[0] % n
        for k in range(n):
            i1 = (start + k) % n
            if nonbound[i1]:
                if take_step(i1, i2, K, y, alpha, f, bstate, C):
                    return 1
        rng[0] = lcg_next(rng[0])
        start = rng[0] % n
        for k in range(n):
            i1 = (start + k) % n
            if take_step(i1, i2, K, y, alpha, f, bstate, C):
                return 1
        return 0

    @jit
    def smo_solve(K, y, C, tol, max_passes, seed, max_sweeps):
        """Return (alpha, b, converged, sweeps) for the dual of an L1 soft-margin SVM."""
        n = y.shape[0]
        alpha = np.zeros(n)
        f = np.zeros(n)
        bstate = np.zeros(1)
        rng = np.zeros(1, dtype=np.int64)
        rng[0] = seed % (_LCG_MOD - 1) + 1
        examine_all = True
        quiet_passes = 0
        sweeps = 0
        converged = False
        while sweeps < max_sweeps:
            sweeps += 1
            changed = 0
            if examine_all:
                for i in range(n):
                    changed += examine(i, K, y, alpha, f, bstate, C, tol, rng)
            else:
                for i in range(n):
                    if alpha[i] > 0.0 and alpha[i] < C:
                        changed += examine(i, K, y, alpha, f, bstate, C, tol, rng)
            if examine_all:
                if changed == 0:
                    quiet_passes += 1
                    if quiet_passes >= max_passes:
                        converged = True
                        break
                else:
                    quiet_passes = 0
                    examine_all = False
            elif changed == 0:
                examine_all = True
        return alpha, bstate[0], converged, sweeps

    return smo_solve
