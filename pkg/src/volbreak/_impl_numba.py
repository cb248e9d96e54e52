"""Numba-compiled implementations of the numeric kernels.

Default backend when numba is importable; see ``backend``. Signatures and
semantics mirror ``_impl_numpy`` exactly.
"""

import numpy as np
from numba import njit

NAME = "numba"

MEAN_ZERO, MEAN_LINEAR = 0, 1
VOL_CONST, VOL_EXP, VOL_ARCH = 0, 1, 2
COV_AR1, COV_LAG1 = 0, 1

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _row_weights(x, q, h, i, w):
    # fills w[j] = prod_k Epanechnikov((q[i,k]-x[j,k])/h); returns the sum
    n, d = x.shape
    s = 0.0
    for j in range(n):
        wj = 1.0
        for k in range(d):
            u = (q[i, k] - x[j, k]) / h
            if u < -1.0 or u > 1.0:
                wj = 0.0
                break
            wj *= 0.75 * (1.0 - u * u)
        w[j] = wj
        s += wj
    return s


@njit(**_JIT)
def nw_smooth_at_points(x, v, h, q):
    nq = q.shape[0]
    n = x.shape[0]
    sm = np.empty(nq)
    sw = np.empty(nq)
    w = np.empty(n)
    for i in range(nq):
        s = _row_weights(x, q, h, i, w)
        sw[i] = s
        if s > 0.0:
            acc = 0.0
            for j in range(n):
                if w[j] > 0.0:
                    acc += w[j] * v[j]
            sm[i] = acc / s
        else:
            sm[i] = np.nan
    return sm, sw


def nw_smooth_at_sample(x, v, h):
    return nw_smooth_at_points(x, v, h, x)


@njit(**_JIT)
def var_local_at_points(x, y, h, q, mq):
    nq = q.shape[0]
    n = x.shape[0]
    out = np.empty(nq)
    w = np.empty(n)
    for i in range(nq):
        s = _row_weights(x, q, h, i, w)
        if s > 0.0:
            acc = 0.0
            for j in range(n):
                if w[j] > 0.0:
                    dev = y[j] - mq[i]
                    acc += w[j] * dev * dev
            out[i] = acc / s
        else:
            out[i] = np.nan
    return out


def var_local_at_sample(x, y, h, mhat):
    return var_local_at_points(x, y, h, x, mhat)


@njit(**_JIT)
def grid_values(marks, x, z):
    n = marks.shape[0]
    nz = z.shape[0]
    d = x.shape[1]
    inv = 1.0 / np.sqrt(n)
    out = np.empty((n + 1, nz))
    for j in range(nz):
        out[0, j] = 0.0
        acc = 0.0
        for t in range(n):
            inside = True
            for k in range(d):
                if x[t, k] > z[j, k]:
                    inside = False
                    break
            if inside:
                acc += marks[t]
            out[t + 1, j] = acc * inv
    return out


@njit(**_JIT)
def charn_path(n, burn_in, break_index, mean_kind, mean_a,
               pre_kind, pre_p0, pre_p1, post_kind, post_p0, post_p1,
               cov_kind, cov_phi, xi, eps):
    xs = np.empty(n)
    ys = np.empty(n)
    sig = np.empty(n)
    total = burn_in + n
    x = 0.0
    y = 0.0
    for t in range(total):
        if cov_kind == COV_AR1:
            x = cov_phi * x + xi[t]
        else:
            x = y
        tobs = t - burn_in + 1
        if tobs >= 1:
            pre = tobs <= break_index
        else:
            pre = break_index >= 1
        if pre:
            kind, p0, p1 = pre_kind, pre_p0, pre_p1
        else:
            kind, p0, p1 = post_kind, post_p0, post_p1
        if kind == VOL_CONST:
            s = p0
        elif kind == VOL_EXP:
            s = p0 * np.exp(p1 * x)
        else:
            s = np.sqrt(p0 + p1 * x * x)
        m = mean_a * x if mean_kind == MEAN_LINEAR else 0.0
        y = m + s * eps[t]
        if tobs >= 1:
            if not (np.isfinite(x) and np.isfinite(y)):
                return xs, ys, sig, tobs - 1
            xs[tobs - 1] = x
            ys[tobs - 1] = y
            sig[tobs - 1] = s
    return xs, ys, sig, -1


@njit(**_JIT)
def sheet_stats(zn):
    m = zn.shape[0]
    B = np.empty((m, m))
    for j in range(m):
        B[0, j] = zn[0, j]
    for i in range(1, m):
        for j in range(m):
            B[i, j] = B[i - 1, j] + zn[i, j]
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += B[i, j]
            B[i, j] = acc / m
    sup = 0.0
    cvm = 0.0
    sup_t1 = 0.0
    for j in range(m):
        bm = B[m - 1, j]
        acc = 0.0
        for i in range(m):
            v = B[i, j] - ((i + 1) / m) * bm
            av = abs(v)
            if av > sup:
                sup = av
            if j == m - 1 and av > sup_t1:
                sup_t1 = av
            acc += v * v
        col = acc / m
        if col > cvm:
            cvm = col
    return sup, cvm, sup_t1


@njit(**_JIT)
def sheet_values_at(zn, idx_s, idx_t):
    m = zn.shape[0]
    B = np.empty((m, m))
    for j in range(m):
        B[0, j] = zn[0, j]
    for i in range(1, m):
        for j in range(m):
            B[i, j] = B[i - 1, j] + zn[i, j]
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += B[i, j]
            B[i, j] = acc / m
    out = np.empty(idx_s.shape[0])
    for p in range(idx_s.shape[0]):
        i = idx_s[p]
        j = idx_t[p]
        out[p] = B[i - 1, j - 1] - (i / m) * B[m - 1, j - 1]
    return out


@njit(**_JIT)
def bridge_lattice_stats(zn):
    m = zn.shape[0]
    rm = np.sqrt(m)
    acc = 0.0
    wm = 0.0
    for i in range(m):
        wm += zn[i]
    wm /= rm
    sup = 0.0
    cvm = 0.0
    for i in range(m):
        acc += zn[i]
        b = acc / rm - ((i + 1) / m) * wm
        ab = abs(b)
        if ab > sup:
            sup = ab
        cvm += b * b
    return sup, cvm / m


@njit(**_JIT)
def bridge_sup_reflected(zn, u1, u2):
    m = zn.shape[0]
    rm = np.sqrt(m)
    wm = 0.0
    for i in range(m):
        wm += zn[i]
    wm /= rm
    delta = 1.0 / m
    acc = 0.0
    a = 0.0
    sup = 0.0
    for i in range(m):
        acc += zn[i]
        b = acc / rm - ((i + 1) / m) * wm
        d2 = (b - a) * (b - a)
        hi = 0.5 * (a + b + np.sqrt(d2 - 2.0 * delta * np.log(u1[i])))
        lo = 0.5 * (a + b - np.sqrt(d2 - 2.0 * delta * np.log(u2[i])))
        if hi > sup:
            sup = hi
        if -lo > sup:
            sup = -lo
        a = b
    return sup
