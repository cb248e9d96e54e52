"""Pure-numpy implementations of the numeric kernels.

This is the fallback backend (select with VOLBREAK_BACKEND=numpy). The
numba backend in ``_impl_numba`` implements the same functions with the
same signatures; both must agree up to floating-point summation order.
"""

import numpy as np

NAME = "numpy"

MEAN_ZERO, MEAN_LINEAR = 0, 1
VOL_CONST, VOL_EXP, VOL_ARCH = 0, 1, 2
COV_AR1, COV_LAG1 = 0, 1


def _epan(u):
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _weight_matrix(x, q, h):
    # (nq, n) product-Epanechnikov weights
    nq, n = q.shape[0], x.shape[0]
    w = np.ones((nq, n))
    for k in range(x.shape[1]):
        w *= _epan((q[:, k][:, None] - x[None, :, k]) / h)
    return w


def nw_smooth_at_points(x, v, h, q):
    """Kernel-weighted average of v at query points q. Returns (values, weight sums)."""
    w = _weight_matrix(x, q, h)
    sw = w.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sm = np.where(sw > 0.0, (w @ v) / sw, np.nan)
    return sm, sw


def nw_smooth_at_sample(x, v, h):
    return nw_smooth_at_points(x, v, h, x)


def var_local_at_points(x, y, h, q, mq):
    """Weighted average of (y_j - mq_i)^2 at query points q, given fitted means mq."""
    w = _weight_matrix(x, q, h)
    sw = w.sum(axis=1)
    dev2 = (y[None, :] - mq[:, None]) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(sw > 0.0, (w * dev2).sum(axis=1) / sw, np.nan)
    return v


def var_local_at_sample(x, y, h, mhat):
    return var_local_at_points(x, y, h, x, mhat)


def grid_values(marks, x, z):
    """Cumulative marked sums over time x space: out[k, j] = sum_{t<k} marks[t] 1{x_t <= z_j} / sqrt(n)."""
    n = marks.shape[0]
    ind = (x[:, None, :] <= z[None, :, :]).all(axis=2)
    rows = np.cumsum(marks[:, None] * ind, axis=0) / np.sqrt(n)
    out = np.empty((n + 1, z.shape[0]))
    out[0] = 0.0
    out[1:] = rows
    return out


def charn_path(n, burn_in, break_index, mean_kind, mean_a,
               pre_kind, pre_p0, pre_p1, post_kind, post_p0, post_p1,
               cov_kind, cov_phi, xi, eps):
    """Run the scalar CHARN recursion. Returns (x, y, sigma, bad_index).

    bad_index is -1 on success, else the observed-step index (0-based) of the
    first non-finite value.
    """
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


def sheet_stats(zn):
    """Reduce one Brownian-sheet replication (zn: (m, m) standard normals).

    Returns (sup over the whole lattice of |K|, sup over t-columns of the
    s-mean of K^2, sup of |K| restricted to the t=1 column), where
    K(s, t) = B(s, t) - s B(1, t) on the lattice {i/m} x {j/m}.
    """
    m = zn.shape[0]
    B = np.cumsum(np.cumsum(zn, axis=0), axis=1) / m
    s = np.arange(1, m + 1)[:, None] / m
    K = B - s * B[-1, :][None, :]
    absK = np.abs(K)
    sup = absK.max()
    cvm = (K * K).mean(axis=0).max()
    sup_t1 = absK[:, -1].max()
    return sup, cvm, sup_t1


def sheet_values_at(zn, idx_s, idx_t):
    """K values of one sheet replication at lattice indices (1-based i/m positions)."""
    m = zn.shape[0]
    B = np.cumsum(np.cumsum(zn, axis=0), axis=1) / m
    out = np.empty(idx_s.shape[0])
    for p in range(idx_s.shape[0]):
        i, j = idx_s[p], idx_t[p]
        out[p] = B[i - 1, j - 1] - (i / m) * B[m - 1, j - 1]
    return out


def bridge_lattice_stats(zn):
    """Plain lattice reductions of one bridge replication: (sup |B0|, mean B0^2)."""
    m = zn.shape[0]
    W = np.cumsum(zn) / np.sqrt(m)
    t = np.arange(1, m + 1) / m
    B = W - t * W[-1]
    return np.abs(B).max(), (B * B).mean()


def bridge_sup_reflected(zn, u1, u2):
    """Continuum sup |B0| for one bridge replication.

    The lattice path is refined with exact conditional interval extrema:
    given endpoint values a, b of a Brownian bridge on an interval of length
    delta, its maximum is (a + b + sqrt((b-a)^2 - 2 delta log U)) / 2 by the
    reflection principle (minimum analogously). Sampling interval maxima and
    minima with independent uniforms is exact up to the negligible event that
    both extremes of the global path fall in one refinement cell.
    """
    m = zn.shape[0]
    W = np.cumsum(zn) / np.sqrt(m)
    t = np.arange(1, m + 1) / m
    B = W - t * W[-1]
    a = np.empty(m)
    a[0] = 0.0
    a[1:] = B[:-1]
    delta = 1.0 / m
    d2 = (B - a) ** 2
    hi = 0.5 * (a + B + np.sqrt(d2 - 2.0 * delta * np.log(u1)))
    lo = 0.5 * (a + B - np.sqrt(d2 - 2.0 * delta * np.log(u2)))
    return max(hi.max(), -lo.min())
