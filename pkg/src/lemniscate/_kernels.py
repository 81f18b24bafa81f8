"""Compiled inner loops.

Every parallel loop writes one output element per iteration and sums in a
fixed order, so results are bit-identical for any thread count.
"""

import numba
import numpy as np

# the bundled TBB is often too old; fall back quietly
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_BLOCK = 8


@numba.njit(cache=True, inline="always")
def _log_abs_prod(zr, zi, rr, ri, start, stop):
    # sum_k log|z - r_k| via blocks of squared distances; falls back to
    # per-term logs when a block under/overflows
    acc = 0.0
    k = start
    while k < stop:
        e = min(k + _BLOCK, stop)
        prod = 1.0
        for j in range(k, e):
            dx = zr - rr[j]
            dy = zi - ri[j]
            prod *= dx * dx + dy * dy
        if prod > 1e-290 and prod < 1e290:
            acc += 0.5 * np.log(prod)
        else:
            for j in range(k, e):
                dx = zr - rr[j]
                dy = zi - ri[j]
                acc += 0.5 * np.log(dx * dx + dy * dy)
        k = e
    return acc


@numba.njit(parallel=True, cache=True)
def log_abs_many(zr, zi, rr, ri):
    out = np.empty(zr.shape[0])
    n = rr.shape[0]
    for i in numba.prange(zr.shape[0]):
        out[i] = _log_abs_prod(zr[i], zi[i], rr, ri, 0, n)
    return out


@numba.njit(parallel=True, cache=True)
def log_abs_grid(x, y, rr, ri, out):
    """out[j, i] = sum_k log|x_i + i*y_j - r_k|."""
    n = rr.shape[0]
    for j in numba.prange(y.shape[0]):
        yj = y[j]
        for i in range(x.shape[0]):
            out[j, i] = _log_abs_prod(x[i], yj, rr, ri, 0, n)


@numba.njit(parallel=True, cache=True)
def log_abs_lower_bound_grid(x, y, rho, rr, ri, out):
    """Lower bound of sum_k log|z - r_k| over squares of half-diagonal rho."""
    n = rr.shape[0]
    for j in numba.prange(y.shape[0]):
        yj = y[j]
        for i in range(x.shape[0]):
            acc = 0.0
            for k in range(n):
                dx = x[i] - rr[k]
                dy = yj - ri[k]
                dist = np.sqrt(dx * dx + dy * dy) - rho
                if dist <= 0.0:
                    acc = -np.inf
                    break
                acc += np.log(dist)
            out[j, i] = acc


@numba.njit(parallel=True, cache=True)
def _add_log_dist(cr, ci, zr, zi, scores, used):
    for j in numba.prange(cr.shape[0]):
        if not used[j]:
            dx = cr[j] - zr
            dy = ci[j] - zi
            scores[j] += 0.5 * np.log(dx * dx + dy * dy)


@numba.njit(cache=True)
def leja_indices(cr, ci, n):
    """Greedy Leja order over candidates; ties go to the smallest index."""
    m = cr.shape[0]
    scores = np.zeros(m)
    used = np.zeros(m, dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    first = 0
    best = -1.0
    for j in range(m):
        mod = np.hypot(cr[j], ci[j])
        if mod > best:
            best = mod
            first = j
    out[0] = first
    used[first] = True
    for k in range(1, n):
        _add_log_dist(cr, ci, cr[out[k - 1]], ci[out[k - 1]], scores, used)
        pick = -1
        top = -np.inf
        for j in range(m):
            if not used[j] and (pick < 0 or scores[j] > top):
                top = scores[j]
                pick = j
        out[k] = pick
        used[pick] = True
    return out


@numba.njit(cache=True)
def pair_log_sum(zr, zi):
    """sum_{i<j} log|z_i - z_j| and the smallest pair distance."""
    n = zr.shape[0]
    acc = 0.0
    dmin = np.inf
    for i in range(n):
        row = 0.0
        for j in range(i + 1, n):
            dx = zr[i] - zr[j]
            dy = zi[i] - zi[j]
            d2 = dx * dx + dy * dy
            if d2 < dmin:
                dmin = d2
            row += 0.5 * np.log(d2)
        acc += row
    return acc, np.sqrt(dmin)
