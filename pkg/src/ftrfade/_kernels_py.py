"""Pure numpy implementation of the hot kernels.

Mirrors ``_kernels.pyx`` function for function. Loops run over series
terms with the active elements compressed as they converge, so cost scales
with the slowest element of each call.
"""
import math

import numpy as np

EPS = 1e-17
RESCALE = 1e-280
LOG_RESCALE = -math.log(RESCALE)
MAX_TERMS = 2_000_000


def _asym_threshold(a, b):
    return max(100.0, 10.0 * (abs(b - a) + 1.0) * (abs(1.0 - a) + 1.0))


def _log_1f1_asymptotic(a, b, z):
    """Large-argument expansion; returns (log values, converged mask)."""
    s = np.ones_like(z)
    t = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    done = np.zeros(z.shape, dtype=bool)
    for k in range(200):
        if not active.any():
            break
        t = np.where(active, t * ((b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)), t)
        zero = active & (t == 0.0)
        done |= zero
        active &= ~zero
        grew = active & (np.abs(t) > prev)
        active &= ~grew
        s = np.where(active, s + t, s)
        conv = active & (np.abs(t) < EPS * np.abs(s))
        done |= conv
        active &= ~conv
        prev = np.abs(t)
    ok = done & (s > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = math.lgamma(b) - math.lgamma(a) + z + (a - b) * np.log(z) + np.log(s)
    return out, ok


def _log_1f1_series(a, b, z):
    out = np.full(z.shape, np.nan)
    idx = np.arange(z.size)
    zz = z.copy()
    s = np.ones_like(zz)
    t = np.ones_like(zz)
    scale = np.zeros_like(zz)
    for k in range(MAX_TERMS):
        if idx.size == 0:
            break
        r = (a + k) * zz / ((b + k) * (k + 1.0))
        t *= r
        s += t
        if k + 1.0 > a + b:
            with np.errstate(divide="ignore", invalid="ignore"):
                fin = (r < 1.0) & (t * r / (1.0 - r) < EPS * s)
        else:
            fin = np.zeros(idx.shape, dtype=bool)
        if fin.any():
            out[idx[fin]] = np.log(s[fin]) + scale[fin]
            keep = ~fin
            idx, zz, s, t, scale = idx[keep], zz[keep], s[keep], t[keep], scale[keep]
        big = s > 1e280
        if big.any():
            s[big] *= RESCALE
            t[big] *= RESCALE
            scale[big] += LOG_RESCALE
    return out


def log_hyp1f1(a, b, z):
    """log 1F1(a; b; z) elementwise for a > 0, b > 0, z >= 0."""
    z = np.asarray(z, dtype=np.float64)
    flat = z.ravel()
    out = np.zeros(flat.shape)
    pos = flat != 0.0
    big = flat > _asym_threshold(a, b)
    if big.any():
        vals, ok = _log_1f1_asymptotic(a, b, flat[big])
        where = np.flatnonzero(big)
        out[where[ok]] = vals[ok]
        big[where[~ok]] = False
    rest = pos & ~big
    if rest.any():
        out[rest] = _log_1f1_series(a, b, flat[rest])
    return out.reshape(z.shape)


def hyp2f1_series(a, b, c, w):
    """Direct Gauss series elementwise for 0 <= w < 1."""
    w = np.asarray(w, dtype=np.float64)
    flat = w.ravel()
    out = np.ones(flat.shape)
    idx = np.flatnonzero(flat != 0.0)
    ww = flat[idx]
    s = np.ones_like(ww)
    t = np.ones_like(ww)
    transient = abs(a) + abs(b) + abs(c)
    for k in range(MAX_TERMS):
        if idx.size == 0:
            break
        r = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * ww
        t *= r
        s += t
        rb = np.maximum(np.abs(r), ww)
        fin = t == 0.0
        if k + 1.0 > transient:
            with np.errstate(divide="ignore", invalid="ignore"):
                fin |= (rb < 1.0) & (np.abs(t) * rb / (1.0 - rb) <= EPS * np.abs(s))
        if fin.any():
            out[idx[fin]] = s[fin]
            keep = ~fin
            idx, ww, s, t = idx[keep], ww[keep], s[keep], t[keep]
    out[idx] = np.nan
    return out.reshape(w.shape)


def log_hyp2f1_positive(a, b, c, w):
    """log of the Gauss series elementwise for a, b, c > 0 and 0 <= w < 1."""
    w = np.asarray(w, dtype=np.float64)
    flat = w.ravel()
    out = np.zeros(flat.shape)
    idx = np.flatnonzero(flat != 0.0)
    ww = flat[idx]
    s = np.ones_like(ww)
    t = np.ones_like(ww)
    scale = np.zeros_like(ww)
    transient = a + b + c
    for k in range(MAX_TERMS):
        if idx.size == 0:
            break
        r = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * ww
        t *= r
        s += t
        if k + 1.0 > transient:
            rb = np.maximum(r, ww)
            with np.errstate(divide="ignore", invalid="ignore"):
                fin = (rb < 1.0) & (t * rb / (1.0 - rb) <= EPS * s)
            if fin.any():
                out[idx[fin]] = np.log(s[fin]) + scale[fin]
                keep = ~fin
                idx, ww, s, t, scale = idx[keep], ww[keep], s[keep], t[keep], scale[keep]
        big = s > 1e280
        if big.any():
            s[big] *= RESCALE
            t[big] *= RESCALE
            scale[big] += LOG_RESCALE
    out[idx] = np.nan
    return out.reshape(w.shape)


def rs_mixture_pdf(x, rate, m, kr, weights):
    """Weighted sum over nodes of Rician-shadowed power densities."""
    x = np.asarray(x, dtype=np.float64)
    kr = np.asarray(kr, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    lpre = -m * np.log1p(kr / m) + math.log(rate)
    slope = rate * kr / (m + kr)
    xf = x.ravel()
    lf = log_hyp1f1(m, 1.0, np.multiply.outer(xf, slope))
    terms = np.exp(lpre[None, :] - rate * xf[:, None] + lf)
    return (terms @ weights).reshape(x.shape)
