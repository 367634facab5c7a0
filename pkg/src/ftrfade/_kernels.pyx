# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Every function here has a numpy twin in ``_kernels_py`` with an identical
signature; ``_backend`` picks one at import. Failures are reported as NaN
entries so the loops can run without the GIL.
"""
import numpy as np

from libc.math cimport exp, fabs, lgamma, log, INFINITY, NAN

cdef double EPS = 1e-17
cdef double RESCALE = 1e-280
cdef double LOG_RESCALE = 644.7238260383328  # -log(1e-280)
cdef long MAX_TERMS = 2000000


cdef inline double asym_threshold(double a, double b) nogil:
    return max(100.0, 10.0 * (fabs(b - a) + 1.0) * (fabs(1.0 - a) + 1.0))


cdef double _log_1f1(double a, double b, double z) nogil:
    # a > 0, b > 0, z >= 0: every series term is nonnegative
    cdef double s, t, prev, r, bound, scale
    cdef long k
    cdef bint done = False
    if z == 0.0:
        return 0.0
    if z > asym_threshold(a, b):
        s = 1.0
        t = 1.0
        prev = INFINITY
        for k in range(200):
            t *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)
            if t == 0.0:
                done = True
                break
            if fabs(t) > prev:
                break
            s += t
            if fabs(t) < EPS * fabs(s):
                done = True
                break
            prev = fabs(t)
        if done and s > 0.0:
            return lgamma(b) - lgamma(a) + z + (a - b) * log(z) + log(s)
    s = 1.0
    t = 1.0
    scale = 0.0
    for k in range(MAX_TERMS):
        r = (a + k) * z / ((b + k) * (k + 1.0))
        t *= r
        s += t
        if r < 1.0 and k + 1.0 > a + b:
            bound = t * r / (1.0 - r)
            if bound < EPS * s:
                return log(s) + scale
        if s > 1e280:
            s *= RESCALE
            t *= RESCALE
            scale += LOG_RESCALE
    return NAN


cdef double _hyp2f1(double a, double b, double c, double w) nogil:
    # direct series, 0 <= w < 1
    cdef double s = 1.0, t = 1.0, r, rb
    cdef double transient = fabs(a) + fabs(b) + fabs(c)
    cdef long k
    if w == 0.0:
        return 1.0
    for k in range(MAX_TERMS):
        r = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        t *= r
        if t == 0.0:
            return s
        s += t
        rb = max(fabs(r), w)
        if rb < 1.0 and k + 1.0 > transient and fabs(t) * rb / (1.0 - rb) <= EPS * fabs(s):
            return s
    return NAN


cdef double _log_hyp2f1_pos(double a, double b, double c, double w) nogil:
    # a, b, c > 0 and 0 <= w < 1: positive terms, summed with rescaling
    cdef double s = 1.0, t = 1.0, r, rb, scale = 0.0
    cdef double transient = a + b + c
    cdef long k
    if w == 0.0:
        return 0.0
    for k in range(MAX_TERMS):
        r = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        t *= r
        s += t
        rb = max(r, w)
        if rb < 1.0 and k + 1.0 > transient and t * rb / (1.0 - rb) <= EPS * s:
            return log(s) + scale
        if s > 1e280:
            s *= RESCALE
            t *= RESCALE
            scale += LOG_RESCALE
    return NAN


def log_hyp1f1(double a, double b, z):
    """log 1F1(a; b; z) elementwise for a > 0, b > 0, z >= 0."""
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64).ravel()
    out = np.empty(zv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(zv.shape[0]):
            ov[i] = _log_1f1(a, b, zv[i])
    return out.reshape(np.shape(z))


def hyp2f1_series(double a, double b, double c, w):
    """Direct Gauss series elementwise for 0 <= w < 1."""
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64).ravel()
    out = np.empty(wv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(wv.shape[0]):
            ov[i] = _hyp2f1(a, b, c, wv[i])
    return out.reshape(np.shape(w))


def log_hyp2f1_positive(double a, double b, double c, w):
    """log of the Gauss series elementwise for a, b, c > 0 and 0 <= w < 1."""
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64).ravel()
    out = np.empty(wv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(wv.shape[0]):
            ov[i] = _log_hyp2f1_pos(a, b, c, wv[i])
    return out.reshape(np.shape(w))


def rs_mixture_pdf(x, double rate, double m, kr, weights):
    """Weighted sum over nodes of Rician-shadowed power densities.

    Each node j carries its own specular ratio ``kr[j]`` while all nodes
    share the diffuse rate ``rate = (1 + K_r) / mean_power``.
    """
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef double[::1] kv = np.ascontiguousarray(kr, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, nn = kv.shape[0]
    cdef double acc, lr = log(rate), xi, lf
    cdef double[::1] lpre = np.empty(nn)
    cdef double[::1] slope = np.empty(nn)
    for j in range(nn):
        lpre[j] = -m * log(1.0 + kv[j] / m) + lr
        slope[j] = rate * kv[j] / (m + kv[j])
    with nogil:
        for i in range(xv.shape[0]):
            xi = xv[i]
            acc = 0.0
            for j in range(nn):
                lf = _log_1f1(m, 1.0, slope[j] * xi)
                acc += wv[j] * exp(lpre[j] - rate * xi + lf)
            ov[i] = acc
    return out.reshape(np.shape(x))
