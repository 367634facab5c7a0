"""Rician shadowed and fluctuating two-ray (FTR) power statistics.

The FTR power density is evaluated as a phase-average of Rician shadowed
densities: conditioned on the phase difference theta of the two specular
rays, the FTR power is Rician shadowed with specular ratio
K_r(theta) = K (1 + delta cos theta) and the same diffuse power 2 sigma^2.
Phase averages use a 200-node Gauss-Legendre rule on [0, pi], checked
against 100 nodes and refined adaptively where the two disagree.
"""
import contextlib
import contextvars
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._backend import kernels
from .quadrature import QuadratureSpec, adaptive_integrate, cumulative_integral, gauss_legendre
from .specfun import NumericFailure, gauss_2f1, log_gauss_2f1, phi2_bivariate

THETA_ORDER = 200
THETA_CHECK_ORDER = 100
THETA_AGREEMENT = 1e-9
# the closed form costs O(n^2) 2F1 evaluations; beyond this order "auto"
# switches to the phase quadrature, whose cost does not grow with n
CLOSED_FORM_MAX_ORDER = 100

_THETA_SPEC = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-12, max_subdivisions=4000)
_CDF_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11)

_closed_form_fault = contextvars.ContextVar("closed_form_fault", default=0.0)


class InvalidParameter(ValueError):
    """A parameter violates a model invariant."""


@dataclass(frozen=True)
class RsParams:
    """Rician shadowed power: mean power, fluctuation severity m, ratio K_r."""

    mean_power: float = 1.0
    m: float = 1.0
    K_r: float = 0.0

    def __post_init__(self):
        if not self.mean_power > 0:
            raise InvalidParameter("mean_power must be > 0")
        if not self.m > 0:
            raise InvalidParameter("m must be > 0")
        if not self.K_r >= 0:
            raise InvalidParameter("K_r must be >= 0")

    @property
    def sigma2(self) -> float:
        return self.mean_power / (2.0 * (1.0 + self.K_r))

    @property
    def omega(self) -> float:
        """Mean specular power."""
        return 2.0 * self.sigma2 * self.K_r


@dataclass(frozen=True)
class FtrParams:
    """FTR power: mean power, severity m, specular-to-diffuse ratio K, similarity delta."""

    mean_power: float = 1.0
    m: float = 1.0
    K: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.mean_power > 0:
            raise InvalidParameter("mean_power must be > 0")
        if not self.m > 0:
            raise InvalidParameter("m must be > 0")
        if not self.K >= 0:
            raise InvalidParameter("K must be >= 0")
        if not 0 <= self.delta <= 1:
            raise InvalidParameter("delta must lie in [0, 1]")
        if not self.sigma2 > 0:
            raise InvalidParameter("diffuse power 2*sigma^2 = mean_power/(1+K) must be > 0")

    @property
    def sigma2(self) -> float:
        return self.mean_power / (2.0 * (1.0 + self.K))

    @property
    def rate(self) -> float:
        """(1 + K) / mean_power, shared by every phase-conditional density."""
        return (1.0 + self.K) / self.mean_power

    def specular_ratio(self, cos_theta):
        return self.K * (1.0 + self.delta * np.asarray(cos_theta, dtype=float))

    def conditional(self, theta: float) -> RsParams:
        """Rician shadowed law of the power given the phase difference theta."""
        kr = float(self.specular_ratio(math.cos(theta)))
        return RsParams(2.0 * self.sigma2 * (1.0 + kr), self.m, kr)


@dataclass(frozen=True)
class GmgfQuery:
    """Order n and argument s of the generalized MGF E[x^n e^{s x}]."""

    n: float
    s: float = 0.0

    def __post_init__(self):
        if not self.n >= 0:
            raise InvalidParameter("GMGF order n must be >= 0")
        if not self.s <= 0:
            raise InvalidParameter("GMGF argument s must be <= 0")


@dataclass(frozen=True)
class I1Args:
    P1: int
    P2: float
    alpha: float
    beta: float

    def __post_init__(self):
        if int(self.P1) != self.P1 or self.P1 < 0:
            raise InvalidParameter("P1 must be a nonnegative integer")
        if not self.P2 > 0:
            raise InvalidParameter("P2 must be > 0")
        if not abs(self.beta) < 1:
            raise InvalidParameter("|beta| must be < 1")


def _theta_rule(order):
    """cos(theta) nodes on [0, pi] with weights summing to one."""
    x, w = gauss_legendre(order)
    return np.cos(0.5 * np.pi * (x + 1.0)), 0.5 * w


def _theta_adaptive_mean(fn):
    value, _ = adaptive_integrate(lambda th: fn(np.cos(th)), 0.0, np.pi, _THETA_SPEC)
    return value / np.pi


def _check_mixture_invariance(p: FtrParams, kr):
    # the conditional mean power over (1 + K_r) must not depend on theta
    cond_mean = 2.0 * p.sigma2 * (1.0 + kr)
    ratio = cond_mean / (1.0 + kr)
    if not np.allclose(ratio, p.mean_power / (1.0 + p.K), rtol=8 * np.finfo(float).eps, atol=0):
        raise AssertionError("conditional mean power breaks the mixture invariance")


def _as_abscissae(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("abscissae must be >= 0")
    return x


def _unwrap(a):
    return a if np.ndim(a) else float(a)


def _rs_node_pdf(x, rate, m, kr):
    """Rician shadowed densities at one abscissa for an array of K_r values."""
    slope = rate * kr / (m + kr)
    lf = kernels.log_hyp1f1(m, 1.0, slope * x)
    return np.exp(-m * np.log1p(kr / m) + math.log(rate) - rate * x + lf)


def rs_pdf(x, p: RsParams):
    """Power density of the Rician shadowed model, evaluated in log form."""
    x = _as_abscissae(x)
    rate = (1.0 + p.K_r) / p.mean_power
    out = kernels.rs_mixture_pdf(x, rate, p.m, np.array([p.K_r]), np.array([1.0]))
    if np.any(np.isnan(out)):
        raise NumericFailure("1F1 evaluation failed inside rs_pdf")
    return _unwrap(out)


def ftr_pdf(x, p: FtrParams):
    """FTR power density as the phase average of Rician shadowed densities."""
    x = _as_abscissae(x)
    cos_hi, w_hi = _theta_rule(THETA_ORDER)
    cos_lo, w_lo = _theta_rule(THETA_CHECK_ORDER)
    kr_hi = p.specular_ratio(cos_hi)
    kr_lo = p.specular_ratio(cos_lo)
    _check_mixture_invariance(p, kr_hi)
    rate = p.rate
    f_hi = kernels.rs_mixture_pdf(x, rate, p.m, kr_hi, w_hi)
    f_lo = kernels.rs_mixture_pdf(x, rate, p.m, kr_lo, w_lo)
    if np.any(np.isnan(f_hi)) or np.any(np.isnan(f_lo)):
        raise NumericFailure("1F1 evaluation failed inside ftr_pdf")
    bad = np.abs(f_hi - f_lo) > THETA_AGREEMENT * np.abs(f_hi)
    if np.any(bad):
        flat = f_hi.reshape(-1).copy()
        xs = x.reshape(-1)
        for i in np.flatnonzero(bad.reshape(-1)):
            flat[i] = _theta_adaptive_mean(
                lambda c, xi=xs[i]: _rs_node_pdf(xi, rate, p.m, p.specular_ratio(c))
            )
        f_hi = flat.reshape(x.shape)
    return _unwrap(f_hi)


def _cdf_by_quadrature(pdf, x, scale):
    x = _as_abscissae(x)
    if x.ndim == 0:
        return adaptive_integrate(pdf, 0.0, float(x), _CDF_SPEC)[0] if x > 0 else 0.0
    return np.minimum(cumulative_integral(pdf, x, panel=scale, order=20), 1.0)


def rs_cdf_phi2(x: float, p: RsParams) -> float:
    """Rician shadowed CDF through the bivariate confluent function Phi2."""
    if x == 0:
        return 0.0
    rate = (1.0 + p.K_r) / p.mean_power
    u = rate * x
    pref = u * math.exp(-p.m * math.log1p(p.K_r / p.m))
    return pref * phi2_bivariate(1.0 - p.m, p.m, 2.0, -u, -u * p.m / (p.m + p.K_r))


def rs_cdf(x, p: RsParams, method: str = "quadrature"):
    """Rician shadowed power CDF.

    ``method="quadrature"`` integrates :func:`rs_pdf`; ``method="phi2"``
    uses the closed form in terms of Phi2 (scalar x only).
    """
    if method == "phi2":
        return rs_cdf_phi2(float(x), p)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    return _cdf_by_quadrature(lambda t: rs_pdf(t, p), x, 8.0 * p.sigma2)


def ftr_cdf_phi2(x: float, p: FtrParams, order: int = THETA_CHECK_ORDER) -> float:
    """FTR CDF as the phase average of Phi2-form Rician shadowed CDFs."""
    if x == 0:
        return 0.0
    cos_t, w = _theta_rule(order)
    vals = []
    for kr in p.specular_ratio(cos_t):
        vals.append(rs_cdf_phi2(x, RsParams(2.0 * p.sigma2 * (1.0 + kr), p.m, kr)))
    return float(np.dot(w, vals))


def ftr_cdf(x, p: FtrParams, method: str = "quadrature"):
    """FTR power CDF: integral of :func:`ftr_pdf`, or the Phi2 route for checks."""
    if method == "phi2":
        return ftr_cdf_phi2(float(x), p)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    return _cdf_by_quadrature(lambda t: ftr_pdf(t, p), x, 8.0 * p.sigma2)


# -- generalized MGF -------------------------------------------------------


def _is_integer(n):
    return float(n).is_integer()


def _log_conditional_hyp(n, s, p: FtrParams, cos_t):
    """log M(n, s | theta) through 2F1(m, n+1; 1; w), valid for real n > -1.

    ``s`` has shape (S,), ``cos_t`` shape (N,); the result is (S, N).
    """
    kr = p.specular_ratio(cos_t)[None, :]
    A = (1.0 + p.K - p.mean_power * s)[:, None]
    w = (1.0 + p.K) * kr / ((p.m + kr) * A)
    if np.any(w < 0) or np.any(w >= 1):
        raise NumericFailure("conditional GMGF argument left [0, 1)")
    log_pref = (
        -p.m * np.log1p(kr / p.m)
        + math.log1p(p.K)
        + math.lgamma(n + 1.0)
        - (n + 1.0) * np.log(A)
        + n * math.log(p.mean_power)
    )
    return log_pref + np.asarray(log_gauss_2f1(p.m, n + 1.0, 1.0, w.ravel())).reshape(w.shape)


def _log_conditional_finite(n, s, p: FtrParams, cos_t):
    """log M(n, s | theta) as the finite sum over l for integer n."""
    n = int(n)
    m, K, gb = p.m, p.K, p.mean_power
    kr = p.specular_ratio(cos_t)[None, :]
    A = (1.0 + K - gb * s)[:, None]
    D = m * (1.0 + K) - (m + kr) * gb * s[:, None]
    base = math.lgamma(n + 1.0) + m * math.log(m) + (m - n - 1.0) * np.log(A) + n * math.log(gb)
    terms = []
    for l in range(n + 1):
        coef = _log_binom(n, l) + math.lgamma(m + l) - math.lgamma(m) - math.lgamma(l + 1.0)
        with np.errstate(divide="ignore"):
            lk = l * np.log(kr) if l else np.zeros_like(kr)
        terms.append(coef + (l + 1.0) * math.log1p(K) + lk - (l + m) * np.log(D))
    return base + logsumexp(np.stack(terms), axis=0)


def _log_theta_mean(logfn, s):
    """log of the phase average of exp(logfn(s, cos)), with node-count check."""
    cos_hi, w_hi = _theta_rule(THETA_ORDER)
    cos_lo, w_lo = _theta_rule(THETA_CHECK_ORDER)
    hi = logsumexp(logfn(s, cos_hi), b=w_hi[None, :], axis=1)
    lo = logsumexp(logfn(s, cos_lo), b=w_lo[None, :], axis=1)
    bad = np.abs(np.expm1(lo - hi)) > THETA_AGREEMENT
    for i in np.flatnonzero(bad):
        si = s[i : i + 1]
        shift = hi[i]
        mean = _theta_adaptive_mean(lambda c: np.exp(logfn(si, c)[0] - shift))
        hi[i] = shift + math.log(mean)
    return hi


def _log_binom(n, k):
    return math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)


def _log_gmgf_closed(n, s, p: FtrParams):
    """log of the closed-form GMGF for integer order n (vectorized over s)."""
    n = int(n)
    m, K, d, gb = p.m, p.K, p.delta, p.mean_power
    A = 1.0 + K - gb * s
    E = m * (1.0 + K) - (m + K - K * d) * gb * s
    zarg = 2.0 * K * d * gb * s / E
    base = math.lgamma(n + 1.0) + m * math.log(m) + (m - n - 1.0) * np.log(A) + n * math.log(gb)
    terms = []
    for l in range(n + 1):
        if l > 0 and K == 0:
            break
        coef = (
            _log_binom(n, l)
            + math.lgamma(m + l) - math.lgamma(m) - math.lgamma(l + 1.0)
            + (l + 1.0) * math.log1p(K)
            + (l * math.log(K) if l else 0.0)
            - (m + l) * np.log(E)
        )
        # every inner term is positive: the 2F1 values are, since zarg <= 0
        logs, weights = [], []
        for q in range(l + 1):
            # 0**0 == 1 covers delta = 1 (and delta = 0) exactly
            if (d == 1.0 and q < l) or (d == 0.0 and q > 0):
                continue
            weights.append(
                _log_binom(l, q)
                + (l - q) * (math.log1p(-d) if l > q else 0.0)
                + (q * math.log(2.0 * d) if q else 0.0)
                + math.lgamma(q + 0.5) - math.lgamma(q + 1.0) - 0.5 * math.log(math.pi)
            )
            logs.append(np.log(gauss_2f1(m + l, q + 0.5, q + 1.0, zarg)))
        inner = logsumexp(np.stack(logs) + np.array(weights)[:, None], axis=0)
        if l == 0:
            inner = inner + math.log1p(_closed_form_fault.get())
        terms.append(coef + inner)
    return base + logsumexp(np.stack(terms), axis=0)


def _check_gmgf_args(n, s):
    s = np.asarray(s, dtype=float)
    if not n >= 0:
        raise InvalidParameter("GMGF order n must be >= 0")
    if np.any(s > 0) or np.any(np.isnan(s)):
        raise InvalidParameter("GMGF argument s must be <= 0")
    return s


def log_ftr_gmgf(n: float, s, p: FtrParams, method: str = "auto"):
    """Logarithm of the FTR generalized MGF E[g^n exp(s g)], vectorized over s.

    ``method``: ``"closed"`` (integer n only), ``"quadrature"`` (phase
    average of the real-order conditional form) or ``"auto"``.
    """
    s = _check_gmgf_args(n, s)
    flat = np.atleast_1d(s).ravel()
    if method == "auto":
        method = "closed" if _is_integer(n) and n <= CLOSED_FORM_MAX_ORDER else "quadrature"
    if method == "closed":
        if not _is_integer(n):
            raise InvalidParameter("the closed form needs an integer order n")
        out = _log_gmgf_closed(n, flat, p)
    elif method == "quadrature":
        out = _log_theta_mean(lambda ss, c: _log_conditional_hyp(n, ss, p, c), flat)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _unwrap(out.reshape(s.shape))


def ftr_gmgf(q: GmgfQuery, p: FtrParams, method: str = "auto") -> float:
    """Generalized MGF M^(n)(s) of the FTR power."""
    return math.exp(log_ftr_gmgf(q.n, q.s, p, method))


def ftr_gmgf_conditional(q: GmgfQuery, theta: float, p: FtrParams, method: str = "auto") -> float:
    """Generalized MGF of the power given the phase difference theta.

    Integer orders default to the terminating sum over l; ``method="hyp"``
    forces the 2F1(m, n+1; 1; w) form, which also covers real orders.
    """
    s = np.array([q.s])
    cos_t = np.array([math.cos(theta)])
    if method == "auto":
        method = "finite" if _is_integer(q.n) else "hyp"
    if method == "finite":
        if not _is_integer(q.n):
            raise InvalidParameter("the terminating sum needs an integer order n")
        val = _log_conditional_finite(q.n, s, p, cos_t)
    elif method == "hyp":
        val = _log_conditional_hyp(q.n, s, p, cos_t)
    else:
        raise ValueError(f"unknown method {method!r}")
    return math.exp(float(val[0, 0]))


def ftr_moment(n: float, p: FtrParams, method: str = "auto") -> float:
    """n-th moment E[g^n], the GMGF at s = 0."""
    return ftr_gmgf(GmgfQuery(n, 0.0), p, method)


@contextlib.contextmanager
def perturbed_closed_form(relative: float):
    """Test hook: scale the l = 0 coefficient of the closed-form GMGF.

    Used by ``ftrfade validate --inject-fault`` to prove the checks can fail.
    """
    token = _closed_form_fault.set(relative)
    try:
        yield
    finally:
        _closed_form_fault.reset(token)


def appendix_i1(a: I1Args) -> float:
    """Closed form of int_0^pi (1 + alpha cos t)^P1 / (1 + beta cos t)^P2 dt."""
    P1, P2, al, be = int(a.P1), a.P2, a.alpha, a.beta
    z = -2.0 * be / (1.0 - be)
    total = 0.0
    for q in range(P1 + 1):
        beta_fn = math.sqrt(math.pi) * math.exp(math.lgamma(q + 0.5) - math.lgamma(q + 1.0))
        total += (
            math.comb(P1, q)
            * (2.0 * al) ** q
            * (1.0 - al) ** (P1 - q)
            * beta_fn
            * gauss_2f1(P2, q + 0.5, q + 1.0, z)
        )
    return total / (1.0 - be) ** P2
