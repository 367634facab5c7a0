"""Composite inverse-gamma shadowing / FTR fading channel.

The received power is Z = Z_bar * G * V with G inverse-gamma (shape lam,
unit mean) and V a unit-mean FTR power. Both the density and, for integer
lam, the CDF reduce to generalized MGFs of V at s = (1 - lam) Z_bar / z.
"""
import math
from dataclasses import dataclass

import numpy as np

from .channel import FtrParams, InvalidParameter, log_ftr_gmgf
from .quadrature import QuadratureSpec, adaptive_integrate
from .specfun import gauss_2f1

_CDF_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11, max_subdivisions=4000)


@dataclass(frozen=True)
class ShadowParams:
    """Unit-mean inverse-gamma shadowing with shape ``lam`` (scale lam - 1)."""

    lam: float

    def __post_init__(self):
        if not self.lam > 1:
            raise InvalidParameter("lambda must be > 1 (unit-mean inverse gamma requires lambda > 1)")

    @property
    def is_integer(self) -> bool:
        return float(self.lam).is_integer()


@dataclass(frozen=True)
class CompositeParams:
    mean_power: float
    fading: FtrParams
    shadow: ShadowParams

    def __post_init__(self):
        if not self.mean_power > 0:
            raise InvalidParameter("mean power Z_bar must be > 0")
        if self.fading.mean_power != 1.0:
            raise InvalidParameter("the FTR factor must have unit mean power")

    @classmethod
    def from_values(cls, z_bar=1.0, m=1.0, K=0.0, delta=0.0, lam=2.0):
        return cls(z_bar, FtrParams(1.0, m, K, delta), ShadowParams(lam))


@dataclass(frozen=True)
class OutageQuery:
    """SNR threshold and mean SNR."""

    gamma_th: float
    gamma_bar_z: float

    def __post_init__(self):
        if not self.gamma_th > 0:
            raise InvalidParameter("gamma_th must be > 0")
        if not self.gamma_bar_z > 0:
            raise InvalidParameter("mean SNR must be > 0")

    @property
    def ratio(self) -> float:
        return self.gamma_th / self.gamma_bar_z


def _positive(z, name="z"):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise ValueError(f"{name} must be > 0")
    return z


def _unwrap(a):
    return a if np.ndim(a) else float(a)


def log_composite_pdf(z, c: CompositeParams):
    z = _positive(z)
    lam, zb = c.shadow.lam, c.mean_power
    s = (1.0 - lam) * zb / z
    return (
        lam * math.log(zb)
        + lam * math.log(lam - 1.0)
        - (lam + 1.0) * np.log(z)
        - math.lgamma(lam)
        + log_ftr_gmgf(lam, s, c.fading)
    )


def composite_pdf(z, c: CompositeParams):
    """Density of the composite received power Z."""
    return _unwrap(np.exp(log_composite_pdf(z, c)))


def _cdf_closed(z, c: CompositeParams):
    lam, zb = int(c.shadow.lam), c.mean_power
    u = (lam - 1.0) * zb / z
    s = -u
    total = np.zeros_like(z)
    for n in range(lam):
        total = total + np.exp(n * np.log(u) - math.lgamma(n + 1.0) + log_ftr_gmgf(n, s, c.fading))
    return total


def _cdf_quadrature(z, c: CompositeParams):
    pdf = lambda t: np.exp(log_composite_pdf(t, c))  # noqa: E731
    flat = z.ravel()
    order = np.argsort(flat)
    out = np.empty_like(flat)
    acc, left = 0.0, 0.0
    for i in order:
        right = flat[i]
        if right > left:
            acc += adaptive_integrate(pdf, left, right, _CDF_SPEC)[0]
            left = right
        out[i] = acc
    return np.minimum(out, 1.0).reshape(z.shape)


def composite_cdf(z, c: CompositeParams, method: str = "auto"):
    """CDF of Z.

    ``method="closed"`` uses the finite GMGF sum (integer lambda only),
    ``"quadrature"`` integrates :func:`composite_pdf`; ``"auto"`` picks the
    closed form whenever lambda is an integer.
    """
    z = _positive(z)
    if method == "auto":
        method = "closed" if c.shadow.is_integer else "quadrature"
    if method == "closed":
        if not c.shadow.is_integer:
            raise InvalidParameter("the finite-sum CDF needs an integer lambda")
        out = np.clip(_cdf_closed(np.atleast_1d(z), c), 0.0, 1.0).reshape(z.shape)
    elif method == "quadrature":
        out = _cdf_quadrature(z, c)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _unwrap(out)


def amplitude_pdf(r, c: CompositeParams):
    """Density of the amplitude R = sqrt(Z)."""
    r = _positive(r, "r")
    return _unwrap(2.0 * r * composite_pdf(r * r, c))


def amplitude_cdf(r, c: CompositeParams, method: str = "auto"):
    r = _positive(r, "r")
    return composite_cdf(r * r, c, method)


def outage_exact(q: OutageQuery, c: CompositeParams, method: str = "auto") -> float:
    """P(gamma_z < gamma_th) = F_Z(Z_bar gamma_th / gamma_bar_z)."""
    return composite_cdf(c.mean_power * q.ratio, c, method)


def outage_asymptotic(q: OutageQuery, c: CompositeParams) -> float:
    """High-SNR outage: linear in gamma_th / gamma_bar_z (diversity order one)."""
    lam = c.shadow.lam
    m, K, d = c.fading.m, c.fading.K, c.fading.delta
    shadow = math.exp(math.lgamma(lam + 1.0) - math.lgamma(lam)) / (lam - 1.0)
    fading = (1.0 + K) * math.exp(-m * math.log1p(K / m))
    b = K * d / (m + K)  # delta / (m/K + 1), finite at K = 0
    return shadow * fading * gauss_2f1(m / 2.0, (1.0 + m) / 2.0, 1.0, b * b) * q.ratio
