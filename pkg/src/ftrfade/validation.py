"""Self-checks run by ``ftrfade validate``.

Each check measures one discrepancy between two independent routes and
compares it with a fixed threshold. Monte Carlo checks are the only ones
whose measured values depend on the seed.
"""
import itertools
import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .channel import (
    FtrParams,
    GmgfQuery,
    I1Args,
    RsParams,
    appendix_i1,
    ftr_cdf,
    ftr_gmgf,
    ftr_pdf,
    perturbed_closed_form,
    rs_pdf,
)
from .composite import CompositeParams, OutageQuery, composite_cdf, outage_asymptotic, outage_exact
from .mcsim import SimConfig, ks_distance, sample_composite, sample_ftr_power, tabulated_cdf
from .quadrature import QuadratureSpec, integrate_finite, integrate_semi_infinite

_TIGHT = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=4000)


@dataclass
class Check:
    name: str
    measured: float
    threshold: float
    monte_carlo: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.measured < self.threshold)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_normalization() -> Check:
    worst = 0.0
    for m, K, d in itertools.product((0.8, 2.0, 10.0), (0.0, 4.0, 15.0), (0.0, 0.7, 1.0)):
        p = FtrParams(1.0, m, K, d)
        total = integrate_semi_infinite(lambda x: ftr_pdf(x, p), 0.0, _TIGHT)
        worst = max(worst, abs(total - 1.0))
    return Check("ftr_pdf_normalization", worst, 1e-8)


def check_gmgf_paths(fault: float = 0.0) -> Check:
    p = FtrParams(1.0, 2.5, 4.0, 0.3)
    worst = 0.0
    with perturbed_closed_form(fault):
        for n in range(6):
            for s in (0.0, -0.1, -1.0, -10.0):
                q = GmgfQuery(n, s)
                worst = max(worst, _rel(ftr_gmgf(q, p, "closed"), ftr_gmgf(q, p, "quadrature")))
    return Check("gmgf_closed_vs_phase_quadrature", worst, 1e-7)


def check_gmgf_direct(fault: float = 0.0) -> Check:
    p = FtrParams(1.0, 2.0, 4.0, 0.2)
    worst = 0.0
    with perturbed_closed_form(fault):
        for n in (0, 2, 3):
            for s in (0.0, -1.0):
                direct = integrate_semi_infinite(
                    lambda x: x**n * np.exp(s * x) * ftr_pdf(x, p), 0.0, _TIGHT
                )
                worst = max(worst, _rel(ftr_gmgf(GmgfQuery(n, s), p, "closed"), direct))
    return Check("gmgf_closed_vs_direct_integral", worst, 1e-7)


def check_i1() -> Check:
    worst = 0.0
    for P1, P2, al, be in itertools.product((0, 2, 5), (0.5, 2.5), (-0.7, 0.9), (-0.8, 0.6)):
        direct = integrate_finite(
            lambda t: (1 + al * np.cos(t)) ** P1 / (1 + be * np.cos(t)) ** P2, 0.0, math.pi, _TIGHT
        )
        worst = max(worst, _rel(appendix_i1(I1Args(P1, P2, al, be)), direct))
    return Check("phase_integral_closed_form_vs_quadrature", worst, 1e-9)


def check_degeneracies() -> List[Check]:
    x = np.linspace(0.0, 8.0, 100)
    p = FtrParams(1.0, 2.0, 4.0, 0.0)
    a = np.max(np.abs(ftr_pdf(x, p) / rs_pdf(x, RsParams(1.0, 2.0, 4.0)) - 1.0))
    p0 = FtrParams(2.0, 1.5, 0.0, 0.6)
    b = np.max(np.abs(ftr_pdf(x, p0) / (np.exp(-x / 2.0) / 2.0) - 1.0))
    return [Check("delta0_equals_rician_shadowed", a, 1e-10), Check("k0_equals_exponential", b, 1e-10)]


def check_cdf_phi2() -> Check:
    p = FtrParams(1.0, 1.5, 4.0, 0.2)
    worst = max(abs(ftr_cdf(x, p) - ftr_cdf(x, p, "phi2")) for x in (0.3, 1.0, 2.5))
    return Check("ftr_cdf_quadrature_vs_phi2", worst, 1e-7)


def check_integer_lambda_cdf() -> Check:
    worst = 0.0
    z = np.geomspace(0.01, 20.0, 8)
    for lam in (2, 3):
        c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, lam)
        worst = max(worst, float(np.max(np.abs(composite_cdf(z, c, "closed") - composite_cdf(z, c, "quadrature")))))
    return Check("composite_cdf_sum_vs_quadrature", worst, 1e-7)


def check_asymptote() -> Check:
    worst = 0.0
    q = OutageQuery(1e-4, 1.0)
    for m, K in ((2, 4), (10, 4), (2, 15), (10, 15)):
        c = CompositeParams.from_values(1.0, m, K, 0.3, 2.0)
        worst = max(worst, abs(outage_exact(q, c) / outage_asymptotic(q, c) - 1.0))
    return Check("outage_exact_over_asymptotic_at_1e-4", worst, 0.05)


def check_monte_carlo(cfg: SimConfig) -> List[Check]:
    p = FtrParams(1.0, 2.0, 4.0, 0.2)
    ks_ftr = ks_distance(sample_ftr_power(p, cfg), tabulated_cdf(lambda x: ftr_cdf(x, p), 1.0))
    c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, 2.0)
    ks_comp = ks_distance(sample_composite(c, cfg), tabulated_cdf(lambda z: composite_cdf(z, c), 1.0))
    return [
        Check("monte_carlo_ks_ftr", ks_ftr, 0.005, monte_carlo=True),
        Check("monte_carlo_ks_composite", ks_comp, 0.005, monte_carlo=True),
    ]


def run_checks(cfg: SimConfig, fault: float = 0.0) -> List[Check]:
    steps: List[Callable] = [
        check_normalization,
        lambda: check_gmgf_paths(fault),
        lambda: check_gmgf_direct(fault),
        check_i1,
        check_degeneracies,
        check_cdf_phi2,
        check_integer_lambda_cdf,
        check_asymptote,
        lambda: check_monte_carlo(cfg),
    ]
    out = []
    for step in steps:
        result = step()
        out.extend(result if isinstance(result, list) else [result])
    return out
