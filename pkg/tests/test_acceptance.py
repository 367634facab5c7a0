"""Acceptance criteria 1-9, each printing one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are printed even
with output capture on) or ``python tests/test_acceptance.py``.
"""
import itertools
import math
import time

import numpy as np
import pytest

from ftrfade.channel import (
    FtrParams,
    GmgfQuery,
    I1Args,
    RsParams,
    appendix_i1,
    ftr_cdf,
    ftr_gmgf,
    ftr_pdf,
    rs_pdf,
)
from ftrfade.composite import (
    CompositeParams,
    OutageQuery,
    composite_cdf,
    composite_pdf,
    outage_asymptotic,
    outage_exact,
)
from ftrfade.mcsim import SimConfig, ks_distance, sample_composite, sample_ftr_power, tabulated_cdf
from ftrfade.quadrature import QuadratureSpec, integrate_finite, integrate_semi_infinite

TIGHT = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=4000)
FIG3_PAIRS = ((2.0, 4.0), (10.0, 4.0), (2.0, 15.0), (10.0, 15.0))


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, elapsed, budget):
        ok = bool(ok) and elapsed < budget
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}; {elapsed:.1f} s (budget {budget} s)"
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def test_criterion_1_normalization(report):
    grid = itertools.product(
        (0.5, 1.0, 1.5, 2.5, 5.0, 20.0), (0.0, 1.0, 4.0, 15.0), (0.0, 0.3, 0.7, 1.0)
    )
    worst = 0.0
    with Timer() as t:
        for m, K, d in grid:
            p = FtrParams(1.0, m, K, d)
            total = integrate_semi_infinite(lambda x: ftr_pdf(x, p), 0.0, TIGHT)
            worst = max(worst, abs(total - 1.0))
    assert report(1, "pdf normalization on 6x4x4 grid", worst < 1e-8,
                  f"max |int - 1| = {worst:.2e} < 1e-8", t.elapsed, 30)


GMGF_SETS = [
    FtrParams(1.0, 2.5, 4.0, 0.3),
    FtrParams(1.0, 1.0, 1.0, 0.7),
    FtrParams(2.0, 0.75, 10.0, 0.9),
    FtrParams(0.5, 5.0, 15.0, 1.0),
]


def test_criterion_2_gmgf_three_routes(report):
    worst = 0.0
    with Timer() as t:
        for p in GMGF_SETS:
            for n in range(6):
                for s in (0.0, -0.1, -1.0, -10.0):
                    q = GmgfQuery(n, s)
                    closed = ftr_gmgf(q, p, "closed")
                    phase = ftr_gmgf(q, p, "quadrature")
                    direct = integrate_semi_infinite(
                        lambda x: x**n * np.exp(s * x) * ftr_pdf(x, p), 0.0, TIGHT, scale=p.mean_power
                    )
                    for a, b in ((closed, phase), (closed, direct), (phase, direct)):
                        worst = max(worst, abs(a - b) / abs(b))
    assert report(2, "GMGF closed form / phase quadrature / direct integral", worst < 1e-7,
                  f"max pairwise rel diff = {worst:.2e} < 1e-7", t.elapsed, 60)


def test_criterion_3_appendix_integral(report):
    grid = itertools.product((0, 1, 3, 6), (0.5, 1.0, 2.5, 4.0), (-0.9, -0.3, 0.4, 1.0), (-0.8, -0.2, 0.3, 0.9))
    worst = 0.0
    with Timer() as t:
        for P1, P2, al, be in grid:
            direct = integrate_finite(
                lambda th: (1 + al * np.cos(th)) ** P1 / (1 + be * np.cos(th)) ** P2, 0.0, math.pi, TIGHT
            )
            worst = max(worst, abs(appendix_i1(I1Args(P1, P2, al, be)) / direct - 1.0))
    assert report(3, "phase integral closed form on 4^4 grid", worst < 1e-9,
                  f"max rel diff = {worst:.2e} < 1e-9", t.elapsed, 10)


def test_criterion_4_degeneracies(report):
    x = np.linspace(0.0, 12.0, 100)
    worst_rs = worst_exp = 0.0
    with Timer() as t:
        for gb, m, K in ((1.0, 2.0, 4.0), (3.0, 0.6, 10.0), (0.5, 7.0, 1.0)):
            ratio = ftr_pdf(x, FtrParams(gb, m, K, 0.0)) / rs_pdf(x, RsParams(gb, m, K))
            worst_rs = max(worst_rs, float(np.max(np.abs(ratio - 1.0))))
        for gb, m, d in ((1.0, 1.5, 0.6), (2.0, 4.0, 1.0), (0.7, 0.5, 0.0)):
            ratio = ftr_pdf(x, FtrParams(gb, m, 0.0, d)) / (np.exp(-x / gb) / gb)
            worst_exp = max(worst_exp, float(np.max(np.abs(ratio - 1.0))))
    worst = max(worst_rs, worst_exp)
    assert report(4, "delta=0 -> Rician shadowed, K=0 -> exponential", worst < 1e-10,
                  f"max rel diff {worst_rs:.1e} / {worst_exp:.1e} < 1e-10", t.elapsed, 5)


@pytest.mark.slow
def test_criterion_5_monte_carlo_ftr(report):
    cfg = SimConfig(1_000_000)
    results = []
    with Timer() as t:
        for p in (FtrParams(1.0, 1.5, 4.0, 0.2), FtrParams(1.0, 3.0, 4.0, 0.2), FtrParams(1.0, 2.0, 4.0, 0.2)):
            ks = ks_distance(sample_ftr_power(p, cfg), tabulated_cdf(lambda x: ftr_cdf(x, p), p.mean_power))
            results.append(ks)
    worst = max(results)
    detail = "KS " + ", ".join(f"{v:.1e}" for v in results) + " < 5e-3"
    assert report(5, "FTR CDF vs 1e6 simulated samples", worst < 5e-3, detail, t.elapsed, 120)


@pytest.mark.slow
def test_criterion_6_composite(report):
    cfg = SimConfig(1_000_000)
    worst_ks = worst_mc_mean = worst_mean = 0.0
    with Timer() as t:
        for lam, z_bar in itertools.product((2.0, 5.0), (1.0, 5.0)):
            c = CompositeParams.from_values(z_bar, 2.0, 4.0, 0.2, lam)
            emp = sample_composite(c, cfg)
            worst_ks = max(worst_ks, ks_distance(emp, tabulated_cdf(lambda z: composite_cdf(z, c), z_bar)))
            worst_mc_mean = max(worst_mc_mean, abs(emp.mean() / z_bar - 1.0))
            mean = integrate_semi_infinite(lambda z: z * composite_pdf(z, c), 0.0, TIGHT, scale=z_bar)
            worst_mean = max(worst_mean, abs(mean / z_bar - 1.0))
    ok = worst_ks < 5e-3 and worst_mc_mean < 1e-2 and worst_mean < 1e-5
    detail = (f"KS {worst_ks:.1e} < 5e-3, sample mean rel {worst_mc_mean:.1e} < 1e-2, "
              f"analytic mean rel {worst_mean:.1e} < 1e-5")
    assert report(6, "composite model vs simulation", ok, detail, t.elapsed, 180)


@pytest.mark.slow
def test_criterion_7_outage(report):
    ratios = np.logspace(-3.0, 0.0, 5)
    cfg = SimConfig(10_000_000)
    worst_z = 0.0
    exact = {}
    with Timer() as t:
        for m, K in FIG3_PAIRS:
            c = CompositeParams.from_values(1.0, m, K, 0.3, 2.0)
            exact[m, K] = np.array([outage_exact(OutageQuery(r, 1.0), c) for r in ratios])
            freq = sample_composite(c, cfg).ecdf(ratios)
            se = np.sqrt(exact[m, K] * (1.0 - exact[m, K]) / cfg.sample_count)
            worst_z = max(worst_z, float(np.max(np.abs(freq - exact[m, K]) / se)))
    ordered = (
        np.all(exact[2.0, 15.0] < exact[2.0, 4.0])
        and np.all(exact[10.0, 15.0] < exact[10.0, 4.0])
        and np.all(exact[10.0, 4.0] < exact[2.0, 4.0])
        and np.all(exact[10.0, 15.0] < exact[2.0, 15.0])
    )
    detail = f"max |freq - exact| = {worst_z:.2f} SE < 3; orderings in K and m {'hold' if ordered else 'broken'}"
    assert report(7, "outage vs 1e7 simulated draws", worst_z < 3 and ordered, detail, t.elapsed, 180)


def test_criterion_8_asymptote(report):
    worst_ratio = worst_slope = 0.0
    r = np.geomspace(1e-5, 1e-3, 21)
    with Timer() as t:
        for m, K in FIG3_PAIRS:
            c = CompositeParams.from_values(1.0, m, K, 0.3, 2.0)
            q = OutageQuery(1e-4, 1.0)
            worst_ratio = max(worst_ratio, abs(outage_exact(q, c) / outage_asymptotic(q, c) - 1.0))
            slope = np.polyfit(np.log(r), np.log(composite_cdf(r, c)), 1)[0]
            worst_slope = max(worst_slope, abs(slope - 1.0))
    ok = worst_ratio < 0.05 and worst_slope < 0.02
    detail = f"|exact/asymptotic - 1| = {worst_ratio:.1e} < 0.05, |slope - 1| = {worst_slope:.1e} < 0.02"
    assert report(8, "asymptotic outage and diversity order", ok, detail, t.elapsed, 30)


def test_criterion_9_integer_lambda_cdf(report):
    z = np.geomspace(1e-3, 50.0, 50)
    worst = 0.0
    with Timer() as t:
        for lam in (2, 3, 5):
            c = CompositeParams.from_values(1.0, 2.0, 4.0, 0.2, lam)
            diff = composite_cdf(z, c, "closed") - composite_cdf(z, c, "quadrature")
            worst = max(worst, float(np.max(np.abs(diff))))
    assert report(9, "integer-lambda finite-sum CDF vs pdf quadrature", worst < 1e-7,
                  f"max abs diff = {worst:.2e} < 1e-7", t.elapsed, 60)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
