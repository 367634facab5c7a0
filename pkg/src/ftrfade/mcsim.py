"""Monte Carlo channel simulator used as an independent oracle.

Samples are built from the physical model: two specular phasors sharing one
unit-mean gamma power fluctuation, plus a circular Gaussian diffuse term.
Streams come from ``SeedSequence.spawn`` over the counter-based Philox
generator, so the sample set depends only on (seed, stream_count,
sample_count) and never on how many workers ran the streams.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .channel import FtrParams
from .composite import CompositeParams

DEFAULT_SEED = 0x5EEDF7A0


@dataclass(frozen=True)
class SimConfig:
    sample_count: int
    seed: int = DEFAULT_SEED
    stream_count: int = 8
    workers: Optional[int] = None

    def __post_init__(self):
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise ValueError("sample_count must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_count) != self.stream_count or self.stream_count < 1:
            raise ValueError("stream_count must be a positive integer")

    def stream_sizes(self):
        base, extra = divmod(self.sample_count, self.stream_count)
        return [base + (i < extra) for i in range(self.stream_count)]

    def generators(self):
        children = np.random.SeedSequence(self.seed).spawn(self.stream_count)
        return [np.random.Generator(np.random.Philox(ss)) for ss in children]


class SpecularPair(NamedTuple):
    v1: float
    v2: float


class EmpiricalDistribution:
    """Sorted sample set with ECDF and moment helpers."""

    def __init__(self, samples):
        samples = np.sort(np.asarray(samples, dtype=float))
        samples.setflags(write=False)
        self.samples = samples

    @property
    def count(self) -> int:
        return self.samples.size

    def __len__(self):
        return self.count

    def ecdf(self, x):
        return np.searchsorted(self.samples, x, side="right") / self.count

    def mean(self) -> float:
        return float(self.samples.mean())

    def moment(self, n: float) -> float:
        return float(np.mean(self.samples**n))

    def standard_error(self, n: float = 1.0) -> float:
        """Standard error of the sample n-th moment."""
        return float(np.std(self.samples**n, ddof=1) / math.sqrt(self.count))


def solve_specular_amplitudes(K: float, delta: float, sigma2: float) -> SpecularPair:
    """Amplitudes V1 >= V2 reproducing K and delta for diffuse power 2*sigma2."""
    S = 2.0 * sigma2 * K
    root = math.sqrt(max(0.0, 1.0 - delta * delta))
    return SpecularPair(math.sqrt(S * (1.0 + root) / 2.0), math.sqrt(S * (1.0 - root) / 2.0))


def draw_ftr_power(p: FtrParams, rng: np.random.Generator, size: int) -> np.ndarray:
    """Unsorted FTR power draws |V|^2 from the two-ray physical model."""
    v1, v2 = solve_specular_amplitudes(p.K, p.delta, p.sigma2)
    zeta = rng.standard_gamma(p.m, size) / p.m
    phi = rng.uniform(0.0, 2.0 * np.pi, (2, size))
    diffuse = rng.normal(0.0, math.sqrt(p.sigma2), (2, size))
    amp = np.sqrt(zeta)  # one fluctuation shared by both specular rays
    re = amp * (v1 * np.cos(phi[0]) + v2 * np.cos(phi[1])) + diffuse[0]
    im = amp * (v1 * np.sin(phi[0]) + v2 * np.sin(phi[1])) + diffuse[1]
    return re * re + im * im


def draw_inverse_gamma(lam: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Unit-mean inverse-gamma draws (lam - 1) / Gamma(lam, 1)."""
    return (lam - 1.0) / rng.standard_gamma(lam, size)


def draw_composite(c: CompositeParams, rng: np.random.Generator, size: int) -> np.ndarray:
    v = draw_ftr_power(c.fading, rng, size)
    g = draw_inverse_gamma(c.shadow.lam, rng, size)
    return c.mean_power * g * v


def _run_streams(cfg: SimConfig, draw: Callable) -> EmpiricalDistribution:
    jobs = list(zip(cfg.generators(), cfg.stream_sizes()))
    if cfg.workers and cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda job: draw(*job), jobs))
    else:
        parts = [draw(*job) for job in jobs]
    return EmpiricalDistribution(np.concatenate(parts))


def sample_ftr_power(p: FtrParams, cfg: SimConfig) -> EmpiricalDistribution:
    return _run_streams(cfg, lambda rng, n: draw_ftr_power(p, rng, n))


def sample_composite(c: CompositeParams, cfg: SimConfig) -> EmpiricalDistribution:
    return _run_streams(cfg, lambda rng, n: draw_composite(c, rng, n))


def ks_distance(e: EmpiricalDistribution, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance between the sample and ``cdf``.

    ``cdf`` is called with the sorted sample array and again just below
    it, so the lower side uses the left limits F(x-). For a continuous
    ``cdf`` both calls agree; for a step ``cdf`` (such as the sample's own
    ECDF) this gives the exact supremum over x.
    """
    x = e.samples
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    F_left = np.asarray(cdf(np.nextafter(x, -np.inf)), dtype=float)
    upper = np.arange(1, n + 1) / n - F
    lower = F_left - np.arange(0, n) / n
    return float(max(upper.max(), lower.max(), 0.0))


def tabulated_cdf(cdf: Callable, scale: float, points: int = 1501) -> Callable:
    """Monotone interpolant of ``cdf`` on [0, inf) for bulk evaluation.

    Nodes are uniform in u = x / (x + scale), so the grid covers the whole
    half-line with resolution concentrated where the mass is.
    """
    u = np.linspace(0.0, 1.0, points)[:-1]
    x = scale * u / (1.0 - u)
    vals = np.empty_like(x)
    vals[0] = 0.0
    vals[1:] = np.asarray(cdf(x[1:]), dtype=float)
    u = np.append(u, 1.0)
    vals = np.maximum.accumulate(np.append(vals, 1.0))
    interp = PchipInterpolator(u, vals)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.clip(interp(t / (t + scale)), 0.0, 1.0)

    return evaluate
