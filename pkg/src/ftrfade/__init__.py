"""Fluctuating two-ray fading, its generalized MGF and the IG/FTR composite model."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .channel import (
    FtrParams,
    GmgfQuery,
    I1Args,
    InvalidParameter,
    RsParams,
    appendix_i1,
    ftr_cdf,
    ftr_gmgf,
    ftr_gmgf_conditional,
    ftr_moment,
    ftr_pdf,
    log_ftr_gmgf,
    rs_cdf,
    rs_pdf,
)
from .composite import (
    CompositeParams,
    OutageQuery,
    ShadowParams,
    amplitude_cdf,
    amplitude_pdf,
    composite_cdf,
    composite_pdf,
    outage_asymptotic,
    outage_exact,
)
from .mcsim import DEFAULT_SEED, EmpiricalDistribution, SimConfig, sample_composite, sample_ftr_power
from .specfun import NumericFailure, gauss_2f1, kummer_1f1, log_kummer_1f1, phi2_bivariate
from .tables import CurveTable

__all__ = [name for name in dir() if not name.startswith("_")]
