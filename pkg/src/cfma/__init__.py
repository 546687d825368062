"""Compute-forward multiple access (CFMA) over two-user Gaussian fast-fading MACs.

Rates are in bits per real channel use.  The main entry points are
re-exported here; see the submodules for the full surface.
"""

from .channel_stats import (
    ChannelModel,
    ChannelMoments,
    Degenerate,
    Empirical,
    Exact,
    ExpectationEstimate,
    GaussHermite,
    Gaussian,
    MonteCarlo,
    effective_gain_samples,
    ergodic_capacity,
    expect,
    moments,
    parse_gain,
)
from .conditions import (
    GammaGrid,
    GammaInterval,
    SumCapacityReport,
    check_sum_capacity,
    condition_general_a,
    condition_iff,
    condition_iid_gaussian,
    condition_mean_ratio,
    condition_sufficient,
    f_integrand,
    gamma_range_scan,
    sufficient_gamma_intervals,
)
from .errors import (
    CfmaError,
    DegenerateCoefficients,
    MethodUnsupported,
    NonFiniteIntegrand,
    NotIIDGaussian,
    SingularGamma,
    ZeroCoefficient,
    ZeroMean,
)
from .explorer import (
    ClassificationCell,
    RegionTrace,
    classify_point,
    coeff_comparison,
    gaussian_template,
    sweep_classify,
    trace_region,
)
from .rates import (
    CoefficientPair,
    RateBreakdown,
    RatePair,
    Scaling,
    achievable_rate_pair,
    capacity_pentagon,
    m_integrand,
    rate_first,
    rate_second,
)

__version__ = "0.1.0"
