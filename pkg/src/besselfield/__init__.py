"""besselfield: the Laguerre random-matrix field, its determinantal
correlation kernels along time-like and space-like paths, hard-edge Bessel
limits, Fredholm gap probabilities, and Gibbs-resampling diagnostics."""

__version__ = "0.1.0"

from .errors import (
    AccuracyWarning,
    DomainError,
    OrderingError,
    RangeError,
    SimulationError,
    StarvationError,
)
from .fredholm import (
    CountDistribution,
    DiscretizedOperator,
    IntervalSet,
    count_distribution,
    discretize,
    expected_count,
    gap_probability,
    interval_set,
    refinement_delta,
)
from .gibbs import (
    BridgeConfiguration,
    InterlacingWindow,
    chain_interlaces,
    gibbs_resample,
    interlaces,
    sample_bridge,
    sasamoto_det,
    window_from_lines,
)
from .kernels import (
    BESSEL_LIMIT,
    FINITE_GAUGED,
    FINITE_RAW,
    KernelSpec,
    KernelValue,
    kernel_bessel,
    kernel_finite,
    kernel_finite_direct,
    kernel_gauged,
    kernel_matrix,
    kernel_value,
)
from .paths import SPACE_LIKE, TIME_LIKE, PathPoint, classify_path
from .quadrature import QuadratureRule
from .simulate import (
    FieldGrid,
    FieldSample,
    RngStream,
    ScaledSample,
    batch_eigenvalues,
    hard_edge_rescale,
    iter_samples,
    sample_field,
)
from .special import SeriesPolicy, bessel_i, bessel_i_scaled, bessel_j, g_alpha, hankel_transform, laguerre, log_gamma_ratio
from .transitions import (
    SpacelikePair,
    TimelikePair,
    phi,
    phi_bar,
    psi,
    psi_bar,
    q_bar_kernel,
    q_kernel,
    t_kernel,
    w_bar_kernel,
    w_kernel,
)
from .verify import BinnedEstimate, ComparisonReport, compare, empirical_gap, empirical_rho1, empirical_rho2
