"""Univariate statistical depth transforms, depth-induced TVD and LV-TVD estimators."""

from .depth_laws import CrossDepthLaw, SingularityError, reference_law
from .depth_transforms import (
    DepthKind,
    DepthSample,
    KernelSpec,
    hd_analytic,
    hd_empirical,
    kd_empirical,
    qt_analytic,
    qt_empirical,
    sd_analytic,
    sd_empirical,
    transform_sample,
)
from .distributions import (
    ContinuousDistribution,
    Custom,
    DomainError,
    Gaussian,
    SdReference,
    SortedSample,
    UniformInterval,
    eval_cdf,
    eval_pdf,
    eval_quantile,
    sample,
)
from .divergence import (
    InducedDivergenceResult,
    NonconvergenceError,
    QuadratureConfig,
    check_equality_conditions,
    f_divergence_between_densities,
    gaussian_tvd_exact,
    induced_tvd,
    mmd_squared_direct,
    mmd_squared_via_depth,
    tvd_between_densities,
    tvd_between_distributions,
)
from .experiments import ExperimentConfig, ExperimentReport, run_reference_experiment
from .lvtvd import (
    ChainLp,
    LpSolution,
    lvtvd_one_sided_uniform,
    lvtvd_two_sample,
    refined_uniform_sample,
    solve_chain_lp,
)

__version__ = "0.1.0"
