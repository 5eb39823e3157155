"""Robust covariate-specific ROC analysis (Huber M-estimation with B-spline means)."""

from ._core import (
    DataError,
    Error,
    FitConfig,
    NumericalError,
    PopulationFit,
    PopulationPair,
    RobustFit,
    Scenario,
    UsageError,
    WeightedEcdf,
    __version__,
    auc,
    auc_simpson,
    bspline_design,
    fit_population,
    generate,
    huber_psi,
    huber_rho,
    huber_weight,
    irls_fit,
    knot_positions,
    mad_scale,
    ols_fit,
    raic,
    residual_bootstrap,
    robust_unconditional_auc,
    roc_curve,
    run_study,
    select_knots,
    true_auc,
    unconditional_auc,
    youden,
)


def fit_pair(y_nd, x_nd, y_d, x_d, knots, config=None, estimator="robust"):
    """Fit both groups with the same knot counts and return a PopulationPair."""
    config = config or FitConfig()
    return PopulationPair(
        fit_population(y_nd, x_nd, knots, config, estimator),
        fit_population(y_d, x_d, knots, config, estimator),
    )
