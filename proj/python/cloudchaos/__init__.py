"""Storage-map dynamics and replication loss analysis."""

from ._core import (
    __version__,
    bifurcation_scan,
    build_placement,
    characteristic_coeffs,
    classify_attractor,
    find_fixed_points,
    hopf_alpha,
    iterate,
    jacobian_at,
    loss_curve,
    loss_polynomial,
    lyapunov_spectrum,
    mc_estimate,
    prob_data_loss,
    prob_no_loss,
    routh_classify,
    verify_coefficients,
)

__all__ = [
    "__version__",
    "bifurcation_scan",
    "build_placement",
    "characteristic_coeffs",
    "classify_attractor",
    "find_fixed_points",
    "hopf_alpha",
    "iterate",
    "jacobian_at",
    "loss_curve",
    "loss_polynomial",
    "lyapunov_spectrum",
    "mc_estimate",
    "prob_data_loss",
    "prob_no_loss",
    "routh_classify",
    "verify_coefficients",
]
