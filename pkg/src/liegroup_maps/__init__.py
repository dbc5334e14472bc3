"""Closed-form exponential and Cayley coordinate maps on the rotation and
rigid-motion groups, their trivialized differentials, inverses and
directional derivatives, plus Lie-group ODE integrators built on them."""

from .core import (
    Ad6,
    ChartDomainError,
    Screw,
    ad6,
    hat3,
    hat6,
    is_rotation,
    make_pose,
    pose_compose,
    pose_inverse,
    rotation_of,
    translation_of,
    vee3,
    vee6,
)
from .scalars import (
    DEXPINV_DOMAIN_LIMIT,
    SERIES_WINDOW,
    SMALL_ANGLE_THRESHOLD,
    TrigCoeffs,
    ensure_dexp_inv_domain,
    force_branch,
    trig_coeff_derivs,
    trig_coeffs,
)
from .oracle import (
    SeriesConfig,
    fd_directional,
    resolvent_cay,
    series_dexp,
    series_dexp_inv,
    series_exp,
)
from .so3 import (
    sigma,
    so3_cay,
    so3_cay_inv,
    so3_dcay,
    so3_dcay_inv,
    so3_ddcay,
    so3_ddcay_inv,
    so3_ddexp,
    so3_ddexp_inv,
    so3_dexp,
    so3_dexp_inv,
    so3_exp,
    so3_log,
)
from .se3 import (
    CayleyTranslationMismatch,
    adjoint_cay,
    adjoint_cay_A_forms,
    adjoint_vs_se3_cay_mismatch,
    se3_cay,
    se3_cay_inv,
    se3_dcay,
    se3_dcay_inv,
    se3_ddcay,
    se3_ddcay_inv,
    se3_ddexp,
    se3_ddexp_inv,
    se3_dexp,
    se3_dexp_adform,
    se3_dexp_inv,
    se3_dexp_inv_adform,
    se3_exp,
    se3_log,
)
from .integrate import (
    DEFAULT_CONSTANT_TWIST,
    ConvergenceResult,
    CoordinateMap,
    IntegrationError,
    NewtonConvergenceError,
    Problem,
    StepResult,
    Trajectory,
    TwistField,
    beam_reconstruct,
    cayley_map,
    convergence_study,
    coordinate_map,
    exponential_map,
    final_pose_deviation,
    helix_strain,
    implicit_midpoint_step,
    integrate,
    make_constant_twist_problem,
    make_heavy_top_problem,
    make_problem,
    mk_rk4_step,
    varying_strain,
)

__version__ = "0.1.0"
