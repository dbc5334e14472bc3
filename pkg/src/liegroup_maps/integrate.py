"""Time and arclength integration on the rigid-motion group.

Each step solves the kinematic reconstruction equation in a local chart:
algebra coordinates ``X`` start at zero, evolve by ``Xdot = dmap_inv(-X) V``
for body-frame twist fields (``Xdot = dmap_inv(X) V`` for spatial ones), and
the step closes with ``C <- C @ map(X_h)`` (body) or ``C <- map(X_h) @ C``
(spatial).  The pose is always a product of exact group elements, so
orthonormality is preserved to rounding regardless of step size.

Two steppers are provided: a classical RK4 run through the chart, and an
implicit midpoint rule whose Newton iteration assembles the tangent matrix
from the analytic directional derivative of ``dmap_inv`` plus a finite
difference of the twist field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import ChartDomainError, pose_inverse
from .se3 import (
    se3_cay,
    se3_dcay_inv,
    se3_ddcay_inv,
    se3_ddcay_inv_tangent,
    se3_ddexp_inv,
    se3_ddexp_inv_tangent,
    se3_dexp_inv,
    se3_exp,
)

_FRAMES = ("body", "spatial")
_E3 = np.array([0.0, 0.0, 1.0])


def _cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross carries heavy broadcasting overhead for single 3-vectors
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])

DEFAULT_CONSTANT_TWIST = np.array([0.3, -0.2, 0.4, 1.0, 0.5, -0.3])


class NewtonConvergenceError(RuntimeError):
    """Implicit step failed to converge; carries the last residual norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class IntegrationError(RuntimeError):
    """A step failed mid-run; carries the trajectory up to the failure."""

    def __init__(self, message: str, partial: "Trajectory"):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# Charts, fields, trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateMap:
    """A local chart: value map plus the operators its steppers need.

    ``dmap_inv`` maps a body/spatial twist to the coordinate rate; its value
    at zero is the identity for the exponential chart and half the identity
    for the Cayley chart (whose differential at zero is twice the identity).
    ``ddmap_inv(x, u)`` is the directional derivative of ``dmap_inv`` at x
    along u; ``ddmap_inv_tangent(x, v)`` assembles all six basis directions
    contracted with a fixed twist in one pass (the curvature block of
    implicit tangent matrices).  ``dmap_inv_zero`` caches ``dmap_inv(0)``.
    """

    kind: str
    value: Callable[[np.ndarray], np.ndarray]
    dmap_inv: Callable[[np.ndarray], np.ndarray]
    ddmap_inv: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ddmap_inv_tangent: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dmap_inv_zero: np.ndarray


def exponential_map() -> CoordinateMap:
    return CoordinateMap("exponential", se3_exp, se3_dexp_inv, se3_ddexp_inv,
                         se3_ddexp_inv_tangent, np.eye(6))


def cayley_map() -> CoordinateMap:
    return CoordinateMap("cayley", se3_cay, se3_dcay_inv, se3_ddcay_inv,
                         se3_ddcay_inv_tangent, 0.5 * np.eye(6))


def coordinate_map(kind) -> CoordinateMap:
    """Build a chart from a name; accepts 'exp'/'exponential', 'cay'/'cayley'."""
    if isinstance(kind, CoordinateMap):
        return kind
    if kind in ("exp", "exponential"):
        return exponential_map()
    if kind in ("cay", "cayley"):
        return cayley_map()
    raise ValueError(
        f"unknown coordinate map {kind!r}; expected 'exponential' or 'cayley'"
    )


@dataclass(frozen=True)
class TwistField:
    """Twist along a motion, with optional auxiliary ODE state.

    ``rate(t, pose, aux)`` returns ``(twist, aux_rate)`` where ``twist`` is a
    6-vector in the frame named by ``frame`` and ``aux_rate`` has the shape
    of ``aux0``.  Fields without auxiliary state return an empty rate.
    """

    frame: str
    rate: Callable[[float, np.ndarray, np.ndarray], tuple]
    aux0: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.frame not in _FRAMES:
            raise ValueError(
                f"unknown twist frame {self.frame!r}; expected one of {_FRAMES}"
            )
        object.__setattr__(self, "aux0", np.asarray(self.aux0, dtype=float))


@dataclass(frozen=True)
class Problem:
    """A named initial-value problem for the integrate() driver."""

    name: str
    field: TwistField
    initial_pose: np.ndarray
    invariants: Mapping[str, Callable[[np.ndarray, np.ndarray], float]] = (
        dataclass_field(default_factory=dict)
    )


@dataclass(frozen=True)
class StepResult:
    """One accepted step: new pose, new auxiliary state, chart increment."""

    pose: np.ndarray
    aux: np.ndarray
    coords: np.ndarray
    iterations: int = 0
    residuals: tuple = ()


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled motion with per-sample invariant records."""

    times: np.ndarray
    poses: np.ndarray
    aux: np.ndarray
    step: float
    map_kind: str
    method: str
    problem: str
    invariant_names: tuple
    invariant_values: np.ndarray
    orth_drift: np.ndarray

    @property
    def final_pose(self) -> np.ndarray:
        return self.poses[-1]

    def invariant_drift(self, name: str) -> np.ndarray:
        """Absolute deviation of a named invariant from its initial value."""
        column = self.invariant_names.index(name)
        values = self.invariant_values[:, column]
        return np.abs(values - values[0])


# ---------------------------------------------------------------------------
# Steppers
# ---------------------------------------------------------------------------


def _chart_pose(cmap: CoordinateMap, frame: str, pose: np.ndarray,
                coords: np.ndarray) -> np.ndarray:
    if not coords.any():
        return pose
    local = cmap.value(coords)
    return pose @ local if frame == "body" else local @ pose


def _coordinate_rate(cmap: CoordinateMap, frame: str, coords: np.ndarray,
                     twist: np.ndarray) -> np.ndarray:
    if not coords.any():
        return cmap.dmap_inv_zero @ twist
    sign = -1.0 if frame == "body" else 1.0
    return cmap.dmap_inv(sign * coords) @ twist


def _field_aux(field: TwistField, aux) -> np.ndarray:
    if aux is None:
        return field.aux0.copy()
    return np.asarray(aux, dtype=float).copy()


def mk_rk4_step(cmap: CoordinateMap, field: TwistField, pose: np.ndarray,
                t: float, h: float, aux=None) -> StepResult:
    """Advance one step of classical RK4 run through the chart.

    The chart coordinates restart at zero each step; auxiliary state is
    co-integrated with the same tableau.  Raises ChartDomainError if an
    internal stage leaves the chart.
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    aux = _field_aux(field, aux)

    def rate(tau, coords, z):
        stage_pose = _chart_pose(cmap, field.frame, pose, coords)
        twist, aux_rate = field.rate(tau, stage_pose, z)
        xdot = _coordinate_rate(cmap, field.frame, coords,
                                np.asarray(twist, dtype=float))
        return xdot, np.asarray(aux_rate, dtype=float)

    zero = np.zeros(6)
    k1x, k1z = rate(t, zero, aux)
    k2x, k2z = rate(t + 0.5 * h, 0.5 * h * k1x, aux + 0.5 * h * k1z)
    k3x, k3z = rate(t + 0.5 * h, 0.5 * h * k2x, aux + 0.5 * h * k2z)
    k4x, k4z = rate(t + h, h * k3x, aux + h * k3z)

    coords = (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    aux_next = aux + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    return StepResult(_chart_pose(cmap, field.frame, pose, coords), aux_next,
                      coords)


def _midpoint_field(cmap: CoordinateMap, field: TwistField, pose: np.ndarray,
                    t_mid: float, aux: np.ndarray, coords: np.ndarray,
                    z_end: np.ndarray):
    mid_pose = _chart_pose(cmap, field.frame, pose, 0.5 * coords)
    twist, aux_rate = field.rate(t_mid, mid_pose, 0.5 * (aux + z_end))
    return (np.asarray(twist, dtype=float),
            np.asarray(aux_rate, dtype=float), mid_pose)


def _midpoint_residual(cmap: CoordinateMap, field: TwistField,
                       pose: np.ndarray, t: float, h: float, aux: np.ndarray,
                       state: np.ndarray):
    """Residual of the implicit-midpoint equations plus reusable pieces.

    ``state`` stacks the chart increment (first six entries) with the
    end-of-step auxiliary state.
    """
    sign = -1.0 if field.frame == "body" else 1.0
    coords, z_end = state[:6], state[6:]
    twist, aux_rate, mid_pose = _midpoint_field(cmap, field, pose,
                                                t + 0.5 * h, aux, coords,
                                                z_end)
    if coords.any():
        dmap_mat = cmap.dmap_inv(sign * coords)
    else:
        dmap_mat = cmap.dmap_inv_zero
    residual = np.concatenate([
        coords - h * (dmap_mat @ twist),
        z_end - aux - h * aux_rate,
    ])
    return residual, twist, aux_rate, mid_pose, dmap_mat


def _midpoint_jacobian(cmap: CoordinateMap, field: TwistField,
                       pose: np.ndarray, t: float, h: float, aux: np.ndarray,
                       state: np.ndarray, twist: np.ndarray,
                       aux_rate: np.ndarray, mid_pose: np.ndarray,
                       dmap_mat: np.ndarray, fd_step: float):
    """Newton Jacobian: analytic chart curvature plus forward-difference
    field sensitivities (the midpoint pose is recomputed only for
    chart-coordinate columns since auxiliary columns do not move it)."""
    sign = -1.0 if field.frame == "body" else 1.0
    n = state.size
    t_mid = t + 0.5 * h
    coords, z_end = state[:6], state[6:]

    jacobian = np.eye(n)
    jacobian[:6, :6] -= (h * sign) * cmap.ddmap_inv_tangent(sign * coords,
                                                            twist)
    for j in range(6):
        bumped = coords.copy()
        bumped[j] += fd_step
        twist_up, rate_up, _ = _midpoint_field(cmap, field, pose, t_mid, aux,
                                               bumped, z_end)
        jacobian[:6, j] -= h * (dmap_mat @ (twist_up - twist)) / fd_step
        if n > 6:
            jacobian[6:, j] -= h * (rate_up - aux_rate) / fd_step
    for j in range(6, n):
        bumped = z_end.copy()
        bumped[j - 6] += fd_step
        twist_up, rate_up = field.rate(t_mid, mid_pose, 0.5 * (aux + bumped))
        twist_up = np.asarray(twist_up, dtype=float)
        rate_up = np.asarray(rate_up, dtype=float)
        jacobian[:6, j] -= h * (dmap_mat @ (twist_up - twist)) / fd_step
        jacobian[6:, j] -= h * (rate_up - aux_rate) / fd_step
    return jacobian


def _midpoint_system(cmap: CoordinateMap, field: TwistField, pose: np.ndarray,
                     t: float, h: float, aux: np.ndarray, state: np.ndarray,
                     fd_step: float = 1e-7):
    """Residual and Newton Jacobian of the implicit-midpoint equations."""
    residual, twist, aux_rate, mid_pose, dmap_mat = _midpoint_residual(
        cmap, field, pose, t, h, aux, state)
    jacobian = _midpoint_jacobian(cmap, field, pose, t, h, aux, state, twist,
                                  aux_rate, mid_pose, dmap_mat, fd_step)
    return residual, jacobian


def implicit_midpoint_step(cmap: CoordinateMap, field: TwistField,
                           pose: np.ndarray, t: float, h: float, aux=None,
                           newton_tol: float = 1e-12,
                           max_iters: int = 20) -> StepResult:
    """Advance one implicit-midpoint step, solving the chart equation by Newton.

    The midpoint pose is reached through half the chart increment; the
    chart operator is evaluated at the full increment.  Raises
    NewtonConvergenceError when the residual fails to drop below
    ``newton_tol`` within ``max_iters`` updates.
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    aux = _field_aux(field, aux)
    state = np.concatenate([np.zeros(6), aux])
    residuals = []
    for iteration in range(max_iters + 1):
        (residual, twist, aux_rate, mid_pose,
         dmap_mat) = _midpoint_residual(cmap, field, pose, t, h, aux, state)
        res_norm = float(np.max(np.abs(residual)))
        residuals.append(res_norm)
        if res_norm < newton_tol:
            coords = state[:6]
            return StepResult(_chart_pose(cmap, field.frame, pose, coords),
                              state[6:], coords, iteration, tuple(residuals))
        if iteration == max_iters:
            raise NewtonConvergenceError(
                f"implicit midpoint Newton iteration did not reach "
                f"{newton_tol:g} in {max_iters} updates "
                f"(last residual {res_norm:.3e})",
                res_norm,
            )
        jacobian = _midpoint_jacobian(cmap, field, pose, t, h, aux, state,
                                      twist, aux_rate, mid_pose, dmap_mat,
                                      1e-7)
        state = state - np.linalg.solve(jacobian, residual)
    raise AssertionError("unreachable")


_STEPPERS = {
    "mk_rk4": mk_rk4_step,
    "implicit_midpoint": implicit_midpoint_step,
}


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def _orth_drift(pose: np.ndarray) -> float:
    rot = pose[:3, :3]
    return float(np.max(np.abs(rot.T @ rot - np.eye(3))))


def integrate(problem: Problem, method: str = "mk_rk4",
              map_kind="exponential", h: float = 1e-3, t_end: float = 1.0,
              newton_tol: float = 1e-12,
              max_newton_iters: int = 20) -> Trajectory:
    """Uniformly step a problem from t=0 to t_end, recording invariant drift.

    On a failed step (chart domain violation or Newton breakdown) raises
    IntegrationError carrying the partial trajectory accumulated so far.
    """
    if method not in _STEPPERS:
        raise ValueError(
            f"unknown method {method!r}; expected one of {tuple(_STEPPERS)}"
        )
    if h <= 0.0 or t_end <= 0.0:
        raise ValueError("step size and end time must be positive")
    cmap = coordinate_map(map_kind)
    field = problem.field
    n_steps = max(1, int(round(t_end / h)))

    names = tuple(problem.invariants)
    times, poses, auxes, orth, values = [], [], [], [], []

    def record(t, pose, aux):
        times.append(t)
        poses.append(pose)
        auxes.append(aux)
        orth.append(_orth_drift(pose))
        values.append([problem.invariants[name](pose, aux) for name in names])

    def build() -> Trajectory:
        return Trajectory(
            times=np.array(times),
            poses=np.array(poses),
            aux=np.array(auxes),
            step=h,
            map_kind=cmap.kind,
            method=method,
            problem=problem.name,
            invariant_names=names,
            invariant_values=np.array(values).reshape(len(times), len(names)),
            orth_drift=np.array(orth),
        )

    pose = np.array(problem.initial_pose, dtype=float)
    aux = field.aux0.copy()
    record(0.0, pose, aux)
    for k in range(n_steps):
        t = k * h
        try:
            if method == "implicit_midpoint":
                result = implicit_midpoint_step(
                    cmap, field, pose, t, h, aux,
                    newton_tol=newton_tol, max_iters=max_newton_iters)
            else:
                result = mk_rk4_step(cmap, field, pose, t, h, aux)
        except (ChartDomainError, NewtonConvergenceError) as err:
            raise IntegrationError(
                f"step {k + 1} of {n_steps} (t={t:.6g}) failed: {err}",
                build(),
            ) from err
        pose, aux = result.pose, result.aux
        record((k + 1) * h, pose, aux)
    return build()


# ---------------------------------------------------------------------------
# Benchmark problems
# ---------------------------------------------------------------------------


def make_constant_twist_problem(twist=None, frame: str = "body",
                                initial_pose=None) -> Problem:
    """Rigid motion under a constant twist; the flow is an exact screw."""
    twist = (DEFAULT_CONSTANT_TWIST if twist is None
             else np.asarray(twist, dtype=float)).copy()
    pose0 = np.eye(4) if initial_pose is None else np.asarray(initial_pose,
                                                             dtype=float)

    def rate(t, pose, aux):
        return twist, np.zeros(0)

    return Problem("constant_twist", TwistField(frame, rate), pose0)


def make_heavy_top_problem(inertia=(2.0, 2.0, 1.0), mgl: float = 1.0,
                           chi=(0.0, 0.0, 1.0),
                           momentum0=(0.1, 0.1, 1.0),
                           initial_pose=None) -> Problem:
    """Heavy top: body angular momentum co-integrated with the attitude.

    The body twist is (inertia^-1 pi, 0); the momentum rate combines the
    gyroscopic term with the gravity torque about the centre-of-mass axis
    ``chi``.  Conserved quantities exposed as invariants: total energy and
    the momentum component about the spatial vertical.
    """
    inertia = np.asarray(inertia, dtype=float)
    if inertia.shape != (3,) or np.any(inertia <= 0.0):
        raise ValueError("inertia must be three positive principal moments")
    chi = np.asarray(chi, dtype=float)
    momentum0 = np.asarray(momentum0, dtype=float)
    pose0 = np.eye(4) if initial_pose is None else np.asarray(initial_pose,
                                                              dtype=float)

    def rate(t, pose, momentum):
        omega = momentum / inertia
        vertical = pose[:3, :3].T @ _E3
        torque = _cross3(momentum, omega) + mgl * _cross3(vertical, chi)
        twist = np.zeros(6)
        twist[:3] = omega
        return twist, torque

    def energy(pose, momentum):
        vertical = pose[:3, :3].T @ _E3
        return float(0.5 * momentum @ (momentum / inertia)
                     + mgl * (vertical @ chi))

    def vertical_momentum(pose, momentum):
        return float(momentum @ (pose[:3, :3].T @ _E3))

    field = TwistField("body", rate, aux0=momentum0)
    invariants = {"energy": energy, "vertical_momentum": vertical_momentum}
    return Problem("heavy_top", field, pose0, invariants)


def make_problem(name: str, **overrides) -> Problem:
    """Build a benchmark problem by name (constant_twist or heavy_top)."""
    if name == "constant_twist":
        return make_constant_twist_problem(**overrides)
    if name == "heavy_top":
        return make_heavy_top_problem(**overrides)
    raise ValueError(
        f"unknown problem {name!r}; expected 'constant_twist' or 'heavy_top'"
    )


# ---------------------------------------------------------------------------
# Beam reconstruction in arclength
# ---------------------------------------------------------------------------


def helix_strain(curvature: float = 0.5):
    """Constant strain: unit stretch along the first axis plus fixed twist."""
    base = np.array([0.0, 0.0, curvature, 1.0, 0.0, 0.0])

    def strain(s):
        return base

    return strain


def varying_strain(length: float, base_curvature: float = 0.5,
                   wobble: float = 0.3):
    """Smoothly varying curvature profile with unit stretch."""

    def strain(s):
        curvature = base_curvature + wobble * math.sin(2.0 * math.pi * s
                                                       / length)
        return np.array([0.0, 0.0, curvature, 1.0, 0.0, 0.0])

    return strain


def beam_reconstruct(strain, length: float, segments: int,
                     map_kind="exponential",
                     problem_name: str = "beam") -> Trajectory:
    """Reconstruct a beam centreline from a body strain profile.

    Piecewise update: each segment freezes the strain at its midpoint and
    advances ``C <- C @ map(h * dmap_inv(0) @ strain)``; the ``dmap_inv(0)``
    factor makes the segment increment consistent for every chart
    convention.  For constant strain the exponential chart is exact with a
    single segment.
    """
    if segments < 1:
        raise ValueError("need at least one segment")
    if length <= 0.0:
        raise ValueError("length must be positive")
    cmap = coordinate_map(map_kind)
    h = length / segments
    scale = cmap.dmap_inv_zero

    times, poses, orth = [0.0], [np.eye(4)], [0.0]
    pose = poses[0]
    for k in range(segments):
        mid = (k + 0.5) * h
        coords = h * (scale @ np.asarray(strain(mid), dtype=float))
        pose = pose @ cmap.value(coords)
        times.append((k + 1) * h)
        poses.append(pose)
        orth.append(_orth_drift(pose))
    n = len(times)
    return Trajectory(
        times=np.array(times),
        poses=np.array(poses),
        aux=np.zeros((n, 0)),
        step=h,
        map_kind=cmap.kind,
        method="piecewise",
        problem=problem_name,
        invariant_names=(),
        invariant_values=np.zeros((n, 0)),
        orth_drift=np.array(orth),
    )


# ---------------------------------------------------------------------------
# Convergence measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceResult:
    """Errors against a fine-step reference and the observed orders."""

    method: str
    step_sizes: tuple
    errors: tuple
    pairwise_orders: tuple
    slope: float


def final_pose_deviation(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Left-invariant pose error: max-abs entry of ref^-1 @ candidate - I."""
    return float(np.max(np.abs(pose_inverse(reference) @ candidate
                               - np.eye(4))))


def convergence_study(problem: Problem, methods: Sequence[str], map_kind,
                      h_list: Sequence[float], t_end: float,
                      reference_h: float = None) -> dict:
    """Measure observed order for each method against a shared reference.

    The reference trajectory is one mk_rk4 run with the exponential chart at
    ``reference_h`` (min(h_list)/8 unless given); its truncation error is
    far below every candidate's.  Errors use the left-invariant final-pose
    deviation; the slope is the least-squares fit of log error vs log h.
    """
    h_list = sorted(h_list, reverse=True)
    if len(h_list) < 3:
        raise ValueError("need at least three step sizes")
    if reference_h is None:
        reference_h = min(h_list) / 8.0
    for h in [*h_list, reference_h]:
        if abs(round(t_end / h) * h - t_end) > 1e-9 * max(1.0, abs(t_end)):
            raise ValueError(
                f"step size {h!r} does not divide t_end={t_end!r}; all runs "
                "must stop at the same final time"
            )
    reference = integrate(problem, "mk_rk4", "exponential", reference_h, t_end)
    target = reference.final_pose

    results = {}
    for method in methods:
        errors = []
        for h in h_list:
            trajectory = integrate(problem, method, map_kind, h, t_end)
            errors.append(final_pose_deviation(target, trajectory.final_pose))
        logs_h = np.log(h_list)
        logs_e = np.log(errors)
        pairwise = tuple(
            float((logs_e[i] - logs_e[i + 1]) / (logs_h[i] - logs_h[i + 1]))
            for i in range(len(h_list) - 1)
        )
        slope = float(np.polyfit(logs_h, logs_e, 1)[0])
        results[method] = ConvergenceResult(method, tuple(h_list),
                                            tuple(errors), pairwise, slope)
    return results
