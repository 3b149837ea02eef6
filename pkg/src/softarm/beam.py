"""Planar large-deflection (elastica) solver for the segmented soft arm.

The arm is a clamped rod loaded by a follower thrust at the motor
station, distributed weight, and tendon point moments at the fold
stations. Geometry is piecewise constant per segment; integration is
fixed-step RK4 and the free-tip condition is met by shooting on the root
curvature. Coordinates: x horizontal, z up, theta measured from
horizontal (positive = tip up).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import LargeDeflectionWarning, NoConvergence, NonPhysicalMaterial
from .material import BeamTestGeometry, LinearElasticParams, MooneyRivlinParams

GRAVITY = 9.81


@dataclass(frozen=True)
class Segment:
    """One fold of the arm's lower surface: inclination [deg] and length [m]."""

    fold_angle_deg: float
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("segment length must be > 0")


@dataclass(frozen=True)
class ArmGeometry:
    """Segmented arm geometry.

    section_inertia: second moment of area per segment [m^4] (piecewise
    constant along the arc length). motor_station is the normalized
    position x/c of the motor in (0, 1].
    """

    segments: tuple[Segment, ...]
    section_inertia: tuple[float, ...]
    section_half_depth: float
    initial_droop_deg: float = 0.0
    motor_station: float = 1.0
    linear_density: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "section_inertia", tuple(self.section_inertia))
        if not 1 <= len(self.segments) <= 8:
            raise ValueError("segment count must be in [1, 8]")
        if len(self.section_inertia) != len(self.segments):
            raise ValueError("one inertia value per segment is required")
        if any(i <= 0 for i in self.section_inertia):
            raise ValueError("section inertia must be > 0")
        if not 0.0 < self.motor_station <= 1.0:
            raise ValueError("motor_station must be in (0, 1]")
        if self.section_half_depth <= 0:
            raise ValueError("section_half_depth must be > 0")
        if self.linear_density < 0:
            raise ValueError("linear_density must be >= 0")

    @property
    def total_length(self) -> float:
        return sum(seg.length for seg in self.segments)

    @property
    def segment_bounds(self) -> tuple[float, ...]:
        """Cumulative arc-length boundaries, root 0 through the tip."""
        bounds = [0.0]
        for seg in self.segments:
            bounds.append(bounds[-1] + seg.length)
        return tuple(bounds)

    @property
    def fold_stations(self) -> tuple[float, ...]:
        """Arc lengths of the interior folds (a moment at the clamped root
        would be absorbed by the support, so the root fold is excluded)."""
        return self.segment_bounds[1:-1]

    @property
    def total_turning_deg(self) -> float:
        return sum(seg.fold_angle_deg for seg in self.segments)

    def segment_index(self, s: float) -> int:
        bounds = self.segment_bounds
        for i in range(len(self.segments)):
            if s < bounds[i + 1]:
                return i
        return len(self.segments) - 1

    def inertia_at(self, s: float) -> float:
        return self.section_inertia[self.segment_index(s)]


@dataclass(frozen=True)
class LoadCase:
    """External loads on the arm.

    thrust: follower force [N] normal to the local tangent at the motor
    station (positive pushes the arm up). gravity: acceleration magnitude
    along -z [m/s^2]. Tendon tension acts as point moments
    -tension*eccentricity at every interior fold. point_moments are extra
    (arc_length [m], moment [N m]) pairs for constructed load cases.
    """

    thrust: float = 0.0
    gravity: float = GRAVITY
    tendon_tension: float = 0.0
    tendon_eccentricity: float = 0.0
    point_moments: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.thrust < 0:
            raise ValueError("thrust must be >= 0")
        if self.tendon_tension < 0:
            raise ValueError("tendon_tension must be >= 0")
        object.__setattr__(self, "point_moments", tuple(tuple(p) for p in self.point_moments))


@dataclass(frozen=True)
class SolverSettings:
    """Solver knobs. shooting_tolerance is relative to the applied moment
    scale (N m of tip-moment defect per N m of load), which keeps the
    solved shape invariant under joint load/stiffness scaling."""

    integration_steps: int = 256
    shooting_tolerance: float = 1e-9
    max_shooting_iterations: int = 2000

    def __post_init__(self):
        if self.integration_steps < 16:
            raise ValueError("integration_steps must be >= 16")
        if self.shooting_tolerance <= 0:
            raise ValueError("shooting_tolerance must be > 0")


@dataclass(frozen=True)
class BeamSolution:
    """Solved centerline shape and derived bending quantities.

    stations: array of shape (n, 4) with columns (s, x, z, theta).
    moments/inertias: internal bending moment [N m] and section inertia
    [m^4] at each station, kept for the stress proxy.
    """

    stations: np.ndarray
    moments: np.ndarray
    inertias: np.ndarray
    tip_angle_deg: float
    max_curvature: float
    max_curvature_s: float
    max_fiber_strain: float
    residual: float
    contact_expected: bool = False

    @property
    def s(self) -> np.ndarray:
        return self.stations[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.stations[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.stations[:, 2]

    @property
    def theta(self) -> np.ndarray:
        return self.stations[:, 3]


def linear_tip_deflection(e_modulus: float, geometry: BeamTestGeometry, force: float) -> float:
    """Small-deflection cantilever tip displacement F L^3 / (3 E I) [m].

    Warns when the result leaves the small-deflection range (delta > L/10).
    """
    if e_modulus <= 0:
        raise NonPhysicalMaterial("modulus must be > 0")
    delta = force * geometry.length**3 / (3.0 * e_modulus * geometry.section_inertia)
    if abs(delta) > 0.1 * geometry.length:
        warnings.warn(
            f"deflection {delta:.4g} m exceeds 10% of length; linear theory is inaccurate",
            LargeDeflectionWarning,
            stacklevel=2,
        )
    return delta


def effective_modulus(material) -> float:
    """Constant Young's modulus [Pa] used by the solver for a material input."""
    if isinstance(material, LinearElasticParams):
        e = material.youngs_modulus
    elif isinstance(material, MooneyRivlinParams):
        e = 6.0 * (material.c10 + material.c01) * 1e6
    elif isinstance(material, (int, float)):
        e = float(material)
    else:
        raise TypeError(f"unsupported material type {type(material)!r}")
    if e <= 0:
        raise NonPhysicalMaterial(f"effective modulus {e:.4g} Pa is not positive")
    return e


def _load_events(geometry: ArmGeometry, loads: LoadCase) -> dict[float, float]:
    """Map of arc length -> applied point moment [N m]."""
    events: dict[float, float] = {}
    if loads.tendon_tension > 0 and loads.tendon_eccentricity != 0:
        m_tendon = -loads.tendon_tension * loads.tendon_eccentricity
        for s_f in geometry.fold_stations:
            events[s_f] = events.get(s_f, 0.0) + m_tendon
    for s_f, m in loads.point_moments:
        events[s_f] = events.get(s_f, 0.0) + m
    return events


def _integrate(
    geometry: ArmGeometry,
    loads: LoadCase,
    settings: SolverSettings,
    e_modulus: float,
    root_moment: float,
    theta_motor: float,
    collect: bool = False,
):
    """Forward RK4 sweep from the root given the root moment and an assumed
    tangent angle at the motor station (fixes the follower thrust
    direction). Returns the tip moment and, when collecting, the full
    station history."""
    length = geometry.total_length
    s_motor = geometry.motor_station * length
    moment_events = _load_events(geometry, loads)
    # Panel boundaries: segment ends, the motor station, point-moment stations.
    cuts = set(geometry.segment_bounds) | {s_motor} | set(moment_events)
    cuts = sorted(c for c in cuts if 0.0 <= c <= length)
    if cuts[0] != 0.0:
        cuts.insert(0, 0.0)
    if cuts[-1] != length:
        cuts.append(length)

    w_z = -geometry.linear_density * loads.gravity  # weight per unit length
    if loads.thrust > 0:
        thrust_x = -loads.thrust * math.sin(theta_motor)
        thrust_z = loads.thrust * math.cos(theta_motor)
    else:
        thrust_x = thrust_z = 0.0

    theta = -math.radians(geometry.initial_droop_deg)
    x = z = 0.0
    m = root_moment
    history = []
    if collect:
        history.append((theta, x, z, m, 0.0))

    seg_len = length / len(geometry.segments)
    cos, sin = math.cos, math.sin
    for a, b in zip(cuts[:-1], cuts[1:]):
        # Panels never cross a segment boundary, so inertia is constant here.
        ei = e_modulus * geometry.inertia_at(0.5 * (a + b))
        has_thrust = b <= s_motor and (thrust_x != 0.0 or thrust_z != 0.0)
        n = max(2, int(math.ceil(settings.integration_steps * (b - a) / seg_len)))
        h = (b - a) / n
        s = a
        for _ in range(n):

            def rhs(ss, th, mm):
                rx = thrust_x if has_thrust else 0.0
                rz = w_z * (length - ss) + (thrust_z if has_thrust else 0.0)
                c, sn = cos(th), sin(th)
                return mm / ei, c, sn, -(c * rz - sn * rx)

            k1t, k1x, k1z, k1m = rhs(s, theta, m)
            k2t, k2x, k2z, k2m = rhs(s + 0.5 * h, theta + 0.5 * h * k1t, m + 0.5 * h * k1m)
            k3t, k3x, k3z, k3m = rhs(s + 0.5 * h, theta + 0.5 * h * k2t, m + 0.5 * h * k2m)
            k4t, k4x, k4z, k4m = rhs(s + h, theta + h * k3t, m + h * k3m)
            theta += (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            m += (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
            s += h
            if collect:
                history.append((theta, x, z, m, s))
        if b in moment_events:
            # Crossing a point moment removes its contribution from the
            # internal moment of the remaining part.
            m -= moment_events[b]
            if collect:
                history.append((theta, x, z, m, b))
    return (theta, x, z, m), history


def _moment_scale(geometry: ArmGeometry, loads: LoadCase) -> float:
    length = geometry.total_length
    scale = (
        loads.thrust * length
        + geometry.linear_density * abs(loads.gravity) * length**2
        + loads.tendon_tension * abs(loads.tendon_eccentricity) * len(geometry.fold_stations)
        + sum(abs(m) for _, m in loads.point_moments)
    )
    return max(scale, 1e-12)


def solve_elastica(
    geometry: ArmGeometry,
    material,
    loads: LoadCase,
    settings: SolverSettings | None = None,
) -> BeamSolution:
    """Solve the clamped-root free-tip elastica for the given loads.

    Shooting on the root moment drives the tip moment to zero; the
    follower thrust direction is resolved by a fixed-point iteration on
    the tangent angle at the motor station.
    """
    settings = settings or SolverSettings()
    e_modulus = effective_modulus(material)

    theta_motor = -math.radians(geometry.initial_droop_deg)
    root_moment = 0.0
    evals = 0
    s_motor = geometry.motor_station * geometry.total_length

    def tip_moment(m0: float) -> float:
        nonlocal evals
        evals += 1
        if evals > settings.max_shooting_iterations:
            raise NoConvergence(
                f"shooting budget of {settings.max_shooting_iterations} integrations exhausted"
            )
        (_, _, _, m_tip), _ = _integrate(geometry, loads, settings, e_modulus, m0, theta_motor)
        return m_tip

    moment_scale = _moment_scale(geometry, loads)
    tolerance = settings.shooting_tolerance * moment_scale
    for _follower_pass in range(60):
        root_moment = _shoot(tip_moment, root_moment, moment_scale, tolerance)
        y_end, hist = _integrate(
            geometry, loads, settings, e_modulus, root_moment, theta_motor, collect=True
        )
        arr = np.array(hist)
        theta_motor_new = float(np.interp(s_motor, arr[:, 4], arr[:, 0]))
        if loads.thrust == 0 or abs(theta_motor_new - theta_motor) < 1e-12:
            theta_motor = theta_motor_new
            break
        theta_motor = theta_motor_new
    else:
        raise NoConvergence("follower-direction fixed point did not settle")

    stations = arr[:, [4, 1, 2, 0]].copy()  # (s, x, z, theta)
    moments = arr[:, 3].copy()
    inertias = np.array([geometry.inertia_at(min(s, geometry.total_length * (1 - 1e-12)))
                         for s in stations[:, 0]])
    curvatures = moments / (e_modulus * inertias)
    idx = int(np.argmax(np.abs(curvatures)))
    max_curv = float(abs(curvatures[idx]))
    max_curv_s = float(stations[idx, 0]) if max_curv > 0 else 0.0
    residual = float(abs(y_end[3]))
    return BeamSolution(
        stations=stations,
        moments=moments,
        inertias=inertias,
        tip_angle_deg=math.degrees(stations[-1, 3]),
        max_curvature=max_curv,
        max_curvature_s=max_curv_s,
        max_fiber_strain=max_curv * geometry.section_half_depth,
        residual=residual,
    )


def _shoot(f, guess: float, scale: float, tol: float) -> float:
    """Root of f (tip-moment defect as a function of the root moment).

    Secant iteration handles the common near-linear case in a handful of
    integrations; if it wanders, the evaluations collected so far seed a
    sign-change bracket that is closed by safeguarded false position with
    bisection fallback.
    """
    neg = None  # (x, fx) with the least-negative fx seen
    pos = None  # (x, fx) with the least-positive fx seen

    def eval_at(x: float) -> float:
        nonlocal neg, pos
        fx = f(x)
        if fx < 0 and (neg is None or fx > neg[1]):
            neg = (x, fx)
        elif fx > 0 and (pos is None or fx < pos[1]):
            pos = (x, fx)
        return fx

    x0, f0 = guess, eval_at(guess)
    if abs(f0) <= tol:
        return x0
    x1 = guess + (0.01 * scale if f0 < 0 else -0.01 * scale)
    f1 = eval_at(x1)
    for _ in range(30):
        if abs(f1) <= tol:
            return x1
        if neg is not None and pos is not None:
            break
        if f1 == f0:
            break
        step = -f1 * (x1 - x0) / (f1 - f0)
        step = max(-10.0 * scale, min(10.0 * scale, step))
        x0, f0 = x1, f1
        x1 = x1 + step
        f1 = eval_at(x1)
    if abs(f1) <= tol:
        return x1

    if neg is None or pos is None:
        # Geometric expansion away from the one-signed points seen so far.
        step = scale
        for _ in range(80):
            if neg is None and pos is not None:
                eval_at(min(p for p in (pos[0], guess)) - step)
            elif pos is None and neg is not None:
                eval_at(max(p for p in (neg[0], guess)) + step)
            if neg is not None and pos is not None:
                break
            step *= 2.0
        else:
            raise NoConvergence("failed to bracket the root moment")

    # False position inside the bracket, with bisection when it stalls.
    for _ in range(300):
        (xa, fa), (xb, fb) = neg, pos
        lo, hi = min(xa, xb), max(xa, xb)
        sec = xa - fa * (xb - xa) / (fb - fa)
        if not lo < sec < hi:
            sec = 0.5 * (lo + hi)
        fs = eval_at(sec)
        if abs(fs) <= tol:
            return sec
        if (neg, pos) == ((xa, fa), (xb, fb)):
            mid = 0.5 * (lo + hi)
            if abs(eval_at(mid)) <= tol:
                return mid
        if abs(neg[0] - pos[0]) < 1e-300:
            break
    raise NoConvergence("bisection/secant did not reach the shooting tolerance")


def max_stress_station(solution: BeamSolution, geometry: ArmGeometry) -> float:
    """Arc length [m] of the maximum outer-fiber bending stress proxy
    sigma(s) = |M(s)| c / I(s). Ties (e.g. an unloaded arm) resolve to the
    root by convention."""
    sigma = np.abs(solution.moments) * geometry.section_half_depth / solution.inertias
    if np.max(sigma) <= 0:
        return 0.0
    return float(solution.s[int(np.argmax(sigma))])


def tendon_bend(
    geometry: ArmGeometry,
    material,
    tension: float,
    eccentricity: float,
    settings: SolverSettings | None = None,
) -> BeamSolution:
    """Arm shape under tendon tension alone (no thrust, no weight beyond
    the configured gravity). Flags contact_expected when the total turning
    exceeds the fold budget plus a quarter turn."""
    if tension < 0:
        raise ValueError("tension must be >= 0")
    loads = LoadCase(thrust=0.0, tendon_tension=tension, tendon_eccentricity=eccentricity)
    solution = solve_elastica(geometry, material, loads, settings)
    turning = abs(solution.tip_angle_deg + geometry.initial_droop_deg)
    if turning > geometry.total_turning_deg + 90.0:
        solution = replace(solution, contact_expected=True)
    return solution
