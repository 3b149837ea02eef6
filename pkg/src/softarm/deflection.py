"""Empirical quadratic arm-deflection model and operating-envelope checks.

The deflection angle versus throttle is modeled as
alpha(T) = alpha0 + (A1 + rho*A2)*T + (B1 + rho*B2)*T^2, with rho the
infill rate in percent and T the throttle in tens-of-percent units
(T = throttle% / 10, range [0, 10]).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OutOfEnvelopeWarning, RankDeficient
from .material import COND_LIMIT

#: Throttle units per percent throttle.
THROTTLE_UNIT_PER_PCT = 0.1

#: Default throttle validity range upper bound (100% throttle).
T_MAX_DEFAULT = 10.0

#: Flyability bound on the deflection magnitude [deg].
DEFLECTION_BOUND_DEG = 14.0

#: Below this infill rate [%] the high-throttle response turns strongly
#: nonlinear and the quadratic model is unreliable.
NONLINEAR_INFILL_PCT = 5.0

#: Coefficients interpolated from the measured deflection sweeps.
MEASURED_COEFF_VALUES = {"a1": 2.4387, "a2": -0.1997, "b1": -0.162, "b2": 0.0151}


@dataclass(frozen=True)
class DeflectionModelCoeffs:
    """Quadratic model coefficients; a1/b1 in deg per T (resp. T^2), a2/b2
    additionally per percent infill. alpha0 is the unpowered droop [deg]."""

    a1: float
    a2: float
    b1: float
    b2: float
    alpha0: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.a1, self.a2, self.b1, self.b2, self.alpha0))):
            raise ValueError("all coefficients must be finite")

    @classmethod
    def measured(cls, alpha0: float = 0.0) -> "DeflectionModelCoeffs":
        return cls(alpha0=alpha0, **MEASURED_COEFF_VALUES)


@dataclass(frozen=True)
class DeflectionSample:
    """One measured operating point: infill [%], throttle [T], angle [deg]."""

    infill_rate: float
    throttle: float
    angle: float

    def __post_init__(self):
        if self.throttle < 0:
            raise ValueError("throttle must be >= 0")
        if not 0.0 < self.infill_rate < 100.0:
            raise ValueError("infill_rate must be in (0, 100)")


@dataclass(frozen=True)
class EnvelopeReport:
    max_abs_deflection: float
    worst_throttle: float
    nonlinear_flag: bool
    passes_14deg: bool

    def __post_init__(self):
        if self.max_abs_deflection < 0:
            raise ValueError("max_abs_deflection must be >= 0")


def eval_deflection(
    coeffs: DeflectionModelCoeffs,
    infill: float,
    throttle: float,
    t_max: float = T_MAX_DEFAULT,
) -> float:
    """Arm deflection angle [deg] at the given infill and throttle."""
    if not 0.0 <= throttle <= t_max:
        raise ValueError(f"throttle {throttle} outside the model range [0, {t_max}]")
    if infill < NONLINEAR_INFILL_PCT and throttle > 0.8 * t_max:
        warnings.warn(
            f"infill {infill}% at throttle {throttle} is in the strongly "
            "nonlinear regime; the quadratic model underestimates deflection",
            OutOfEnvelopeWarning,
            stacklevel=2,
        )
    return (
        coeffs.alpha0
        + (coeffs.a1 + infill * coeffs.a2) * throttle
        + (coeffs.b1 + infill * coeffs.b2) * throttle**2
    )


def fit_deflection_coeffs(
    samples: list[DeflectionSample], alpha0: float
) -> DeflectionModelCoeffs:
    """Least-squares fit of (A1, A2, B1, B2) to measured sweeps.

    Regressors are (T, rho*T, T^2, rho*T^2) against angle - alpha0; the
    samples must cover at least two infill rates and three throttles.
    """
    if len(samples) < 4:
        raise RankDeficient("need at least 4 samples")
    rho = np.array([s.infill_rate for s in samples])
    t = np.array([s.throttle for s in samples])
    alpha = np.array([s.angle for s in samples])
    if len(set(rho)) < 2 or len(set(t)) < 3:
        raise RankDeficient("need >= 2 distinct infill rates and >= 3 distinct throttles")
    design = np.column_stack([t, rho * t, t**2, rho * t**2])
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > COND_LIMIT:
        raise RankDeficient("deflection design matrix is rank deficient")
    coeffs, *_ = np.linalg.lstsq(design, alpha - alpha0, rcond=None)
    return DeflectionModelCoeffs(*coeffs, alpha0=alpha0)


def envelope_check(
    coeffs: DeflectionModelCoeffs,
    infill: float,
    t_max: float = T_MAX_DEFAULT,
    step: float = 0.1,
    bound_deg: float = DEFLECTION_BOUND_DEG,
) -> EnvelopeReport:
    """Scan |alpha(T) - alpha0| over [0, t_max] and report the worst case."""
    if step <= 0:
        raise ValueError("step must be > 0")
    n = int(round(t_max / step))
    grid = np.linspace(0.0, t_max, n + 1)
    a_lin = coeffs.a1 + infill * coeffs.a2
    b_quad = coeffs.b1 + infill * coeffs.b2
    dev = np.abs(a_lin * grid + b_quad * grid**2)
    idx = int(np.argmax(dev))
    return EnvelopeReport(
        max_abs_deflection=float(dev[idx]),
        worst_throttle=float(grid[idx]),
        nonlinear_flag=infill < NONLINEAR_INFILL_PCT,
        passes_14deg=float(dev[idx]) < bound_deg,
    )


def compare_to_elastica(
    coeffs: DeflectionModelCoeffs,
    infill: float,
    material,
    geometry,
    thrust_map,
    throttles=None,
    settings=None,
) -> dict:
    """Evaluate the empirical model and the elastica solver over a common
    throttle grid.

    thrust_map maps throttle [T] to thrust [N]. Returns a dict with rows
    (throttle, alpha_empirical_deg, alpha_simulated_deg) and the maximum
    absolute discrepancy. The measured alpha0 already includes gravity
    sag, so the twin uses the geometry's initial droop alone (gravity off)
    and that droop should equal -alpha0.
    """
    from .beam import LoadCase, solve_elastica

    if throttles is None:
        throttles = np.linspace(0.0, T_MAX_DEFAULT, 11)
    rows = []
    for t in throttles:
        alpha_emp = eval_deflection(coeffs, infill, float(t))
        loads = LoadCase(thrust=float(thrust_map(t)), gravity=0.0)
        sol = solve_elastica(geometry, material, loads, settings)
        rows.append((float(t), alpha_emp, sol.tip_angle_deg))
    discrepancy = max(abs(emp - sim) for _, emp, sim in rows)
    return {"rows": rows, "max_abs_discrepancy_deg": discrepancy}
