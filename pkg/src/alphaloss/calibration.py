"""Numerical classification-calibration checks.

A margin loss is classification-calibrated at a posterior eta != 1/2 when the
infimum of the conditional risk over wrongly-signed classification values
strictly exceeds the unconstrained infimum.  These routines verify that
property numerically for the alpha-loss family: a dense grid over
[-f_range, f_range] is refined by golden-section search around the best cell,
on both the full grid and the constrained half {f : f * (2 eta - 1) <= 0}
(which includes f = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import (
    Alpha,
    check_posterior,
    margin_losses,
    conditional_risk,
    optimal_classifier,
)

# A gap above this declares the loss calibrated at eta: double-precision grid
# minima carry ~1e-12 noise, so this keeps three orders of safety margin.
CALIBRATION_TOL = 1e-9

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CalibrationReport:
    """Both conditional-risk infima of the calibration inequality at one eta.

    ``gap = constrained_min - unconstrained_min`` is nonnegative because the
    constrained set is a subset; ``calibrated_at_eta`` holds iff the gap
    exceeds ``CALIBRATION_TOL``.  ``argmin_at_boundary`` flags minima that are
    only approached at the edge of the search interval (the infinite-alpha
    loss attains its infimum only in the limit f -> +-inf).
    """

    alpha: Alpha
    eta: float
    unconstrained_min: float
    constrained_min: float
    unconstrained_argmin: float
    gap: float
    calibrated_at_eta: bool
    argmin_at_boundary: bool

    def __post_init__(self):
        if self.constrained_min < self.unconstrained_min:
            raise ValueError("constrained minimum below unconstrained minimum")
        if self.calibrated_at_eta != (self.gap > CALIBRATION_TOL):
            raise ValueError("calibration flag inconsistent with gap")


def _golden_section(fn, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Minimize a unimodal scalar function on [lo, hi]; returns (argmin, min)."""
    a, b = lo, hi
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = fn(x2)
    x = 0.5 * (a + b)
    return x, fn(x)


def check_calibration_at(
    alpha: Alpha,
    eta: float,
    f_range: float = 50.0,
    grid_step: float = 1e-3,
) -> CalibrationReport:
    """Evaluate the calibration inequality at one posterior eta != 1/2."""
    eta = check_posterior(eta)
    if eta == 0.5:
        raise ValueError("eta = 1/2 is excluded: both infima coincide there")
    if f_range <= 0.0 or grid_step <= 0.0:
        raise ValueError("f_range and grid_step must be positive")
    f_star = optimal_classifier(alpha, eta)
    if math.isfinite(f_star) and f_range <= abs(f_star):
        raise ValueError(
            f"f_range={f_range} does not cover the optimal classifier {f_star:.6g}"
        )

    # Odd point count keeps 0 on the grid: the constrained half includes f = 0.
    half_points = max(1, round(f_range / grid_step))
    grid = np.linspace(-f_range, f_range, 2 * half_points + 1)
    risks = eta * margin_losses(alpha, grid) + (1.0 - eta) * margin_losses(alpha, -grid)

    def risk_at(f: float) -> float:
        return conditional_risk(alpha, eta, f)

    i = int(np.argmin(risks))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    argmin, refined = _golden_section(risk_at, lo, hi)
    unconstrained = min(refined, float(risks[i]))
    # An infimum only approached in the limit (the infinite-alpha loss) shows up
    # as a boundary risk that already equals the minimum to double precision.
    boundary_risk = min(float(risks[0]), float(risks[-1]))
    at_boundary = boundary_risk <= unconstrained + 1e-12 * max(1.0, abs(unconstrained))
    if at_boundary:
        argmin = -f_range if risks[0] <= risks[-1] else f_range

    wrong_side = grid * (2.0 * eta - 1.0) <= 0.0
    j = int(np.flatnonzero(wrong_side)[np.argmin(risks[wrong_side])])
    # Refine without leaving the constrained half [-f_range, 0] (or mirrored).
    if eta > 0.5:
        c_lo, c_hi = max(grid[max(j - 1, 0)], -f_range), min(grid[min(j + 1, grid.size - 1)], 0.0)
    else:
        c_lo, c_hi = max(grid[max(j - 1, 0)], 0.0), min(grid[min(j + 1, grid.size - 1)], f_range)
    _, c_refined = _golden_section(risk_at, c_lo, c_hi)
    constrained = min(c_refined, float(risks[j]))

    unconstrained = min(unconstrained, constrained)
    gap = constrained - unconstrained
    return CalibrationReport(
        alpha=alpha,
        eta=eta,
        unconstrained_min=unconstrained,
        constrained_min=constrained,
        unconstrained_argmin=argmin,
        gap=gap,
        calibrated_at_eta=gap > CALIBRATION_TOL,
        argmin_at_boundary=at_boundary,
    )


def inner_derivative(alpha: Alpha, eta: float, f: float) -> float:
    """Derivative of the objective whose maximizer is the optimal classifier.

    For finite alpha > 1 the minimum conditional risk is scale * (1 - sup_f
    [eta * sigmoid(f)^c + (1-eta) * sigmoid(-f)^c]); this is d/df of the
    bracket, with its unique zero at f0 = alpha * log(eta / (1 - eta)).
    """
    if alpha.is_log or alpha.is_infinite:
        raise ValueError("inner derivative is defined for finite alpha > 1 only")
    eta = check_posterior(eta)
    f = float(f)
    if not math.isfinite(f):
        raise ValueError("f must be finite")
    inv_a = 1.0 / alpha.value
    bracket = eta * (1.0 + math.exp(-f)) ** inv_a - (1.0 - eta) * (1.0 + math.exp(f)) ** inv_a
    return (1.0 - inv_a) * bracket / (math.exp(f) + 2.0 + math.exp(-f))


def calibration_sweep(
    alpha: Alpha,
    eta_grid,
    f_range: float = 50.0,
    grid_step: float = 1e-3,
) -> list[CalibrationReport]:
    """Run :func:`check_calibration_at` over a grid of posteriors, in order."""
    reports = []
    for eta in eta_grid:
        try:
            reports.append(check_calibration_at(alpha, eta, f_range, grid_step))
        except ValueError as err:
            raise ValueError(f"eta={eta}: {err}") from err
    return reports
