"""Dispersive decay-rate estimation.

Quantities of a spreading solution obey one-sided power-law bounds with
exponent sigma = min(1, (gamma - 1)/2):

    ||d_x sqrt_rho||_L2   ~ t^-sigma
    int (Lambda - x/t sqrt_rho)^2 dx   ~ t^-2 sigma
    int rho^gamma dx      ~ t^-2 sigma
    ||sqrt_rho||_sup      ~ t^-sigma/2

and the kinetic energy exhausts the total: 1/2 ||Lambda||^2 -> E(0).
Exponents are estimated by least squares on (log t, log value) inside a
window that excludes both the early transient (before ||sqrt_rho||_sup
has dropped 30%) and boundary contamination (after the box edge sees
density).  The bounds are one-sided, so decaying faster than predicted
counts as a pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qhdlab.functionals import BOUNDARY_RHO_REL, boundary_density
from qhdlab.grid import deriv, integrate
from qhdlab.polar import polar_factorize
from qhdlab.solver import Trajectory

EXPONENT_TOL = 0.15  # slack for finite-window log-log fits

QUANTITY_NAMES = ("grad_sqrt_rho_l2", "rarefaction_l2", "pressure_integral",
                  "sup_sqrt_rho")


def sigma_exponent(gamma: float) -> float:
    """Decay exponent sigma = min(1, (gamma - 1)/2)."""
    return min(1.0, 0.5 * (gamma - 1.0))


def decay_targets(gamma: float) -> dict[str, float]:
    s = sigma_exponent(gamma)
    return {"grad_sqrt_rho_l2": -s, "rarefaction_l2": -2.0 * s,
            "pressure_integral": -2.0 * s, "sup_sqrt_rho": -0.5 * s}


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    n_points: int


def fit_decay(times: np.ndarray, values: np.ndarray,
              window: tuple[float, float]) -> FitResult:
    """Least-squares line through (log t, log value) inside the window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    t_lo, t_hi = window
    sel = (times >= t_lo) & (times <= t_hi) & (times > 0)
    if np.any(values[sel] <= 0):
        raise ValueError("values must be positive inside the fit window")
    t, v = times[sel], values[sel]
    if len(t) < 8:
        raise ValueError(f"need at least 8 samples in the window, got {len(t)}")
    lt, lv = np.log(t), np.log(v)
    A = np.vstack([lt, np.ones_like(lt)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, lv, rcond=None)
    fitted = A @ (slope, intercept)
    ss_res = float(np.sum((lv - fitted) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = len(t) - 2
    var = ss_res / dof if dof > 0 else 0.0
    denom = float(np.sum((lt - np.mean(lt)) ** 2))
    stderr = float(np.sqrt(var / denom)) if denom > 0 else 0.0
    return FitResult(float(slope), float(intercept), stderr, r2, len(t))


@dataclass
class QuantityVerdict:
    name: str
    fitted: float | None
    target: float
    stderr: float | None
    verdict: str  # "pass" (matches or faster) | "fail" (slower) | "inconclusive"
    intercept: float | None = None  # of the log-log fit, for replotting

    def as_dict(self) -> dict:
        return {"fitted": self.fitted, "target": self.target,
                "stderr": self.stderr, "verdict": self.verdict,
                "intercept": self.intercept}


@dataclass
class DispersiveReport:
    gamma: float
    sigma: float
    window: tuple[float, float]
    inconclusive: bool
    boundary_time: float | None
    verdicts: dict[str, QuantityVerdict]
    series: dict[str, np.ndarray]
    times: np.ndarray
    kinetic_ratio: np.ndarray  # 1/2 ||Lambda||^2 / E(0) per snapshot
    kinetic_ratio_end: float
    kinetic_monotone: bool  # nondecreasing after t_lo, up to 0.02 slack

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "sigma": self.sigma,
            "window": list(self.window),
            "inconclusive": self.inconclusive,
            "boundary_time": self.boundary_time,
            "quantities": {k: v.as_dict() for k, v in self.verdicts.items()},
            "kinetic_ratio_end": self.kinetic_ratio_end,
            "kinetic_monotone": self.kinetic_monotone,
            "series": {
                "times": self.times.tolist(),
                **{k: v.tolist() for k, v in self.series.items()},
                "kinetic_ratio": self.kinetic_ratio.tolist(),
            },
        }


def dispersive_suite(traj: Trajectory, gamma: float, tau_rel: float = 1e-8,
                     t_lo: float | None = None, t_hi: float | None = None
                     ) -> DispersiveReport:
    """Fit all four decay exponents plus the kinetic-energy limit."""
    grid = traj.grid
    times = traj.times
    n = len(traj)
    series = {name: np.full(n, np.nan) for name in QUANTITY_NAMES}
    kinetic = np.empty(n)
    sup0 = float(np.max(np.abs(traj.states[0])))
    E0 = None
    boundary_time = None
    for i, psi in enumerate(traj.states):
        h, _ = polar_factorize(grid, psi, tau_rel)
        dpsi = deriv(grid, psi, 1)
        energy = integrate(grid, 0.5 * np.abs(dpsi) ** 2 + h.rho**gamma / gamma)
        if E0 is None:
            E0 = energy
        series["grad_sqrt_rho_l2"][i] = np.sqrt(integrate(grid, h.dx_sqrt_rho**2))
        series["pressure_integral"][i] = integrate(grid, h.rho**gamma)
        series["sup_sqrt_rho"][i] = np.max(h.sqrt_rho)
        if times[i] > 0:
            series["rarefaction_l2"][i] = integrate(
                grid, (h.Lambda - (grid.x / times[i]) * h.sqrt_rho) ** 2)
        kinetic[i] = 0.5 * integrate(grid, h.Lambda**2) / E0
        if boundary_time is None:
            if boundary_density(grid, h.rho) > BOUNDARY_RHO_REL * np.max(h.rho):
                boundary_time = float(times[i])

    if t_lo is None:
        dropped = np.flatnonzero(series["sup_sqrt_rho"] <= 0.7 * sup0)
        t_lo = float(times[dropped[0]]) if len(dropped) else float(times[-1])
    if t_hi is None:
        t_hi = boundary_time if boundary_time is not None else float(times[-1])

    targets = decay_targets(gamma)
    in_window = (times >= t_lo) & (times <= t_hi) & (times > 0)
    inconclusive = (t_hi < 4.0 * t_lo) or (int(np.sum(in_window)) < 8)

    verdicts = {}
    for name in QUANTITY_NAMES:
        if inconclusive:
            verdicts[name] = QuantityVerdict(name, None, targets[name], None,
                                             "inconclusive")
            continue
        fit = fit_decay(times, series[name], (t_lo, t_hi))
        ok = fit.slope <= targets[name] + EXPONENT_TOL
        verdicts[name] = QuantityVerdict(name, fit.slope, targets[name],
                                         fit.stderr, "pass" if ok else "fail",
                                         fit.intercept)

    after = times >= t_lo
    kin_after = kinetic[after]
    monotone = bool(np.all(np.diff(kin_after) >= -0.02)) if len(kin_after) > 1 else True
    end_idx = int(np.flatnonzero(times <= t_hi)[-1])
    return DispersiveReport(
        gamma, sigma_exponent(gamma), (float(t_lo), float(t_hi)),
        bool(inconclusive), boundary_time, verdicts, series, times,
        kinetic, float(kinetic[end_idx]), monotone,
    )
