"""Wave-function lifting: invert the Madelung map.

Given hydrodynamic data (sqrt_rho, Lambda) with Lambda = 0 on vacuum,
a wave function with the same polar factorization is reconstructed:

  * lift_h1 regularizes the amplitude, sqrt_rho_d = sqrt_rho + d*w with
    a fixed positive Gaussian profile w, integrates the regularized
    velocity v_d = J / rho_d into a phase S, and returns
    psi = sqrt_rho * exp(iS) (unregularized amplitude, regularized
    phase), so |psi| = sqrt_rho exactly and the recovered Lambda
    converges as d -> 0.

  * lift_h2 lifts each connected non-vacuum component separately and
    then sweeps left to right choosing a constant phase shift per
    component so the one-sided limits of psi_x agree at isolated vacuum
    points.  Across fat vacuum (where |psi_x| vanishes at both edges)
    the shift is zero.  The alignment is what keeps psi_xx bounded
    under grid refinement; the naive all-zero-shift lift develops a
    derivative kink whose spectral second derivative grows like 1/dx.

Phase integration is pinned to S = 0 at the (component's) left edge;
the remaining global phase is a gauge choice.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from qhdlab.grid import Grid, antiderivative, integrate
from qhdlab.polar import HydroState, vacuum_mask

log = logging.getLogger(__name__)

# vacuum runs wider than this many samples are treated as fat vacuum
ISOLATED_VACUUM_MAX_WIDTH = 2


class LiftError(ValueError):
    """Lifting preconditions violated (e.g. energy-density jump at a boundary)."""


def regularization_profile(grid: Grid) -> np.ndarray:
    """Fixed positive Schwartz-type profile w(x) = exp(-x^2/2)."""
    return np.exp(-0.5 * grid.x**2)


def regularized_density(grid: Grid, h: HydroState, delta: float) -> np.ndarray:
    """rho_d = rho + (delta w)^2: positive everywhere, equals rho to
    O(delta^2) away from vacuum (an additive amplitude shift would bias
    the velocity at first order in delta even on vacuum-free states)."""
    return h.rho + (delta * regularization_profile(grid)) ** 2


def lift_h1(grid: Grid, h: HydroState, delta: float = 1e-8) -> np.ndarray:
    """Lift to a wave function at H^1 regularity on the whole box.

    The phase is the spectral antiderivative of v_d = J / rho_d, pinned
    to zero at the left edge; |result| equals h.sqrt_rho exactly.
    """
    if not delta > 0:
        raise LiftError(f"delta must be positive, got {delta}")
    v = h.J / regularized_density(grid, h, delta)
    S = antiderivative(grid, v, 0.0)
    return h.sqrt_rho * np.exp(1j * S)


def _cumulative_phase(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Integrate v on a (non-periodic) component, phase = 0 at its left edge."""
    if len(v) < 3:
        return np.concatenate(([0.0], cumulative_trapezoid(v, x)))
    return cumulative_simpson(v, x=x, initial=0.0)


def nonvacuum_components(is_vacuum: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs [i0, i1] (inclusive) of non-vacuum samples, left to right.

    The box is treated as an interval: runs do not merge across the
    periodic seam (states with vacuum are expected to decay at the
    edges anyway).
    """
    live = ~is_vacuum
    if not np.any(live):
        return []
    padded = np.concatenate(([False], live, [False]))
    flips = np.flatnonzero(np.diff(padded.astype(int)))
    starts, ends = flips[0::2], flips[1::2] - 1
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def extrapolate_boundary_value(values: np.ndarray, idx: np.ndarray, x_target: float,
                x: np.ndarray) -> float:
    """One-sided order-2 polynomial extrapolation to x_target.

    idx are the (up to 4) sample indices nearest the boundary, inside
    the component.
    """
    xi, yi = x[idx], values[idx]
    if len(idx) == 1:
        return float(yi[0])
    deg = min(2, len(idx) - 1)
    coef = np.polynomial.polynomial.polyfit(xi - x_target, yi, deg)
    return float(coef[0])


def _one_sided_dpsi(h: HydroState, lo: int, hi: int, side: str,
                    x_target: float) -> complex:
    """Extrapolated one-sided limit of (d_x sqrt_rho + i Lambda) at a boundary."""
    if side == "left":
        idx = np.arange(lo, min(lo + 4, hi + 1))
    else:
        idx = np.arange(max(hi - 3, lo), hi + 1)
    re = extrapolate_boundary_value(h.dx_sqrt_rho, idx, x_target, h.grid.x)
    im = extrapolate_boundary_value(h.Lambda, idx, x_target, h.grid.x)
    return complex(re, im)


def lift_h2(grid: Grid, h: HydroState, gamma: float, *,
            tau_rel: float = 1e-8, delta: float | None = None,
            conditioning_floor: float = 1e-6, mismatch_tol: float = 0.1,
            phase_align: bool = True) -> np.ndarray:
    """Lift to a wave function with aligned phases at vacuum boundaries.

    Requires a state whose energy density is continuous across vacuum
    boundaries: the one-sided limits of |psi_x| = |d_x sqrt_rho +
    i Lambda| must agree at every isolated vacuum point shared by two
    components (checked within mismatch_tol, relative).  phase_align=False
    skips the sweep (all shifts zero), which is only useful to exhibit
    the unbounded-psi_xx failure mode.
    """
    peak = float(np.max(h.sqrt_rho))
    if delta is None:
        delta = 1e-8 * max(peak, 1e-300)
    mask = vacuum_mask(h.sqrt_rho, tau_rel)
    if not mask.any_vacuum:
        return lift_h1(grid, h, delta)

    comps = nonvacuum_components(mask.is_vacuum)
    if not comps:
        return np.zeros(grid.n_points, dtype=complex)

    v = h.J / regularized_density(grid, h, delta)

    # per-component phase, pinned to 0 at each component's left edge
    phase = np.zeros(grid.n_points)
    for lo, hi in comps:
        sl = slice(lo, hi + 1)
        phase[sl] = _cumulative_phase(grid.x[sl], v[sl])

    dpsi_scale = float(np.max(np.hypot(h.dx_sqrt_rho, h.Lambda)))
    floor = conditioning_floor * max(dpsi_scale, 1e-300)

    theta = np.zeros(len(comps))
    if phase_align:
        for j in range(1, len(comps)):
            prev_lo, prev_hi = comps[j - 1]
            lo, hi = comps[j]
            gap = lo - prev_hi - 1
            if gap > ISOLATED_VACUUM_MAX_WIDTH:
                theta[j] = 0.0  # fat vacuum: |psi_x| vanishes at both edges
                continue
            x_j = 0.5 * (grid.x[prev_hi + 1] + grid.x[lo - 1])
            u_left = _one_sided_dpsi(h, prev_lo, prev_hi, "right", x_j)
            u_right = _one_sided_dpsi(h, lo, hi, "left", x_j)
            a_l, a_r = abs(u_left), abs(u_right)
            if a_l <= floor or a_r <= floor:
                theta[j] = 0.0
                log.debug("junction at x=%.6g below conditioning floor; theta=0", x_j)
                continue
            if abs(a_l - a_r) > mismatch_tol * max(a_l, a_r):
                raise LiftError(
                    f"|psi_x| mismatch at vacuum boundary x = {x_j:.6g}: "
                    f"{a_l:.6g} (left) vs {a_r:.6g} (right); "
                    "energy density is not continuous there")
            left_end_phase = phase[prev_hi] + theta[j - 1]
            theta[j] = np.angle(u_left) + left_end_phase - np.angle(u_right)

    total = np.zeros(grid.n_points)
    carried = theta[0]
    pos = 0
    for j, (lo, hi) in enumerate(comps):
        total[pos:lo] = carried  # vacuum inherits the phase to its left
        total[lo:hi + 1] = phase[lo:hi + 1] + theta[j]
        carried = phase[hi] + theta[j]
        pos = hi + 1
    total[pos:] = carried

    return h.sqrt_rho * np.exp(1j * total)


@dataclass(frozen=True)
class GcpReport:
    """Discrete norms controlling H^2 liftability of a hydrodynamic state."""

    lambda_l2: float
    dxj_over_sqrt_rho_l2: float
    dt_sqrt_rho_l2: float
    gcp_ok: bool
    m2_bound: float | None = None

    def as_dict(self) -> dict:
        return {
            "lambda_l2": self.lambda_l2,
            "dxj_over_sqrt_rho_l2": self.dxj_over_sqrt_rho_l2,
            "dt_sqrt_rho_l2": self.dt_sqrt_rho_l2,
            "gcp_ok": self.gcp_ok,
            "m2_bound": self.m2_bound,
        }


def gcp_check(grid: Grid, h: HydroState, gamma: float,
              tau_rel: float = 1e-8, m2: float | None = None) -> GcpReport:
    """Report the generalized-chemical-potential norms of a state.

    Report-only: never raises on an unbounded state, just sets gcp_ok.
    """
    from qhdlab.functionals import compute_lambda

    mask = vacuum_mask(h.sqrt_rho, tau_rel)
    chem = compute_lambda(grid, h, mask, gamma)
    lam_l2 = np.sqrt(integrate(grid, chem.lam**2))
    live = ~mask.is_vacuum
    dxj = chem.dx_J
    ratio = np.where(live, dxj / np.where(live, h.sqrt_rho, 1.0), 0.0)
    dxj_l2 = np.sqrt(integrate(grid, ratio**2))
    dtsr_l2 = np.sqrt(integrate(grid, chem.dt_sqrt_rho**2))
    ok = bool(np.isfinite(lam_l2) and np.isfinite(dxj_l2) and np.isfinite(dtsr_l2))
    if m2 is not None:
        ok = ok and (lam_l2 + dxj_l2 <= m2)
    return GcpReport(float(lam_l2), float(dxj_l2), float(dtsr_l2), ok, m2)
