"""Scalar functionals and identity residuals of the hydrodynamic flow.

Per snapshot: mass M = int rho, momentum P = int J, energy
E = int 1/2 (d_x sqrt_rho)^2 + 1/2 Lambda^2 + f(rho) with the gamma-law
internal energy f(rho) = rho^gamma / gamma, and the higher-order
functional I = int lambda^2 + (d_t sqrt_rho)^2 built on the generalized
chemical potential

    lambda = -1/2 d_x^2 sqrt_rho + 1/2 Lambda^2 / sqrt_rho
             + f'(rho) sqrt_rho        on {rho > 0},  0 elsewhere,

where d_x^2 sqrt_rho is evaluated as (1/2 d_x^2 rho -
(d_x sqrt_rho)^2) / sqrt_rho so only derivatives of the smooth fields
rho and J are ever taken across vacuum.  Equivalent form used as a
cross-check: sqrt_rho * lambda = -1/4 d_x^2 rho + e + p(rho).

Time-integrated reports cover the pseudo-conformal functional
H(t) = int x^2/2 rho - t int x J + t^2 E and its manifestly
nonnegative form, the Morawetz functional int rho G with G the
antiderivative of J (d/dt int rho G = -int rho p - 1/2 int (d_x rho)^2),
the pointwise entropy law d_t e + d_x(Lambda lambda -
d_t sqrt_rho d_x sqrt_rho) = 0, and a Gronwall envelope for I(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qhdlab.grid import Grid, antiderivative, deriv, integrate
from qhdlab.polar import (HydroState, VacuumMask, energy_density,
                          internal_energy, polar_factorize, pressure,
                          vacuum_mask)
from qhdlab.solver import Trajectory

BOUNDARY_FRACTION = 0.9  # samples with |x| >= 0.9 L count as "near the edge"
BOUNDARY_RHO_REL = 1e-10  # boundary density above this (rel. to max rho) taints moments


@dataclass(frozen=True)
class ChemicalFields:
    """lambda, xi = sqrt_rho*lambda, d_t sqrt_rho and the entropy flux."""

    lam: np.ndarray
    xi: np.ndarray
    dt_sqrt_rho: np.ndarray
    entropy_flux: np.ndarray
    dx_J: np.ndarray


def compute_lambda(grid: Grid, h: HydroState, mask: VacuumMask,
                   gamma: float) -> ChemicalFields:
    """Chemical-potential fields; lambda and d_t sqrt_rho vanish on vacuum."""
    live = ~mask.is_vacuum
    sr = np.where(live, h.sqrt_rho, 1.0)  # safe divisor, masked out below
    dx2_rho = deriv(grid, h.rho, 2)
    dx_J = deriv(grid, h.J, 1)

    dx2_sqrt_rho = (0.5 * dx2_rho - h.dx_sqrt_rho**2) / sr
    lam = -0.5 * dx2_sqrt_rho + 0.5 * h.Lambda**2 / sr + h.rho ** (gamma - 1.0) * h.sqrt_rho
    lam = np.where(live, lam, 0.0)
    dt_sqrt_rho = np.where(live, -dx_J / (2.0 * sr), 0.0)
    xi = h.sqrt_rho * lam
    entropy_flux = h.Lambda * lam - dt_sqrt_rho * h.dx_sqrt_rho
    return ChemicalFields(lam, xi, dt_sqrt_rho, entropy_flux, dx_J)


def xi_reference(grid: Grid, h: HydroState, gamma: float) -> np.ndarray:
    """Independent route to xi: -1/4 d_x^2 rho + e + p(rho)."""
    return (-0.25 * deriv(grid, h.rho, 2) + energy_density(h, gamma)
            + pressure(h.rho, gamma))


def functional_I(grid: Grid, chem: ChemicalFields) -> float:
    """I = int lambda^2 + (d_t sqrt_rho)^2 dx."""
    return integrate(grid, chem.lam**2 + chem.dt_sqrt_rho**2)


def functional_H(grid: Grid, h: HydroState, t: float, energy: float,
                 gamma: float) -> tuple[float, float]:
    """Pseudo-conformal functional, in both of its equivalent forms.

    Returns (H, H_alt) with H = int x^2/2 rho - t int x J + t^2 E and
    H_alt = int t^2/2 (d_x sqrt_rho)^2 + t^2/2 (Lambda - x/t sqrt_rho)^2
    + t^2 f(rho); at t = 0 both are int x^2/2 rho.
    """
    x = grid.x
    moment = integrate(grid, 0.5 * x**2 * h.rho)
    if t == 0.0:
        return moment, moment
    H = moment - t * integrate(grid, x * h.J) + t * t * energy
    H_alt = integrate(
        grid,
        0.5 * t * t * h.dx_sqrt_rho**2
        + 0.5 * t * t * (h.Lambda - (x / t) * h.sqrt_rho) ** 2
        + t * t * internal_energy(h.rho, gamma),
    )
    return H, H_alt


@dataclass
class DiagnosticsFrame:
    """All scalar diagnostics at one time; one CSV row.

    entropy_residual_norm needs neighbouring snapshots and is NaN at
    the trajectory endpoints.
    """

    t: float
    M: float
    E: float
    P: float
    I: float
    H: float
    H_alt: float
    moment_inertia: float
    morawetz: float
    entropy_residual_norm: float
    boundary_rho: float

    CSV_COLUMNS = ("t", "M", "E", "P", "I", "H", "H_alt", "moment_inertia",
                   "morawetz", "entropy_residual_norm", "boundary_rho")

    def row(self) -> list[float]:
        return [getattr(self, name) for name in self.CSV_COLUMNS]


def boundary_density(grid: Grid, rho: np.ndarray,
                     fraction: float = BOUNDARY_FRACTION) -> float:
    edge = np.abs(grid.x) >= fraction * grid.half_length
    return float(np.max(rho[edge]))


def diagnostics_frame(grid: Grid, psi: np.ndarray, t: float, gamma: float,
                      tau_rel: float = 1e-8
                      ) -> tuple[DiagnosticsFrame, HydroState, ChemicalFields]:
    """Snapshot pipeline: polar factorization, chemical fields, functionals."""
    h, mask = polar_factorize(grid, psi, tau_rel)
    return frame_from_state(grid, h, mask, t, gamma)


def frame_from_state(grid: Grid, h: HydroState, mask: VacuumMask, t: float,
                     gamma: float
                     ) -> tuple[DiagnosticsFrame, HydroState, ChemicalFields]:
    """Diagnostics from hydrodynamic fields alone (no wave function)."""
    chem = compute_lambda(grid, h, mask, gamma)
    e = energy_density(h, gamma)
    energy = integrate(grid, e)
    H, H_alt = functional_H(grid, h, t, energy, gamma)
    frame = DiagnosticsFrame(
        t=t,
        M=integrate(grid, h.rho),
        E=energy,
        P=integrate(grid, h.J),
        I=functional_I(grid, chem),
        H=H,
        H_alt=H_alt,
        moment_inertia=integrate(grid, 0.5 * grid.x**2 * h.rho),
        morawetz=integrate(grid, h.rho * antiderivative(grid, h.J, 0.0)),
        entropy_residual_norm=float("nan"),
        boundary_rho=boundary_density(grid, h.rho),
    )
    return frame, h, chem


@dataclass
class PcReport:
    """Pseudo-conformal inequality over one trajectory.

    lhs[i] = H(t_i) + int_0^{t_i} s (1 - 3/gamma) int rho^gamma dx ds
    must stay below rhs = int x^2/2 rho_0 dx.  For energy-conserving
    flows lhs - rhs = t^2 E(t) - 2 int_0^t s E(s) ds vanishes
    identically, so the residual array should sit at quadrature level.
    """

    times: np.ndarray
    lhs: np.ndarray
    rhs: float
    margin: float
    residual: np.ndarray  # lhs - rhs, ~0 when E is conserved
    pressure_growth: np.ndarray  # F(t) = t^2/gamma int rho^gamma

    def as_dict(self) -> dict:
        return {
            "rhs": self.rhs,
            "margin": self.margin,
            "max_abs_residual": float(np.max(np.abs(self.residual))),
            "times": self.times.tolist(),
            "lhs": self.lhs.tolist(),
        }


def pseudo_conformal_check(traj: Trajectory, gamma: float) -> PcReport:
    grid = traj.grid
    x = grid.x
    times = traj.times
    H = np.empty(len(traj))
    pg = np.empty(len(traj))
    for i, psi in enumerate(traj.states):
        rho = np.abs(psi) ** 2
        J = (np.conj(psi) * deriv(grid, psi, 1)).imag
        dpsi = deriv(grid, psi, 1)
        energy = integrate(grid, 0.5 * np.abs(dpsi) ** 2 + rho**gamma / gamma)
        pg[i] = integrate(grid, rho**gamma)
        H[i] = (integrate(grid, 0.5 * x**2 * rho)
                - times[i] * integrate(grid, x * J)
                + times[i] ** 2 * energy)
    integrand = times * (1.0 - 3.0 / gamma) * pg
    Q = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(times)
                                         * (integrand[1:] + integrand[:-1]))))
    rhs = float(integrate(grid, 0.5 * x**2 * np.abs(traj.states[0]) ** 2))
    lhs = H + Q
    F = times**2 / gamma * pg
    return PcReport(times, lhs, rhs, float(np.max(lhs - rhs)), lhs - rhs, F)


@dataclass
class MorawetzReport:
    """Residual of d/dt int rho G = -int rho p - 1/2 int (d_x rho)^2.

    G is the antiderivative of J with one fixed offset C (> sup_t
    ||J||_L1) for the whole trajectory, so G >= 0 and the time
    derivative is unaffected by the offset.
    """

    times: np.ndarray
    residuals: np.ndarray  # interior snapshots only, len(times) - 2
    max_abs_residual: float
    dissipation_scale: float  # int rho p + 1/2 int (d_x rho)^2 at t = 0
    accumulated_grad_rho_sq: float
    accumulated_pressure: float
    bound: float  # 2 * mass * sup|G|
    bound_ok: bool

    def as_dict(self) -> dict:
        return {
            "max_abs_residual": self.max_abs_residual,
            "dissipation_scale": self.dissipation_scale,
            "accumulated_grad_rho_sq": self.accumulated_grad_rho_sq,
            "accumulated_pressure": self.accumulated_pressure,
            "bound": self.bound,
            "bound_ok": self.bound_ok,
        }


def morawetz_residual(traj: Trajectory, gamma: float) -> MorawetzReport:
    grid = traj.grid
    times = traj.times
    n = len(traj)
    J_abs_l1 = np.empty(n)
    rho_list, J_list = [], []
    for psi in traj.states:
        rho = np.abs(psi) ** 2
        J = (np.conj(psi) * deriv(grid, psi, 1)).imag
        rho_list.append(rho)
        J_list.append(J)
        J_abs_l1[len(rho_list) - 1] = integrate(grid, np.abs(J))
    C = 1.05 * float(np.max(J_abs_l1)) + 1e-12

    mor = np.empty(n)
    diss = np.empty(n)
    grad_rho_sq = np.empty(n)
    pres = np.empty(n)
    g_sup = 0.0
    mass = 0.0
    for i, (rho, J) in enumerate(zip(rho_list, J_list)):
        G = antiderivative(grid, J, C)
        g_sup = max(g_sup, float(np.max(np.abs(G))))
        mass = max(mass, integrate(grid, rho))
        dx_rho = deriv(grid, rho, 1)
        grad_rho_sq[i] = integrate(grid, dx_rho**2)
        pres[i] = integrate(grid, rho ** (gamma + 1.0))
        mor[i] = integrate(grid, rho * G)
        diss[i] = integrate(grid, rho * pressure(rho, gamma)) + 0.5 * grad_rho_sq[i]

    if n < 3:
        residuals = np.zeros(0)
    else:
        ddt = (mor[2:] - mor[:-2]) / (times[2:] - times[:-2])
        residuals = ddt + diss[1:-1]
    acc_grad = float(np.trapezoid(grad_rho_sq, times))
    acc_pres = float(np.trapezoid(pres, times))
    bound = 2.0 * mass * g_sup
    return MorawetzReport(
        times, residuals,
        float(np.max(np.abs(residuals))) if len(residuals) else 0.0,
        float(diss[0]), acc_grad, acc_pres, bound,
        bool(acc_grad <= bound),
    )


@dataclass
class EntropyReport:
    """Norms of the pointwise entropy-law residual at interior snapshots.

    R_i = (e_{i+1} - e_{i-1}) / (t_{i+1} - t_{i-1}) + d_x flux_i.
    """

    times: np.ndarray  # interior snapshot times
    l1_norms: np.ndarray
    l2_norms: np.ndarray
    residual_fields: list[np.ndarray]

    def as_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "l1_norms": self.l1_norms.tolist(),
            "l2_norms": self.l2_norms.tolist(),
        }


def entropy_residual(grid: Grid,
                     snapshots: list[tuple[HydroState, ChemicalFields]],
                     times: np.ndarray, gamma: float) -> EntropyReport:
    if len(snapshots) != len(times):
        raise ValueError("snapshots and times must have equal length")
    e_fields = [energy_density(h, gamma) for h, _ in snapshots]
    res_times, l1, l2, fields = [], [], [], []
    for i in range(1, len(snapshots) - 1):
        dt2 = times[i + 1] - times[i - 1]
        de = (e_fields[i + 1] - e_fields[i - 1]) / dt2
        R = de + deriv(grid, snapshots[i][1].entropy_flux, 1)
        res_times.append(times[i])
        l1.append(integrate(grid, np.abs(R)))
        l2.append(np.sqrt(integrate(grid, R**2)))
        fields.append(R)
    return EntropyReport(np.array(res_times), np.array(l1), np.array(l2), fields)


@dataclass
class GronwallReport:
    """I(t) against the envelope I(0) exp(c int (M+E)^((gamma-1)/2) ds).

    The rate constant c is fitted from the run itself (the theory makes
    it finite but not explicit), so the envelope is a consistency
    check, not an a-priori bound.
    """

    times: np.ndarray
    I_values: np.ndarray
    envelope: np.ndarray
    c_fitted: float
    max_ratio: float  # max I(t) / I(0)
    exceeded: bool

    def as_dict(self) -> dict:
        return {
            "c_fitted": self.c_fitted,
            "max_ratio": self.max_ratio,
            "exceeded": self.exceeded,
        }


def i_growth_check(frames: list[DiagnosticsFrame], gamma: float,
                   tol: float = 0.02) -> GronwallReport:
    times = np.array([f.t for f in frames])
    I = np.array([f.I for f in frames])
    if len(frames) < 3:
        raise ValueError("need at least 3 frames")
    if I[0] == 0.0:  # zero state: trivially bounded
        exceeded = bool(np.any(I > tol))
        return GronwallReport(times, I, np.zeros_like(I), 0.0,
                              0.0 if not exceeded else float("inf"), exceeded)
    me = np.array([(f.M + f.E) ** (0.5 * (gamma - 1.0)) for f in frames])
    # fit the rate over the first half of the run; clamp to a growth envelope
    half = max(2, len(times) // 2)
    dlogI = np.diff(np.log(I[:half + 1])) / np.diff(times[:half + 1])
    rates = dlogI / (0.5 * (me[:half] + me[1:half + 1]))
    c = max(float(np.max(rates)), 0.0)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(times) * (me[1:] + me[:-1]))))
    envelope = I[0] * np.exp(c * cum)
    exceeded = bool(np.any(I > envelope * (1.0 + tol)))
    return GronwallReport(times, I, envelope, c, float(np.max(I) / I[0]), exceeded)


@dataclass
class ConservationReport:
    mass_drift: float
    energy_drift: float
    momentum_drift: float

    def as_dict(self) -> dict:
        return {"mass_drift": self.mass_drift,
                "energy_drift": self.energy_drift,
                "momentum_drift": self.momentum_drift}


def conservation_report(frames: list[DiagnosticsFrame]) -> ConservationReport:
    """Max relative drifts of M, E, P over the run.

    Momentum is normalized by max(|P(0)|, M(0)): P(0) vanishes for real
    initial data, and mass sets the natural momentum scale at O(1)
    velocities.
    """
    M = np.array([f.M for f in frames])
    E = np.array([f.E for f in frames])
    P = np.array([f.P for f in frames])
    mass_drift = float(np.max(np.abs(M - M[0])) / M[0]) if M[0] else 0.0
    energy_drift = float(np.max(np.abs(E - E[0])) / E[0]) if E[0] else 0.0
    p_scale = max(abs(P[0]), M[0], 1e-300)
    momentum_drift = float(np.max(np.abs(P - P[0])) / p_scale)
    return ConservationReport(mass_drift, energy_drift, momentum_drift)
