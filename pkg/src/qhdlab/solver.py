"""Split-step spectral solver for the defocusing semilinear Schroedinger equation

    i dpsi/dt = -1/2 d^2psi/dx^2 + |psi|^(2(gamma-1)) psi,   gamma > 1.

One Strang step is

    psi <- NL(dt/2) . LIN(dt) . NL(dt/2) psi

where NL is the pointwise phase rotation exp(-i |psi|^(2(gamma-1)) dt)
(exact, since |psi| is invariant under it) and LIN multiplies each
Fourier mode by exp(-i k^2 dt / 2) (exact for the linear flow).  Both
substeps preserve the discrete L2 norm, so mass is conserved to
roundoff and the energy drift is O(dt^2).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from qhdlab.grid import Grid, dealias_mask, deriv, integrate

log = logging.getLogger(__name__)


class BlowupError(RuntimeError):
    """Non-finite state encountered during time stepping."""

    def __init__(self, message, step=None, time=None, partial=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.partial = partial  # Trajectory of the snapshots saved so far


@dataclass(frozen=True)
class NlsParams:
    gamma: float
    dt: float
    t_end: float
    dealias: bool = False

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end must be >= dt, got {self.t_end}")

    def warn_if_coarse(self, grid: Grid):
        # accuracy heuristic only; the scheme itself is unconditionally stable
        if self.dt >= grid.dx**2:
            warnings.warn(
                f"dt = {self.dt:g} exceeds dx^2 = {grid.dx**2:g}; "
                "splitting error may dominate fine-scale dynamics",
                stacklevel=2,
            )


@dataclass
class Trajectory:
    """Snapshots of a single run; times[0] = 0 and times strictly increase."""

    grid: Grid
    times: np.ndarray
    states: list[np.ndarray]
    params: NlsParams

    def __len__(self):
        return len(self.times)


def nonlinear_density_power(psi: np.ndarray, gamma: float) -> np.ndarray:
    """|psi|^(2(gamma-1)) computed as rho^(gamma-1); 0^(gamma-1) := 0."""
    rho = np.abs(psi) ** 2
    if gamma == 2.0:
        return rho
    return rho ** (gamma - 1.0)


def nls_step(grid: Grid, psi: np.ndarray, dt: float, gamma: float,
             dealias: bool = False) -> np.ndarray:
    """One Strang step of size dt."""
    half = np.exp(-0.5j * dt * nonlinear_density_power(psi, gamma))
    psi = psi * half
    phases = np.exp(-0.5j * dt * grid.k**2)
    if dealias:
        phases = phases * dealias_mask(grid)
    psi = np.fft.ifft(phases * np.fft.fft(psi))
    half = np.exp(-0.5j * dt * nonlinear_density_power(psi, gamma))
    return psi * half


def dt_psi(grid: Grid, psi: np.ndarray, gamma: float) -> np.ndarray:
    """Instantaneous time derivative -i(-1/2 psi'' + |psi|^(2(gamma-1)) psi).

    Evaluated from the equation itself, not by finite differences.
    """
    return -1j * (-0.5 * deriv(grid, psi, 2) + nonlinear_density_power(psi, gamma) * psi)


def nls_energy(grid: Grid, psi: np.ndarray, gamma: float) -> float:
    """Conserved energy int 1/2 |psi_x|^2 + (1/gamma) |psi|^(2 gamma) dx."""
    dpsi = deriv(grid, psi, 1)
    rho = np.abs(psi) ** 2
    return integrate(grid, 0.5 * np.abs(dpsi) ** 2 + rho**gamma / gamma)


def nls_mass(grid: Grid, psi: np.ndarray) -> float:
    return integrate(grid, np.abs(psi) ** 2)


def evolve(grid: Grid, psi0: np.ndarray, params: NlsParams,
           save_every: int = 1) -> Trajectory:
    """Evolve psi0 to t_end, saving a snapshot every save_every steps.

    Snapshots are taken at t = 0, save_every*dt, ... and always at the
    final step.  Raises BlowupError (carrying the partial trajectory)
    if the state stops being finite.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if not grid.matches(psi0):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected ({grid.n_points},)")
    if not np.all(np.isfinite(psi0)):
        raise ValueError("psi0 is not finite")
    if save_every < 1:
        raise ValueError(f"save_every must be >= 1, got {save_every}")
    params.warn_if_coarse(grid)

    n_steps = int(round(params.t_end / params.dt))
    times = [0.0]
    states = [psi0.copy()]
    with np.errstate(over="ignore", invalid="ignore"):
        m0 = float(np.sum(np.abs(psi0) ** 2) * grid.dx)
    track_drift = np.isfinite(m0) and m0 > 0
    e0 = nls_energy(grid, psi0, params.gamma) if track_drift else float("nan")

    psi = psi0.copy()
    for step in range(1, n_steps + 1):
        psi = nls_step(grid, psi, params.dt, params.gamma, params.dealias)
        if step % save_every == 0 or step == n_steps:
            t = step * params.dt
            if not np.all(np.isfinite(psi)):
                raise BlowupError(
                    f"state became non-finite at step {step} (t = {t:g}); "
                    f"last valid snapshot at t = {times[-1]:g}",
                    step=step, time=t,
                    partial=Trajectory(grid, np.array(times), states, params),
                )
            times.append(t)
            states.append(psi.copy())
            if track_drift:
                mass_drift = abs(nls_mass(grid, psi) - m0) / m0
                energy_drift = abs(nls_energy(grid, psi, params.gamma) - e0) / max(e0, 1e-300)
                log.debug("t=%.6g mass drift %.3e energy drift %.3e",
                          t, mass_drift, energy_drift)

    return Trajectory(grid, np.array(times), states, params)
