"""Polar factorization: hydrodynamic state (sqrt_rho, Lambda) from a wave field.

Writing psi = sqrt_rho * phi with |phi| = 1 off vacuum,

    sqrt_rho   = |psi|
    Lambda     = Im(conj(phi) psi_x)
    d_x sqrt_rho = Re(conj(phi) psi_x)

and pointwise |psi_x|^2 = (d_x sqrt_rho)^2 + Lambda^2 off vacuum.  On
the (thresholded) vacuum set both Lambda and d_x sqrt_rho are set to
zero: derivatives of an H^1 function vanish a.e. on its zero set, so
this is the faithful discrete analogue.  psi_x is always computed
spectrally from psi, never by differencing sqrt_rho, which is only
Lipschitz across vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qhdlab.grid import Grid, deriv


@dataclass(frozen=True)
class VacuumMask:
    """Samples with sqrt_rho below tau_rel * max(sqrt_rho)."""

    is_vacuum: np.ndarray
    tau_rel: float

    @property
    def any_vacuum(self) -> bool:
        return bool(np.any(self.is_vacuum))


def vacuum_mask(sqrt_rho: np.ndarray, tau_rel: float) -> VacuumMask:
    if not 0.0 < tau_rel < 1.0:
        raise ValueError(f"tau_rel must lie in (0, 1), got {tau_rel}")
    peak = float(np.max(sqrt_rho)) if len(sqrt_rho) else 0.0
    if peak == 0.0:
        mask = np.ones(len(sqrt_rho), dtype=bool)
    else:
        mask = sqrt_rho < tau_rel * peak
    return VacuumMask(mask, tau_rel)


@dataclass
class HydroState:
    """Hydrodynamic state carried by (sqrt_rho, Lambda, d_x sqrt_rho).

    rho and J are derived exactly: rho = sqrt_rho^2, J = sqrt_rho * Lambda.
    """

    grid: Grid
    sqrt_rho: np.ndarray
    Lambda: np.ndarray
    dx_sqrt_rho: np.ndarray

    def __post_init__(self):
        for name in ("sqrt_rho", "Lambda", "dx_sqrt_rho"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if not self.grid.matches(arr):
                raise ValueError(f"{name} has shape {arr.shape}, "
                                 f"expected ({self.grid.n_points},)")
            setattr(self, name, arr)
        if np.any(self.sqrt_rho < 0):
            raise ValueError("sqrt_rho must be nonnegative")

    @property
    def rho(self) -> np.ndarray:
        return self.sqrt_rho**2

    @property
    def J(self) -> np.ndarray:
        return self.sqrt_rho * self.Lambda

    @classmethod
    def from_fields(cls, grid: Grid, sqrt_rho, Lambda, dx_sqrt_rho=None):
        """Build a state from raw fields.

        If dx_sqrt_rho is omitted it is computed spectrally, which is
        only appropriate for smooth (vacuum-free) amplitudes; states
        with vacuum should pass their one-sided derivative data
        explicitly.
        """
        sqrt_rho = np.asarray(sqrt_rho, dtype=float)
        if dx_sqrt_rho is None:
            dx_sqrt_rho = deriv(grid, sqrt_rho, 1)
        return cls(grid, sqrt_rho, np.asarray(Lambda, dtype=float),
                   np.asarray(dx_sqrt_rho, dtype=float))


def polar_factorize(grid: Grid, psi: np.ndarray,
                    tau_rel: float = 1e-8) -> tuple[HydroState, VacuumMask]:
    """Extract (sqrt_rho, Lambda, d_x sqrt_rho) from psi.

    The polar factor on vacuum samples is taken to be 1 (any unimodular
    choice is valid there); no diagnostic ever reads it.
    """
    psi = np.asarray(psi, dtype=complex)
    if not np.all(np.isfinite(psi)):
        raise ValueError("psi is not finite")
    sqrt_rho = np.abs(psi)
    mask = vacuum_mask(sqrt_rho, tau_rel)
    dpsi = deriv(grid, psi, 1)

    phi = np.ones_like(psi)
    live = ~mask.is_vacuum
    phi[live] = psi[live] / sqrt_rho[live]
    projected = np.conj(phi) * dpsi

    Lambda = np.where(live, projected.imag, 0.0)
    dx_sqrt_rho = np.where(live, projected.real, 0.0)
    return HydroState(grid, sqrt_rho, Lambda, dx_sqrt_rho), mask


def internal_energy(rho: np.ndarray, gamma: float) -> np.ndarray:
    """gamma-law internal energy f(rho) = rho^gamma / gamma."""
    return rho**gamma / gamma


def pressure(rho: np.ndarray, gamma: float) -> np.ndarray:
    """p(rho) = rho f'(rho) - f(rho) = (gamma-1)/gamma rho^gamma."""
    return (gamma - 1.0) / gamma * rho**gamma


def energy_density(h: HydroState, gamma: float) -> np.ndarray:
    """e = 1/2 (d_x sqrt_rho)^2 + 1/2 Lambda^2 + f(rho), pointwise."""
    return 0.5 * h.dx_sqrt_rho**2 + 0.5 * h.Lambda**2 + internal_energy(h.rho, gamma)
