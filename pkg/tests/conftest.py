"""Shared fixtures: the handful of trajectories the suite reuses.

All solver runs are deterministic, so session scope is safe; the
expensive dispersive runs (N = 2048) are computed once.
"""

import numpy as np
import pytest

from qhdlab.grid import Grid
from qhdlab.solver import NlsParams, evolve


@pytest.fixture(scope="session")
def gauss_grid():
    return Grid(20.0, 512)


@pytest.fixture(scope="session")
def gauss_traj_g2(gauss_grid):
    """Gaussian, gamma = 2, T = 1: conservation and identity checks."""
    psi0 = np.exp(-gauss_grid.x**2).astype(complex)
    return evolve(gauss_grid, psi0, NlsParams(2.0, 1e-3, 1.0), save_every=10)


@pytest.fixture(scope="session")
def gauss_traj_g2_dthalf(gauss_grid):
    psi0 = np.exp(-gauss_grid.x**2).astype(complex)
    return evolve(gauss_grid, psi0, NlsParams(2.0, 5e-4, 1.0), save_every=20)


@pytest.fixture(scope="session")
def gauss_traj_g2_T2(gauss_grid):
    """Fine snapshot cadence (every 4 steps) for Morawetz/Gronwall checks."""
    psi0 = np.exp(-gauss_grid.x**2).astype(complex)
    return evolve(gauss_grid, psi0, NlsParams(2.0, 1e-3, 2.0), save_every=4)


@pytest.fixture(scope="session")
def gauss_traj_g4():
    grid = Grid(30.0, 512)
    psi0 = np.exp(-grid.x**2).astype(complex)
    return evolve(grid, psi0, NlsParams(4.0, 1e-3, 2.0), save_every=10)


@pytest.fixture(scope="session")
def entropy_traj(gauss_grid):
    """Strictly positive density (rho >= 0.9): entropy-law checks."""
    psi0 = (1.0 + 0.3 * np.exp(-gauss_grid.x**2)).astype(complex)
    return evolve(gauss_grid, psi0, NlsParams(2.0, 5e-4, 1.0), save_every=5)


@pytest.fixture(scope="session")
def dispersive_traj_g2():
    grid = Grid(100.0, 2048)
    psi0 = np.exp(-grid.x**2).astype(complex)
    return evolve(grid, psi0, NlsParams(2.0, 2e-3, 12.0), save_every=50)


@pytest.fixture(scope="session")
def dispersive_traj_g4():
    grid = Grid(100.0, 2048)
    psi0 = np.exp(-grid.x**2).astype(complex)
    return evolve(grid, psi0, NlsParams(4.0, 2e-3, 8.0), save_every=50)
