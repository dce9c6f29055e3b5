import numpy as np
import pytest

from qhdlab.grid import Grid, deriv, integrate
from qhdlab.solver import (BlowupError, NlsParams, dt_psi, evolve, nls_energy,
                           nls_mass, nls_step)


@pytest.fixture
def grid():
    return Grid(10.0, 256)


def plane_wave(grid, A=1.0, mode=1):
    k = 2 * np.pi * mode / (2 * grid.half_length)
    return A * np.exp(1j * k * grid.x), k


class TestNlsStep:
    def test_zero_state_stays_zero(self, grid):
        psi = np.zeros(grid.n_points, dtype=complex)
        assert np.all(nls_step(grid, psi, 0.1, 2.0) == 0)

    def test_constant_state_single_step_exact(self, grid):
        # A = 1, k = 0, gamma = 2: dispersion gives omega = 1
        psi = np.ones(grid.n_points, dtype=complex)
        out = nls_step(grid, psi, 0.1, 2.0)
        assert np.max(np.abs(out - np.exp(-0.1j))) < 1e-12

    def test_mass_preserved_per_step(self, grid):
        rng = np.random.default_rng(0)
        psi = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
        m0 = nls_mass(grid, psi)
        out = nls_step(grid, psi, 1e-2, 2.0)
        assert abs(nls_mass(grid, out) - m0) / m0 < 1e-14

    def test_self_convergence_second_order(self, grid):
        psi0 = np.exp(-grid.x**2).astype(complex)
        sols = {}
        for dt in (2e-3, 1e-3, 5e-4):
            traj = evolve(grid, psi0, NlsParams(2.0, dt, 0.5), save_every=10**6)
            sols[dt] = traj.states[-1]
        err_coarse = np.max(np.abs(sols[2e-3] - sols[1e-3]))
        err_fine = np.max(np.abs(sols[1e-3] - sols[5e-4]))
        assert err_coarse / err_fine == pytest.approx(4.0, abs=0.5)


class TestEvolve:
    def test_zero_state(self, grid):
        psi0 = np.zeros(grid.n_points, dtype=complex)
        traj = evolve(grid, psi0, NlsParams(2.0, 1e-2, 0.1))
        assert all(np.all(s == 0) for s in traj.states)

    def test_times_start_at_zero_and_increase(self, grid):
        psi0 = np.exp(-grid.x**2).astype(complex)
        traj = evolve(grid, psi0, NlsParams(2.0, 1e-2, 0.1), save_every=3)
        assert traj.times[0] == 0.0
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[-1] == pytest.approx(0.1)

    def test_plane_wave_matches_analytic(self, grid):
        psi0, k = plane_wave(grid)
        traj = evolve(grid, psi0, NlsParams(2.0, 1e-3, 1.0), save_every=1000)
        omega = k**2 / 2 + 1.0
        exact = np.exp(1j * (k * grid.x - omega))
        assert np.max(np.abs(traj.states[-1] - exact)) < 1e-8

    def test_gaussian_conservation(self, gauss_traj_g2, gauss_grid):
        m0 = nls_mass(gauss_grid, gauss_traj_g2.states[0])
        e0 = nls_energy(gauss_grid, gauss_traj_g2.states[0], 2.0)
        for s in gauss_traj_g2.states:
            assert abs(nls_mass(gauss_grid, s) - m0) / m0 < 1e-12
            assert abs(nls_energy(gauss_grid, s, 2.0) - e0) / e0 < 1e-6

    def test_momentum_conserved(self, gauss_traj_g2, gauss_grid):
        def momentum(psi):
            return integrate(gauss_grid, (np.conj(psi) * deriv(gauss_grid, psi, 1)).imag)
        p0 = momentum(gauss_traj_g2.states[0])
        m0 = nls_mass(gauss_grid, gauss_traj_g2.states[0])
        for s in gauss_traj_g2.states:
            assert abs(momentum(s) - p0) / max(abs(p0), m0) < 1e-10

    def test_energy_drift_second_order(self, gauss_traj_g2, gauss_traj_g2_dthalf,
                                       gauss_grid):
        def drift(traj):
            e0 = nls_energy(gauss_grid, traj.states[0], 2.0)
            return max(abs(nls_energy(gauss_grid, s, 2.0) - e0) / e0
                       for s in traj.states[1:])
        ratio = drift(gauss_traj_g2) / drift(gauss_traj_g2_dthalf)
        assert ratio == pytest.approx(4.0, abs=0.5)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blowup_aborts_with_partial(self, grid):
        psi0 = np.full(grid.n_points, 1e200, dtype=complex)
        with pytest.raises(BlowupError) as err:
            evolve(grid, psi0, NlsParams(3.0, 1e-3, 0.01), save_every=1)
        assert err.value.partial is not None
        assert err.value.partial.times[-1] == 0.0

    def test_invalid_save_every(self, grid):
        psi0 = np.ones(grid.n_points, dtype=complex)
        with pytest.raises(ValueError):
            evolve(grid, psi0, NlsParams(2.0, 1e-2, 0.1), save_every=0)

    def test_dealias_preserves_mass_for_resolved_data(self, grid):
        # smooth data carry nothing in the top third of the spectrum,
        # so the 2/3 filter is a no-op there
        psi0 = np.exp(-grid.x**2).astype(complex)
        traj = evolve(grid, psi0, NlsParams(2.0, 1e-3, 0.2, dealias=True),
                      save_every=50)
        m0 = nls_mass(grid, traj.states[0])
        assert all(abs(nls_mass(grid, s) - m0) / m0 < 1e-12 for s in traj.states)


class TestDtPsi:
    def test_zero(self, grid):
        assert np.all(dt_psi(grid, np.zeros(grid.n_points, dtype=complex), 2.0) == 0)

    def test_constant_state(self, grid):
        psi = np.ones(grid.n_points, dtype=complex)
        assert np.max(np.abs(dt_psi(grid, psi, 2.0) + 1j * psi)) < 1e-14

    def test_real_gaussian_vs_analytic(self, grid):
        x = grid.x
        psi = np.exp(-(x**2)).astype(complex)
        expected = -1j * (-0.5 * (4 * x**2 - 2) * np.exp(-(x**2)) + psi**3)
        assert np.max(np.abs(dt_psi(grid, psi, 2.0) - expected)) < 1e-10

    def test_matches_centered_difference(self, grid):
        psi0 = np.exp(-grid.x**2).astype(complex)
        errs = []
        for dt in (2e-3, 1e-3):
            plus = evolve(grid, psi0, NlsParams(2.0, dt, dt)).states[-1]
            minus_traj = evolve(grid, np.conj(psi0), NlsParams(2.0, dt, dt))
            # time reversal: psi(-dt) = conj(evolve(conj(psi0), dt))
            minus = np.conj(minus_traj.states[-1])
            fd = (plus - minus) / (2 * dt)
            err = np.sqrt(integrate(grid, np.abs(fd - dt_psi(grid, psi0, 2.0)) ** 2))
            errs.append(err)
        assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.8)


class TestParams:
    def test_gamma_must_exceed_one(self):
        with pytest.raises(ValueError):
            NlsParams(1.0, 1e-3, 1.0)

    def test_coarse_dt_warns(self, grid):
        psi0 = np.ones(grid.n_points, dtype=complex)
        with pytest.warns(UserWarning, match="dx"):
            evolve(grid, psi0, NlsParams(2.0, 0.5, 0.5))
