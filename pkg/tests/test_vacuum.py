import numpy as np
import pytest

from qhdlab.grid import Grid, deriv, integrate
from qhdlab.polar import HydroState, energy_density, vacuum_mask
from qhdlab.functionals import compute_lambda
from qhdlab.decay import fit_decay
from qhdlab import vacuum


def abs_x_state(grid, width=1.0):
    x = grid.x
    g = np.exp(-0.5 * (x / width) ** 2)
    sr = np.abs(x) * g
    dsr = np.sign(x) * (1.0 - (x / width) ** 2) * g
    return HydroState(grid, sr, np.zeros_like(x), dsr)


def measure_for(grid, h, tau=1e-6, gamma=2.0):
    mask = vacuum_mask(h.sqrt_rho, tau)
    dec = vacuum.decompose_vacuum(grid, h, mask, gamma)
    chem = compute_lambda(grid, h, mask, gamma)
    return vacuum.lambda_measure(grid, h, chem, dec), dec, chem


class TestDecomposeVacuum:
    def test_no_vacuum_single_component(self):
        grid = Grid(10.0, 256)
        h = HydroState.from_fields(grid, np.ones(256), np.zeros(256))
        dec = vacuum.decompose_vacuum(grid, h, vacuum_mask(h.sqrt_rho, 1e-8), 2.0)
        assert len(dec) == 1
        assert (dec.components[0].lo, dec.components[0].hi) == (0, 255)

    def test_all_vacuum_empty(self):
        grid = Grid(10.0, 256)
        z = np.zeros(256)
        h = HydroState(grid, z, z, z)
        dec = vacuum.decompose_vacuum(grid, h, vacuum_mask(h.sqrt_rho, 1e-8), 2.0)
        assert len(dec) == 0

    def test_abs_x_one_sided_slopes(self):
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        dec = vacuum.decompose_vacuum(grid, h, vacuum_mask(h.sqrt_rho, 1e-6), 2.0)
        assert len(dec) == 2
        left, right = dec.components
        assert left.b == 0.0 and right.a == 0.0
        assert left.dx_sqrt_rho_b == pytest.approx(-1.0, abs=0.02)
        assert right.dx_sqrt_rho_a == pytest.approx(+1.0, abs=0.02)

    def test_narrow_component_flagged(self):
        grid = Grid(10.0, 256)
        sr = np.zeros(256)
        sr[100:103] = 1.0  # 3 samples wide
        h = HydroState(grid, sr, np.zeros(256), np.zeros(256))
        dec = vacuum.decompose_vacuum(grid, h, vacuum_mask(sr, 1e-8), 2.0)
        assert len(dec) == 1
        assert not dec.components[0].reliable
        assert dec.components[0].dx_sqrt_rho_a is None


class TestLambdaMeasure:
    def test_smooth_positive_state_has_no_atoms(self):
        grid = Grid(10.0, 512)
        h = HydroState.from_fields(grid, 1.0 + 0.3 * np.cos(np.pi * grid.x / 10),
                                   np.zeros(512))
        measure, _, _ = measure_for(grid, h, tau=1e-8)
        assert measure.atoms == []

    def test_abs_x_merged_atom_weight(self):
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        measure, _, _ = measure_for(grid, h)
        center = [a for a in measure.atoms if abs(a.x) < 0.01]
        assert len(center) == 1
        assert center[0].w == pytest.approx(-1.0, abs=0.05)
        assert center[0].reliable

    def test_atom_weight_stable_under_refinement(self):
        weights = []
        for n in (1024, 2048):
            grid = Grid(6.0, n)
            h = abs_x_state(grid)
            measure, _, _ = measure_for(grid, h)
            center = [a for a in measure.atoms if abs(a.x) < 0.01]
            weights.append(center[0].w)
        assert abs(weights[0] - weights[1]) < 0.01

    def test_fat_vacuum_edges_carry_tiny_weights(self):
        # e-continuity forces the slopes to vanish at fat-vacuum edges
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        measure, _, _ = measure_for(grid, h)
        outer = [a for a in measure.atoms if abs(a.x) >= 0.01]
        assert all(abs(a.w) < 1e-3 for a in outer)


class TestTestAgainst:
    def test_zero_test_function(self):
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        measure, _, _ = measure_for(grid, h)
        assert vacuum.test_against(measure, np.zeros(grid.n_points)) == 0.0

    def test_no_atoms_reduces_to_density_integral(self):
        grid = Grid(10.0, 512)
        h = HydroState.from_fields(grid, 1.0 + 0.3 * np.cos(np.pi * grid.x / 10),
                                   np.zeros(512))
        measure, _, chem = measure_for(grid, h, tau=1e-8)
        eta = np.exp(-grid.x**2)
        expected = integrate(grid, eta * chem.lam)
        assert vacuum.test_against(measure, eta) == pytest.approx(expected, rel=1e-12)

    def test_weak_form_pairing_oracle(self):
        # move both derivatives onto the test function:
        # <eta, lt> = int -1/2 sqrt_rho eta'' + f'(rho) sqrt_rho eta (Lambda = 0)
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        measure, _, _ = measure_for(grid, h)
        eta = np.exp(-2 * grid.x**2)
        lhs = vacuum.test_against(measure, eta)
        weak = integrate(grid, -0.5 * h.sqrt_rho * deriv(grid, eta, 2)
                         + h.rho * h.sqrt_rho * eta)
        assert abs(lhs - weak) < 1e-2

    def test_xi_consistency(self):
        # multiplying lambda_tilde by sqrt_rho kills the atoms: pairing
        # against sqrt_rho * eta equals the plain xi integral
        grid = Grid(6.0, 1024)
        h = abs_x_state(grid)
        measure, _, chem = measure_for(grid, h)
        rng = np.random.default_rng(3)
        for _ in range(5):
            eta = np.exp(-rng.uniform(0.5, 2) * (grid.x - rng.uniform(-1, 1)) ** 2)
            via_measure = vacuum.test_against(measure, h.sqrt_rho * eta)
            via_xi = integrate(grid, chem.xi * eta)
            assert abs(via_measure - via_xi) < 1e-6


class TestEnergySupScaling:
    def test_component_sup_scales_like_inverse_sqrt_width(self):
        # family with fixed per-component energy: sup sqrt(e) ~ w^{-1/2}
        grid = Grid(10.0, 2048)
        widths = np.geomspace(0.25, 4.0, 9)
        sups = []
        for w in widths:
            inside = np.abs(grid.x) < w / 2
            sr = np.zeros(grid.n_points)
            # amplitude ~ sqrt(w) keeps the component energy fixed; the
            # 0.05 prefactor keeps the pressure term subdominant
            sr[inside] = 0.05 * np.sqrt(w) * np.sin(
                np.pi * (grid.x[inside] + w / 2) / w) ** 2
            h = HydroState.from_fields(grid, sr, np.zeros(grid.n_points))
            e = energy_density(h, 2.0)
            sups.append(np.sqrt(np.max(e)))
        fit = fit_decay(widths, np.array(sups), (widths.min(), widths.max()))
        assert fit.slope == pytest.approx(-0.5, abs=0.15)
