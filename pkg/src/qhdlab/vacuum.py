"""Vacuum-boundary structure of the generalized chemical potential.

The non-vacuum set decomposes into maximal components (a_j, b_j); on
each, d_x sqrt_rho and sqrt(e) extend continuously to the boundary
(their derivatives are integrable up to it), so one-sided boundary
values can be extrapolated from interior samples.  The chemical
potential then extends from a density to the Radon measure

    lambda_tilde = lambda dx
        + 1/2 sum_j ( d_x sqrt_rho(b_j-) delta_{b_j}
                      - d_x sqrt_rho(a_j+) delta_{a_j} ),

whose atoms record the jumps of d_x sqrt_rho across vacuum.  An
isolated vacuum point is a shared boundary b_{j-1} = a_j; its two atoms
merge by weight addition (for the |x| amplitude profile this yields the
single atom of weight -1 that -1/2 d_x^2 |x| = -delta_0 demands).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qhdlab.functionals import ChemicalFields
from qhdlab.grid import Grid, integrate
from qhdlab.lifting import extrapolate_boundary_value, nonvacuum_components
from qhdlab.polar import HydroState, VacuumMask, energy_density

MIN_RELIABLE_WIDTH = 4  # samples; narrower components get no boundary values
CROWDING_GAP = 4  # components closer than this (samples) are flagged
ATOM_DROP_REL = 1e-6  # drop atoms below this fraction of max |d_x sqrt_rho|


@dataclass(frozen=True)
class ComponentBoundary:
    """One non-vacuum component with extrapolated one-sided limits."""

    lo: int
    hi: int
    a: float  # left boundary location (adjacent vacuum sample, or box edge)
    b: float
    dx_sqrt_rho_a: float | None
    dx_sqrt_rho_b: float | None
    sqrt_e_a: float | None
    sqrt_e_b: float | None
    reliable: bool
    crowded: bool = False


@dataclass
class VacuumDecomposition:
    components: list[ComponentBoundary]

    def __len__(self):
        return len(self.components)


@dataclass(frozen=True)
class Atom:
    x: float
    w: float
    reliable: bool = True

    def as_dict(self) -> dict:
        return {"x": self.x, "w": self.w, "flag": None if self.reliable else "unreliable"}


@dataclass
class LambdaMeasure:
    """density part lambda(x) plus point atoms at vacuum boundaries."""

    grid: Grid
    density: np.ndarray
    atoms: list[Atom]


def decompose_vacuum(grid: Grid, h: HydroState, mask: VacuumMask,
                     gamma: float) -> VacuumDecomposition:
    """Split {rho > 0} into components and extrapolate boundary values.

    Boundary locations sit at the adjacent vacuum sample (so the two
    sides of an isolated vacuum point coincide); components narrower
    than 4 samples are flagged unreliable and carry no boundary values.
    """
    comps = nonvacuum_components(mask.is_vacuum)
    sqrt_e = np.sqrt(energy_density(h, gamma))
    x = grid.x
    out = []
    for idx, (lo, hi) in enumerate(comps):
        a = x[lo - 1] if lo > 0 else x[0]
        b = x[hi + 1] if hi < grid.n_points - 1 else x[-1] + grid.dx
        width = hi - lo + 1
        reliable = width >= MIN_RELIABLE_WIDTH
        if reliable:
            left = np.arange(lo, min(lo + 4, hi + 1))
            right = np.arange(max(hi - 3, lo), hi + 1)
            vals = dict(
                dx_sqrt_rho_a=extrapolate_boundary_value(h.dx_sqrt_rho, left, a, x),
                dx_sqrt_rho_b=extrapolate_boundary_value(h.dx_sqrt_rho, right, b, x),
                sqrt_e_a=extrapolate_boundary_value(sqrt_e, left, a, x),
                sqrt_e_b=extrapolate_boundary_value(sqrt_e, right, b, x),
            )
        else:
            vals = dict(dx_sqrt_rho_a=None, dx_sqrt_rho_b=None,
                        sqrt_e_a=None, sqrt_e_b=None)
        # a width-1 gap merges into a single atom and is unambiguous; flag
        # only distinct boundaries closer than the extrapolation stencil
        crowded = False
        if idx > 0:
            crowded = 1 < lo - comps[idx - 1][1] - 1 <= CROWDING_GAP
        if idx + 1 < len(comps):
            crowded = crowded or 1 < comps[idx + 1][0] - hi - 1 <= CROWDING_GAP
        out.append(ComponentBoundary(lo, hi, float(a), float(b),
                                     reliable=reliable, crowded=crowded, **vals))
    return VacuumDecomposition(out)


def lambda_measure(grid: Grid, h: HydroState, chem: ChemicalFields,
                   dec: VacuumDecomposition) -> LambdaMeasure:
    """Assemble lambda_tilde: density = chemical-potential field, atoms
    +1/2 d_x sqrt_rho(b-) at b and -1/2 d_x sqrt_rho(a+) at a, merged at
    coincident locations."""
    raw: dict[float, list] = {}

    def add(x_loc, w, reliable):
        entry = raw.setdefault(round(x_loc, 12), [0.0, True])
        entry[0] += w
        entry[1] = entry[1] and reliable

    n_comp = len(dec.components)
    for i, c in enumerate(dec.components):
        interior_a = c.lo > 0  # the box edge is truncation, not a vacuum boundary
        interior_b = c.hi < grid.n_points - 1
        if interior_a:
            if c.reliable:
                add(c.a, -0.5 * c.dx_sqrt_rho_a, not c.crowded)
            else:
                add(c.a, 0.0, False)
        if interior_b:
            if c.reliable:
                add(c.b, +0.5 * c.dx_sqrt_rho_b, not c.crowded)
            else:
                add(c.b, 0.0, False)

    scale = float(np.max(np.abs(h.dx_sqrt_rho))) if n_comp else 0.0
    atoms = []
    for x_loc, (w, reliable) in sorted(raw.items()):
        if abs(w) < ATOM_DROP_REL * scale and reliable:
            continue  # extrapolation noise floor
        atoms.append(Atom(float(x_loc), float(w), reliable))
    return LambdaMeasure(grid, chem.lam.copy(), atoms)


def test_against(measure: LambdaMeasure, eta: np.ndarray) -> float:
    """Pairing <eta, lambda_tilde> = int eta lambda dx + sum_j w_j eta(x_j).

    eta must be smooth and supported away from the box edges; atom
    locations are evaluated by linear interpolation of eta.
    """
    grid = measure.grid
    total = integrate(grid, eta * measure.density)
    for atom in measure.atoms:
        total += atom.w * float(np.interp(atom.x, grid.x, eta))
    return float(total)
