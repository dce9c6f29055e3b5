"""1D quantum-hydrodynamics simulation laboratory.

Evolves hydrodynamic states (sqrt_rho, Lambda) through the associated
defocusing Schroedinger equation: data are lifted to a wave function,
evolved by a split-step spectral scheme, and mapped back by polar
factorization.  Diagnostics verify conservation laws, functional
identities, dispersive decay rates and the vacuum-boundary measure
structure of the generalized chemical potential.
"""

from qhdlab.grid import Grid, antiderivative, deriv, integrate
from qhdlab.solver import NlsParams, Trajectory, dt_psi, evolve, nls_step
from qhdlab.polar import HydroState, VacuumMask, energy_density, polar_factorize
from qhdlab.lifting import gcp_check, lift_h1, lift_h2

__all__ = [
    "Grid",
    "deriv",
    "integrate",
    "antiderivative",
    "NlsParams",
    "Trajectory",
    "nls_step",
    "evolve",
    "dt_psi",
    "HydroState",
    "VacuumMask",
    "polar_factorize",
    "energy_density",
    "lift_h1",
    "lift_h2",
    "gcp_check",
]
