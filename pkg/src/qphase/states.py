"""Catalog of named test states: Gaussian packets, the odd two-lobe state,
coherent states, oscillator eigenstates and seeded random superpositions."""
from __future__ import annotations

import math

import numpy as np

from .grid import Field2D
from .oscillator import OscillatorParams, hermite_functions, ho_eigenstate
from .wigner import Wavefunction, normalize, wigner_from_psi

__all__ = [
    "gaussian_psi", "gaussian_wigner", "example_psi", "coherent_psi",
    "random_superposition", "pure_catalog",
]


def gaussian_psi(grid, sigma, x0=0.0, p0=0.0):
    """Minimum-uncertainty packet ``(2 pi)^-1/4 sigma^-1/2 exp(-x^2 / 4 sigma^2)``,
    optionally displaced to ``(x0, p0)``."""
    x = grid.x_values - x0
    amp = (2.0 * np.pi) ** -0.25 / math.sqrt(sigma) * np.exp(-x ** 2 / (4.0 * sigma ** 2))
    return Wavefunction(amp * np.exp(1j * p0 * grid.x_values / grid.hbar), grid)


def gaussian_wigner(grid, sigma, x0=0.0, p0=0.0):
    """Closed-form Wigner function of :func:`gaussian_psi`."""
    X, P = grid.mesh()
    hbar = grid.hbar
    values = np.exp(-(X - x0) ** 2 / (2.0 * sigma ** 2)
                    - 2.0 * (P - p0) ** 2 * sigma ** 2 / hbar ** 2) / (np.pi * hbar)
    return Field2D(values, grid)


def example_psi(grid):
    """The odd state ``2 (2/pi)^(1/4) x exp(-x^2)``."""
    x = grid.x_values
    return Wavefunction(2.0 * (2.0 / np.pi) ** 0.25 * x * np.exp(-x ** 2), grid)


def coherent_psi(grid, x0, p0, params=None):
    """Oscillator ground state displaced to ``(x0, p0)``."""
    params = params or OscillatorParams.for_grid(grid)
    return gaussian_psi(grid, params.sigma, x0, p0)


def random_superposition(grid, rng, nmax=6, params=None):
    """Normalized random complex combination of eigenstates ``0..nmax``."""
    params = params or OscillatorParams.for_grid(grid)
    scale = math.sqrt(params.mass * params.omega / params.hbar)
    basis = hermite_functions(nmax, grid.x_values * scale) * math.sqrt(scale)
    c = rng.normal(size=nmax + 1) + 1j * rng.normal(size=nmax + 1)
    return normalize(Wavefunction(c @ basis, grid))


def pure_catalog(grid, seed=0, n_max=4, n_random=3, include_example=True):
    """Dictionary ``name -> Wavefunction`` of pure states used across tests."""
    states = {f"ho:{n}": ho_eigenstate(n, grid=grid) for n in range(n_max + 1)}
    if include_example:
        states["example-eq"] = example_psi(grid)
    states["coherent:1.5,-1"] = coherent_psi(grid, 1.5, -1.0)
    states["squeezed:0.4"] = gaussian_psi(grid, 0.4)
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        states[f"random:{seed}:{i}"] = random_superposition(grid, rng, nmax=4)
    return states


def catalog_wigners(grid, **kwargs):
    return {name: wigner_from_psi(psi) for name, psi in pure_catalog(grid, **kwargs).items()}
