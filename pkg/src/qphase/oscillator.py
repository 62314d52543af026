"""Closed-form harmonic-oscillator states used as oracles.

Hermite functions and Laguerre polynomials are generated by three-term
recurrences; the information ladder is evaluated through log-gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field2D
from .wigner import Wavefunction

__all__ = [
    "OscillatorParams", "UnderResolvedError", "hamiltonian", "hermite_functions",
    "laguerre", "ho_eigenstate", "ho_wigner_closed", "ho_smoothed_closed",
    "ho_info_ladder", "ho_info_ladder_exact",
]

MAX_N = 20
MAX_LADDER_N = 60
LEAKAGE_TOL = 1e-10


class UnderResolvedError(ValueError):
    pass


@dataclass(frozen=True)
class OscillatorParams:
    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "omega", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def sigma(self):
        """Natural width ``sqrt(hbar / 2 m omega)`` of the ground state."""
        return math.sqrt(self.hbar / (2.0 * self.mass * self.omega))

    @classmethod
    def for_grid(cls, grid, omega=1.0):
        return cls(grid.mass, omega, grid.hbar)


def hamiltonian(x, p, params):
    return p ** 2 / (2.0 * params.mass) + 0.5 * params.mass * params.omega ** 2 * x ** 2


def hermite_functions(nmax, xi):
    """Normalized Hermite functions ``h_0 .. h_nmax`` of ``xi`` (unit L2 norm in xi)."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, nmax):
        out[n + 1] = (math.sqrt(2.0 / (n + 1)) * xi * out[n]
                      - math.sqrt(n / (n + 1)) * out[n - 1])
    return out


def laguerre(n, xi):
    """Laguerre polynomial ``L_n(xi)``: ``L_0 = 1, L_1 = 1 - xi, L_2 = 1 - 2 xi + xi^2/2``."""
    xi = np.asarray(xi, dtype=float)
    prev, cur = np.ones_like(xi), 1.0 - xi
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - xi) * cur - k * prev) / (k + 1)
    return cur


def _check_n(n, limit=MAX_N):
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= limit):
        raise ValueError(f"n must be an integer in [0, {limit}], got {n!r}")


def _params(params, grid):
    if grid is None:
        raise TypeError("a PhaseGrid is required")
    if params is None:
        params = OscillatorParams.for_grid(grid)
    if not math.isclose(params.hbar, grid.hbar):
        raise ValueError("oscillator hbar differs from the grid hbar")
    return params


def ho_eigenstate(n, params=None, grid=None, check_resolution=True):
    """Eigenstate ``psi_n`` on the grid, with the sign convention of ``H_n``."""
    _check_n(n)
    params = _params(params, grid)
    scale = math.sqrt(params.mass * params.omega / params.hbar)
    xi = grid.x_values * scale
    psi = Wavefunction(hermite_functions(n, xi)[n] * math.sqrt(scale), grid)
    if check_resolution and psi.boundary_leakage > LEAKAGE_TOL:
        raise UnderResolvedError(
            f"state n={n} is not contained in the box (leakage {psi.boundary_leakage:.2e})")
    return psi


def _energy_ratio(params, grid):
    X, P = grid.mesh()
    return hamiltonian(X, P, params) / (params.hbar * params.omega)


def ho_wigner_closed(n, params=None, grid=None):
    _check_n(n)
    params = _params(params, grid)
    e = _energy_ratio(params, grid)
    values = (-1) ** n / (np.pi * params.hbar) * np.exp(-2.0 * e) * laguerre(n, 4.0 * e)
    return Field2D(values, grid)


def ho_smoothed_closed(n, params=None, grid=None):
    """Eigenstate Wigner function smoothed with the Gaussian of width ``params.sigma``.

    Closed form ``(2 pi hbar n!)^-1 (H / hbar omega)^n exp(-H / hbar omega)``;
    only valid for the matched kernel width.
    """
    _check_n(n)
    params = _params(params, grid)
    e = _energy_ratio(params, grid)
    with np.errstate(divide="ignore"):
        log_e = np.where(e > 0, np.log(np.where(e > 0, e, 1.0)), -np.inf)
    logv = n * log_e - e - math.lgamma(n + 1) if n > 0 else -e
    values = np.exp(logv) / (2.0 * np.pi * params.hbar)
    return Field2D(values, grid)


def ho_info_ladder(n):
    """Information ``(2n)! / (2^(2n+1) (n!)^2)`` of the smoothed eigenstate ``n``."""
    if not (isinstance(n, (int, np.integer)) and n >= 0):
        raise ValueError("n must be a non-negative integer")
    if n > MAX_LADDER_N:
        raise ValueError(f"n must be at most {MAX_LADDER_N}")
    log_i = math.lgamma(2 * n + 1) - (2 * n + 1) * math.log(2.0) - 2.0 * math.lgamma(n + 1)
    return math.exp(log_i)


def ho_info_ladder_exact(n):
    """Same quantity as an exact :class:`fractions.Fraction`."""
    from fractions import Fraction
    return Fraction(math.comb(2 * n, n), 2 ** (2 * n + 1))
