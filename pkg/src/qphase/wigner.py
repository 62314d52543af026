"""Wigner transforms of wavefunctions and density matrices, and the basic
phase-space functionals built on them (marginals, averages, overlaps,
mixtures).

The transform is evaluated row by row: for each ``x_j`` the separation
``lam = 2 m dx`` puts ``x_j -+ lam/2`` on the grid points ``j -+ m``, and an
FFT over ``m`` produces the momentum row. Samples that would leave the box
are zero; the box is never wrapped here, because wrapping creates a
checkerboard ghost of the state half a box away.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .grid import Field2D, PhaseGrid, check_same_grid

__all__ = [
    "Wavefunction", "DensityMatrix", "MixtureSpec", "NormalizationError",
    "NonAdmissibleWarning", "wigner_from_psi", "wigner_from_rho",
    "rho_from_wigner", "marginals", "expectation", "overlap", "mix",
    "normalize",
]

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class NormalizationError(ValueError):
    pass


class NonAdmissibleWarning(UserWarning):
    """A constructed phase-space function may not be a physical state."""


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex amplitudes ``psi(x_j)`` with ``sum |psi|^2 dx = 1``."""
    values: np.ndarray
    grid: PhaseGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.nx,):
            raise ValueError(f"expected {self.grid.nx} amplitudes, got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    @property
    def density(self):
        return np.abs(self.values) ** 2

    def check_normalized(self, tol=NORM_TOL):
        if abs(self.norm - 1.0) > tol:
            raise NormalizationError(
                f"wavefunction norm is {self.norm!r}, expected 1 within {tol:g}")
        return self

    def inner(self, other):
        """``<self|other>`` by the rectangle rule."""
        return complex(np.vdot(self.values, other.values) * self.grid.dx)

    @property
    def boundary_leakage(self):
        """Largest probability density on the two outermost cells at each end."""
        d = self.density
        return float(max(d[:2].max(), d[-2:].max()))

    @classmethod
    def from_function(cls, func, grid, normalize_output=False):
        psi = cls(func(grid.x_values), grid)
        return normalize(psi) if normalize_output else psi


def normalize(psi):
    """Return ``psi`` rescaled to unit norm (explicit, never implicit)."""
    return Wavefunction(psi.values / np.sqrt(psi.norm), psi.grid)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense ``rho(x_i, x_j)`` on the x grid, Hermitian with ``sum rho_jj dx = 1``."""
    values: np.ndarray
    grid: PhaseGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        n = self.grid.nx
        if values.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def trace(self):
        return float(np.real(np.trace(self.values)) * self.grid.dx)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def check(self, trace_tol=NORM_TOL):
        scale = max(float(np.max(np.abs(self.values))), 1.0)
        if self.hermiticity_error() > HERMITIAN_TOL * scale:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace - 1.0) > trace_tol:
            raise NormalizationError(f"density matrix trace is {self.trace!r}")
        return self

    @classmethod
    def pure(cls, psi):
        return cls(np.outer(psi.values, psi.values.conj()), psi.grid)

    @classmethod
    def mixture(cls, weights, states):
        rho = sum(w * np.outer(s.values, s.values.conj())
                  for w, s in zip(weights, states))
        return cls(rho, states[0].grid)


@dataclass(frozen=True)
class MixtureSpec:
    weights: Sequence[float]
    states: Sequence

    def __post_init__(self):
        if len(self.weights) != len(self.states):
            raise ValueError("weights and states differ in length")
        if len(self.weights) == 0:
            raise ValueError("empty mixture")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError(
                f"mixture weights must sum to 1, got {float(np.sum(self.weights))!r}")


def _pair_indices(nx, npts):
    j = np.arange(nx)[:, None]
    m = (np.arange(npts) - npts // 2)[None, :]
    a, b = j - m, j + m
    valid = (a >= 0) & (a < nx) & (b >= 0) & (b < nx)
    # the unpaired Nyquist separation would break the Hermitian symmetry in m
    valid[:, 0] = False
    return np.where(valid, a, 0), np.where(valid, b, 0), valid


def _rows_to_wigner(f, grid):
    """FFT the separation samples ``f[j, m]`` into a real Wigner field."""
    npts = grid.npts
    scale = npts * grid.spec.dlam / (2.0 * np.pi * grid.hbar)
    rows = sfft.fftshift(sfft.ifft(sfft.ifftshift(f, axes=1), axis=1), axes=1) * scale
    re_max = float(np.max(np.abs(rows.real)))
    im_max = float(np.max(np.abs(rows.imag)))
    if im_max > 1e-12 * max(re_max, 1.0 / grid.h):
        raise ValueError(f"Wigner transform not real: max |Im| = {im_max:.3e}")
    return Field2D(rows.real, grid)


def wigner_from_psi(psi, check_norm=True):
    """Wigner function of a pure state.

    Parameters
    ----------
    psi : Wavefunction
        Normalized state; an unnormalized input raises
        :class:`NormalizationError` unless ``check_norm`` is False.
    """
    if check_norm:
        psi.check_normalized()
    g = psi.grid
    a, b, valid = _pair_indices(g.nx, g.npts)
    v = psi.values
    f = np.where(valid, v[a] * v[b].conj(), 0.0)
    return _rows_to_wigner(f, g)


def cross_wigner(psi1, psi2):
    """Cross term built from ``psi1(x - lam/2) psi2*(x + lam/2)``; complex in general."""
    g = psi1.grid
    a, b, valid = _pair_indices(g.nx, g.npts)
    f = np.where(valid, psi1.values[a] * psi2.values[b].conj(), 0.0)
    scale = g.npts * g.spec.dlam / (2.0 * np.pi * g.hbar)
    return sfft.fftshift(sfft.ifft(sfft.ifftshift(f, axes=1), axis=1), axes=1) * scale


def wigner_from_rho(rho, check=True):
    if check:
        rho.check()
    g = rho.grid
    a, b, valid = _pair_indices(g.nx, g.npts)
    f = np.where(valid, rho.values[a, b], 0.0)
    return _rows_to_wigner(f, g)


def _half_shift(rows, delta):
    """Band-limited shift of each row by ``delta`` samples (periodic)."""
    n = rows.shape[-1]
    nu = sfft.fftfreq(n)
    phase = np.exp(2j * np.pi * nu * delta)
    if n % 2 == 0:
        phase[n // 2] = np.cos(np.pi * delta)
    return sfft.ifft(sfft.fft(rows, axis=-1) * phase, axis=-1)


def rho_from_wigner(w):
    """Density matrix of a Wigner field (inverse transform).

    Entries with ``i + j`` even come straight from the inverse FFT over p;
    the remaining half are reconstructed by band-limited interpolation along
    each row.
    """
    g = w.grid
    nx, npts = g.nx, g.npts
    scale = npts * g.spec.dlam / (2.0 * np.pi * g.hbar)
    f = sfft.fftshift(sfft.fft(sfft.ifftshift(w.values, axes=1), axis=1), axes=1) / scale
    a, b, valid = _pair_indices(nx, npts)
    rho = np.zeros((nx, nx), dtype=complex)
    rho[a[valid], b[valid]] = f[valid]
    if nx >= 4:
        even_rows = rho[0::2, 0::2]
        odd_rows = rho[1::2, 1::2]
        rho[0::2, 1::2] = _half_shift(even_rows, 0.5)
        rho[1::2, 0::2] = _half_shift(odd_rows, -0.5)
        off = np.zeros((nx, nx), dtype=bool)
        off[0::2, 1::2] = True
        off[1::2, 0::2] = True
        sym = 0.5 * (rho + rho.conj().T)
        rho = np.where(off, sym, rho)
    return DensityMatrix(rho, g)


def marginals(w):
    """Return ``(int W dp, int W dx)`` sampled on the x and p axes."""
    g = w.grid
    return w.values.sum(axis=1) * g.dp, w.values.sum(axis=0) * g.dx


def _as_field(a, grid):
    if isinstance(a, Field2D):
        return a
    if callable(a):
        X, P = grid.mesh()
        return Field2D(np.broadcast_to(a(X, P), grid.shape), grid)
    return Field2D(np.broadcast_to(np.asarray(a, dtype=float), grid.shape), grid)


def expectation(w, a):
    """``<A> = int W A dx dp``; ``a`` may be a field, array, scalar or ``f(X, P)``."""
    af = _as_field(a, w.grid)
    check_same_grid(w, af)
    return float(np.sum(w.values * af.values) * w.grid.cell_area)


def overlap(w1, w2):
    check_same_grid(w1, w2)
    return float(np.sum(w1.values * w2.values) * w1.grid.cell_area)


def mix(spec):
    """Weighted sum of member Wigner fields.

    Negative weights are allowed (they are needed to build non-physical
    counterexamples) but trigger :class:`NonAdmissibleWarning`.
    """
    fields = [s if isinstance(s, Field2D) else wigner_from_psi(s) for s in spec.states]
    check_same_grid(*fields)
    if any(wt < 0 for wt in spec.weights):
        warnings.warn("mixture has negative weights; the result may not be an "
                      "admissible Wigner function", NonAdmissibleWarning, stacklevel=2)
    out = np.zeros(fields[0].grid.shape)
    for wt, f in zip(spec.weights, fields):
        out += wt * f.values
    return Field2D(out, fields[0].grid)

