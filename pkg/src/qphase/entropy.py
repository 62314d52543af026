"""Entropy functionals of phase-space fields and density matrices.

The central quantity is the quadratic entropy
``S2 = 1 - (2 pi hbar)^D int W^2``, with information ``I = 1 - S2``.
Reference entropies (von Neumann, Gibbs, Tsallis) are provided for
comparison, together with the local entropy density and flux, the
independent-subsystem product, and the two constrained maximizers.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la

from .grid import Field2D, boundary_leakage, integrate

__all__ = [
    "EntropyReport", "LocalEntropyProfile", "CanonicalParams", "ProductField",
    "NonAdmissibleError", "s2", "information", "s2_from_rho", "vn_entropy",
    "classical_entropy", "tsallis_discrete", "local_profile", "tensor_product",
    "microcanonical", "realized_area", "canonical_weq", "s2_array",
]

VN_CLIP = 1e-8
VN_REJECT = 1e-6


class NonAdmissibleError(ValueError):
    pass


@dataclass(frozen=True)
class EntropyReport:
    s2: float
    information: float
    norm: float
    min_value: float
    dof: int
    boundary_leakage: float = 0.0

    def as_dict(self):
        return dataclasses.asdict(self)


def information(w, dof=1):
    """``(2 pi hbar)^dof int W^2 dx dp``."""
    g = w.grid
    return float(g.h ** dof * np.sum(w.values ** 2) * g.cell_area)


def s2(w, dof=1):
    """Quadratic entropy of a field, with normalization diagnostics."""
    if dof not in (1, 2):
        raise ValueError("dof must be 1 or 2")
    info = information(w, dof)
    return EntropyReport(
        s2=1.0 - info,
        information=info,
        norm=integrate(w),
        min_value=float(np.min(w.values)),
        dof=dof,
        boundary_leakage=boundary_leakage(w),
    )


def s2_array(values, cell_area, hbar, dof):
    """Quadratic entropy of a raw array sampled with the given cell volume."""
    return 1.0 - (2.0 * np.pi * hbar) ** dof * float(np.sum(np.square(values))) * cell_area


def s2_from_rho(rho):
    """``1 - Tr rho^2`` with the grid measure ``dx`` folded into each factor."""
    rho.check()
    dx = rho.grid.dx
    return 1.0 - float(np.sum(np.abs(rho.values) ** 2)) * dx * dx


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def vn_entropy(rho):
    """Von Neumann entropy ``-sum l ln l`` of the trace-normalized ``rho dx``."""
    rho.check()
    evals = la.eigvalsh(rho.values * rho.grid.dx)
    evals = evals / np.sum(evals)
    lowest = float(evals.min())
    if lowest < -VN_REJECT:
        raise NonAdmissibleError(
            f"non-admissible density matrix (eigenvalue {lowest:.3e})")
    if lowest < -VN_CLIP:
        warnings.warn(f"clipping eigenvalue {lowest:.3e} to zero", RuntimeWarning,
                      stacklevel=2)
    evals = np.clip(evals, 0.0, None)
    return max(0.0, float(-np.sum(_xlogx(evals))))


def classical_entropy(f):
    """Gibbs entropy ``-int f ln(f h)`` of a non-negative normalized density."""
    if np.min(f.values) < -1e-12:
        raise ValueError("not a classical probability density (negative entries)")
    norm = integrate(f)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"density is not normalized (integral {norm!r})")
    g = f.grid
    v = np.clip(f.values, 0.0, None)
    return float(-np.sum(_xlogx(v * g.h)) / g.h * g.cell_area)


def tsallis_discrete(alphas, q):
    """``(1 - sum a_i^q) / (q - 1)``."""
    a = np.asarray(alphas, dtype=float)
    if abs(a.sum() - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    if q == 1:
        raise ValueError("q = 1 is singular; use the Shannon limit -sum a ln a")
    if np.any(a < 0) and not float(q).is_integer():
        raise ValueError("negative weights need an integer exponent q")
    return float((1.0 - np.sum(a ** q)) / (q - 1.0))


@dataclass(frozen=True)
class LocalEntropyProfile:
    sigma: np.ndarray
    flux: np.ndarray
    iota: Optional[np.ndarray] = None


def local_profile(w, psi=None):
    """Local entropy ``sigma(x)`` and flux ``J_S(x)``.

    When the generating wavefunction ``psi`` is supplied, the local
    information ``iota(x) = int n(x - lam/2) n(x + lam/2) dlam`` is added,
    computed from the density alone.
    """
    g = w.grid
    v = w.values
    h = g.h
    vel = g.p_values[None, :] / g.mass
    sigma = (v.sum(axis=1) - h * (v ** 2).sum(axis=1)) * g.dp
    flux = ((vel * v).sum(axis=1) - h * (vel * v ** 2).sum(axis=1)) * g.dp
    iota = None
    if psi is not None:
        n = psi.density
        nx = g.nx
        j = np.arange(nx)[:, None]
        m = (np.arange(g.npts) - g.npts // 2)[None, :]
        a, b = j - m, j + m
        valid = (a >= 0) & (a < nx) & (b >= 0) & (b < nx)
        valid[:, 0] = False
        prod = np.where(valid, n[np.where(valid, a, 0)] * n[np.where(valid, b, 0)], 0.0)
        iota = prod.sum(axis=1) * g.spec.dlam
    return LocalEntropyProfile(sigma, flux, iota)


@dataclass(frozen=True)
class ProductField:
    """``W(xA, pA, xB, pB) = WA(xA, pA) WB(xB, pB)`` without building the 4-D array."""
    wa: Field2D
    wb: Field2D

    def integrate(self):
        return integrate(self.wa) * integrate(self.wb)

    def quad(self):
        """``int W^2`` over the four phase-space variables."""
        ga, gb = self.wa.grid, self.wb.grid
        return (float(np.sum(self.wa.values ** 2)) * ga.cell_area
                * float(np.sum(self.wb.values ** 2)) * gb.cell_area)

    def information(self):
        return self.wa.grid.h * self.wb.grid.h * self.quad()

    def s2(self):
        return 1.0 - self.information()

    def materialize(self):
        return np.multiply.outer(self.wa.values, self.wb.values)


def tensor_product(wa, wb):
    return ProductField(wa, wb)


def microcanonical(omega, grid):
    """Flat distribution ``1 / Omega`` on a centered rectangle of area close to ``omega``.

    The rectangle has the cell count nearest to ``omega / cell_area`` and,
    among those, the aspect ratio closest to the grid box; use
    :func:`realized_area` for the area actually covered.
    """
    cells = omega / grid.cell_area
    if cells < 1.0:
        raise ValueError("omega is smaller than one grid cell")
    nx, npts = grid.shape
    # closest cell count first, then closest to the box aspect ratio
    best = None
    for a in range(1, nx + 1):
        b = int(min(npts, max(1, round(cells / a))))
        key = (abs(a * b - cells), abs(math.log(a * npts / (b * nx))))
        if best is None or key < best[0]:
            best = (key, a, b)
    _, a, b = best
    area = a * b * grid.cell_area
    values = np.zeros(grid.shape)
    i0, k0 = nx // 2 - a // 2, npts // 2 - b // 2
    values[i0:i0 + a, k0:k0 + b] = 1.0 / area
    return Field2D(values, grid)


def realized_area(w):
    """Support area of a flat field produced by :func:`microcanonical`."""
    return int(np.count_nonzero(w.values)) * w.grid.cell_area


@dataclass(frozen=True)
class CanonicalParams:
    beta: float
    potential: np.ndarray
    z_norm: Optional[float] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")


def canonical_weq(params, grid):
    """Truncated-linear maximizer ``Z^-1 (1 - beta E)`` on ``beta E < 1``.

    Returns ``(field, params)`` where the returned params carry the realized
    normalization ``z_norm``.
    """
    phi = np.asarray(params.potential, dtype=float)
    if phi.shape != (grid.nx,):
        raise ValueError("potential must have one value per x grid point")
    _, P = grid.mesh()
    energy = P ** 2 / (2.0 * grid.mass) + phi[:, None]
    shape = np.clip(1.0 - params.beta * energy, 0.0, None)
    z = float(np.sum(shape) * grid.cell_area)
    if z == 0.0:
        raise ValueError("empty support: beta E >= 1 everywhere on the grid")
    return Field2D(shape / z, grid), dataclasses.replace(params, z_norm=z)
