"""Phase-space discretization, quadrature, double Fourier transforms and
convolution.

The x axis holds ``nx`` points on ``[-x_half, x_half)``. The conjugate
separation variable of the Wigner transform is sampled with
``dlam = 2 * dx`` so that ``psi(x +- lam/2)`` always falls on grid points;
the momentum axis is then the FFT-induced grid with
``dp = 2 pi hbar / (npts * dlam)``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec", "PhaseGrid", "Field2D", "SpectralField", "GridMismatchError",
    "make_grid", "integrate", "fourier2", "inverse_fourier2", "convolve",
    "boundary_leakage", "write_field", "read_field", "MAGIC",
]

MAGIC = b"WPHS1\0"
_HEADER = struct.Struct("<6sIIddd")


class GridMismatchError(ValueError):
    """Raised when two fields that must share a grid do not."""


def _is_pow2(n):
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    nx: int = 256
    npts: int = 256
    x_half: float = 8.0
    hbar: float = 1.0
    mass: float = 1.0

    def validate(self):
        if not _is_pow2(self.nx):
            raise ValueError("nx must be a power of two")
        if not _is_pow2(self.npts):
            raise ValueError("npts must be a power of two")
        if self.nx < 2 or self.npts < 2:
            raise ValueError("grid sizes must be at least 2")
        for name in ("x_half", "hbar", "mass"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def dx(self):
        return 2.0 * self.x_half / self.nx

    @property
    def dlam(self):
        return 2.0 * self.dx

    @property
    def dp(self):
        return 2.0 * np.pi * self.hbar / (self.npts * self.dlam)


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Discretized phase space built from a :class:`GridSpec`.

    Use :func:`make_grid` rather than constructing this directly.
    """
    spec: GridSpec
    x_values: np.ndarray
    p_values: np.ndarray
    cell_area: float

    @property
    def nx(self):
        return self.spec.nx

    @property
    def npts(self):
        return self.spec.npts

    @property
    def hbar(self):
        return self.spec.hbar

    @property
    def mass(self):
        return self.spec.mass

    @property
    def dx(self):
        return self.spec.dx

    @property
    def dp(self):
        return self.spec.dp

    @property
    def h(self):
        """Planck's constant ``2 pi hbar``."""
        return 2.0 * np.pi * self.spec.hbar

    @property
    def shape(self):
        return (self.spec.nx, self.spec.npts)

    @property
    def k_values(self):
        """Centered wavenumbers conjugate to x."""
        n = self.spec.nx
        return (np.arange(n) - n // 2) * (2.0 * np.pi / (n * self.spec.dx))

    @property
    def lam_values(self):
        """Centered frequencies conjugate to p (units of 1/momentum)."""
        n = self.spec.npts
        return (np.arange(n) - n // 2) * (2.0 * np.pi / (n * self.spec.dp))

    def mesh(self):
        """Return ``(X, P)`` arrays of shape ``(nx, npts)``."""
        return np.meshgrid(self.x_values, self.p_values, indexing="ij")

    def field(self, values):
        return Field2D(np.asarray(values, dtype=float), self)

    def zeros(self):
        return Field2D(np.zeros(self.shape), self)

    def __eq__(self, other):
        return isinstance(other, PhaseGrid) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)


def make_grid(spec=None, **kwargs):
    """Build a :class:`PhaseGrid` from a spec (or keyword overrides).

    >>> g = make_grid(GridSpec(nx=2, npts=2, x_half=1.0))
    >>> g.x_values.tolist()
    [-1.0, 0.0]
    """
    if spec is None:
        spec = GridSpec(**kwargs)
    elif kwargs:
        raise TypeError("pass either a GridSpec or keyword arguments, not both")
    spec.validate()
    x = (np.arange(spec.nx) - spec.nx // 2) * spec.dx
    p = (np.arange(spec.npts) - spec.npts // 2) * spec.dp
    return PhaseGrid(spec, x, p, spec.dx * spec.dp)


@dataclass(frozen=True, eq=False)
class Field2D:
    """A real field sampled on a phase grid, ``values[i, k] = F(x_i, p_k)``."""
    values: np.ndarray
    grid: PhaseGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", values)

    def _coerce(self, other):
        if isinstance(other, Field2D):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field2D(self.values + self._coerce(other), self.grid)

    __radd__ = __add__

    def __sub__(self, other):
        return Field2D(self.values - self._coerce(other), self.grid)

    def __rsub__(self, other):
        return Field2D(self._coerce(other) - self.values, self.grid)

    def __mul__(self, other):
        return Field2D(self.values * self._coerce(other), self.grid)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field2D(self.values / self._coerce(other), self.grid)

    def __neg__(self):
        return Field2D(-self.values, self.grid)

    def max_abs_diff(self, other):
        return float(np.max(np.abs(self.values - self._coerce(other))))

    @property
    def boundary_leakage(self):
        return boundary_leakage(self)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex field over the conjugate variables ``(k, lam)``."""
    values: np.ndarray
    grid: PhaseGrid

    @property
    def k_values(self):
        return self.grid.k_values

    @property
    def lam_values(self):
        return self.grid.lam_values

    @property
    def dk(self):
        return 2.0 * np.pi / (self.grid.nx * self.grid.dx)

    @property
    def dlam(self):
        return 2.0 * np.pi / (self.grid.npts * self.grid.dp)

    def at_origin(self):
        return self.values[self.grid.nx // 2, self.grid.npts // 2]


def check_same_grid(*fields):
    first = fields[0].grid
    for f in fields[1:]:
        if f.grid != first:
            raise GridMismatchError("fields are defined on different grids")
    return first


def integrate(field):
    """Rectangle-rule integral ``cell_area * sum(values)``."""
    return float(field.grid.cell_area * np.sum(field.values))


def boundary_leakage(field, width=2):
    """Largest ``|F|`` on the outermost ``width`` cells of either axis."""
    v = np.abs(field.values)
    return float(max(v[:width].max(), v[-width:].max(),
                     v[:, :width].max(), v[:, -width:].max()))


def fourier2(field):
    """Double Fourier transform ``int int F exp(-ikx - i lam p) dx dp``.

    The output is centered, so ``values[nx//2, npts//2]`` is the
    ``(k, lam) = (0, 0)`` component and equals :func:`integrate`.
    """
    g = field.grid
    spec = sfft.fftshift(sfft.fft2(sfft.ifftshift(field.values)))
    return SpectralField(spec * g.cell_area, g)


def inverse_fourier2(spectral, check_real=True):
    """Invert :func:`fourier2`; returns a real :class:`Field2D`."""
    g = spectral.grid
    out = sfft.fftshift(sfft.ifft2(sfft.ifftshift(spectral.values))) / g.cell_area
    if check_real:
        scale = max(np.max(np.abs(out.real)), 1e-300)
        imag = np.max(np.abs(out.imag))
        if imag > 1e-8 * scale + 1e-300:
            raise ValueError(f"inverse transform is not real (max |Im| = {imag:.3e})")
    return Field2D(out.real, g)


def convolve(a, b):
    """Phase-space convolution ``(a * b)(x, p) = int a(x', p') b(x - x', p - p')``.

    Computed spectrally, so the box is treated as periodic.
    """
    check_same_grid(a, b)
    g = a.grid
    fa = sfft.fft2(sfft.ifftshift(a.values))
    fb = sfft.fft2(sfft.ifftshift(b.values))
    out = sfft.fftshift(sfft.ifft2(fa * fb).real) * g.cell_area
    return Field2D(out, g)


def write_field(path, field):
    """Write a field in the ``WPHS1`` little-endian binary format."""
    s = field.grid.spec
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, s.nx, s.npts, s.x_half, s.hbar, s.mass))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("file too short for a WPHS1 header")
    magic, nx, npts, x_half, hbar, mass = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError("bad magic bytes, not a WPHS1 grid dump")
    grid = make_grid(GridSpec(nx, npts, x_half, hbar, mass))
    expected = _HEADER.size + 8 * nx * npts
    if len(data) != expected:
        raise ValueError(f"expected {expected} bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(nx, npts)
    return Field2D(values.astype(float), grid)
