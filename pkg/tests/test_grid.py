import numpy as np
import pytest

from qphase.grid import (Field2D, GridMismatchError, GridSpec, boundary_leakage, convolve,
                         fourier2, integrate, inverse_fourier2, make_grid, read_field,
                         write_field)
from qphase.states import gaussian_wigner


def test_default_spacings(grid):
    assert grid.dx == 1 / 16
    assert grid.spec.dlam == 1 / 8
    assert np.isclose(grid.dp, 2 * np.pi / 32)
    assert np.isclose(grid.cell_area, grid.dx * grid.dp)


def test_tiny_grid_axes():
    g = make_grid(GridSpec(nx=2, npts=2, x_half=1.0))
    assert g.x_values.tolist() == [-1.0, 0.0]


def test_axes_ascending_uniform(grid):
    assert np.allclose(np.diff(grid.x_values), grid.dx)
    assert np.allclose(np.diff(grid.p_values), grid.dp)
    assert grid.p_values[grid.npts // 2] == 0.0


@pytest.mark.parametrize("kwargs, msg", [
    ({"nx": 255}, "nx must be a power of two"),
    ({"npts": 100}, "npts must be a power of two"),
    ({"x_half": 0.0}, "x_half"),
    ({"hbar": -1.0}, "hbar"),
    ({"mass": 0.0}, "mass"),
])
def test_invalid_specs(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        make_grid(GridSpec(**kwargs))


def test_integrate_constant_and_zero():
    g = make_grid(GridSpec(nx=4, npts=4, x_half=2.0))
    assert integrate(Field2D(np.ones(g.shape), g)) == pytest.approx(16 * g.cell_area)
    assert integrate(g.zeros()) == 0.0


def test_integrate_gaussian(grid):
    assert abs(integrate(gaussian_wigner(grid, 0.7)) - 1.0) < 1e-8


def test_field_rejects_nonfinite(grid):
    v = np.zeros(grid.shape)
    v[3, 3] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        Field2D(v, grid)
    with pytest.raises(ValueError, match="shape"):
        Field2D(np.zeros((3, 3)), grid)


def test_fourier_origin_is_integral(grid):
    spec = fourier2(gaussian_wigner(grid, 0.6, x0=1.0, p0=-0.5))
    assert abs(spec.at_origin() - 1.0) < 1e-10


def test_fourier_of_gaussian_matches_closed_form(grid):
    sigma = 0.8
    spec = fourier2(gaussian_wigner(grid, sigma))
    K, L = np.meshgrid(grid.k_values, grid.lam_values, indexing="ij")
    expected = np.exp(-K ** 2 * sigma ** 2 / 2 - L ** 2 * grid.hbar ** 2 / (8 * sigma ** 2))
    assert np.max(np.abs(spec.values - expected)) < 1e-8


def test_fourier_round_trip(grid):
    rng = np.random.default_rng(1)
    w = Field2D(rng.normal(size=grid.shape), grid)
    back = inverse_fourier2(fourier2(w))
    assert back.max_abs_diff(w) < 1e-12 * np.max(np.abs(w.values))


def test_inverse_rejects_complex_field(grid):
    spec = fourier2(gaussian_wigner(grid, 0.7))
    bad = type(spec)(spec.values * 1j + spec.values * 0.5, grid)
    with pytest.raises(ValueError, match="not real"):
        inverse_fourier2(bad)


def test_delta_convolution_shifts(grid):
    rng = np.random.default_rng(2)
    b = Field2D(rng.normal(size=grid.shape), grid)
    d = np.zeros(grid.shape)
    i0, k0 = grid.nx // 2 + 5, grid.npts // 2 - 3
    d[i0, k0] = 1.0 / grid.cell_area
    out = convolve(Field2D(d, grid), b)
    assert np.max(np.abs(out.values - np.roll(b.values, (5, -3), axis=(0, 1)))) < 1e-10


def test_gaussian_self_convolution(grid):
    sigma = 0.7
    out = convolve(gaussian_wigner(grid, sigma), gaussian_wigner(grid, sigma))
    # smoothed Gaussian: variances add in both x and p
    sx2 = 2 * sigma ** 2
    sp2 = grid.hbar ** 2 / (2 * sigma ** 2)
    X, P = grid.mesh()
    expected = np.exp(-X ** 2 / (2 * sx2) - P ** 2 / (2 * sp2)) / (2 * np.pi * np.sqrt(sx2 * sp2))
    assert np.max(np.abs(out.values - expected)) < 1e-10


def test_convolve_grid_mismatch(grid, small_grid):
    with pytest.raises(GridMismatchError):
        convolve(gaussian_wigner(grid, 0.7), gaussian_wigner(small_grid, 0.7))


def test_boundary_leakage(grid):
    assert boundary_leakage(gaussian_wigner(grid, 0.7)) < 1e-12
    assert boundary_leakage(Field2D(np.ones(grid.shape), grid)) == 1.0


def test_binary_round_trip(tmp_path, small_grid):
    w = gaussian_wigner(small_grid, 0.5, x0=0.5)
    path = tmp_path / "w.bin"
    write_field(path, w)
    data = path.read_bytes()
    assert data[:6] == b"WPHS1\0"
    assert len(data) == 6 + 4 + 4 + 3 * 8 + 8 * small_grid.nx * small_grid.npts
    back = read_field(path)
    assert back.grid == small_grid
    assert np.array_equal(back.values, w.values)


def test_binary_layout_is_x_major(tmp_path):
    g = make_grid(GridSpec(nx=2, npts=4, x_half=1.0))
    w = Field2D(np.arange(8.0).reshape(2, 4), g)
    path = tmp_path / "w.bin"
    write_field(path, w)
    raw = np.frombuffer(path.read_bytes()[-64:], dtype="<f8")
    assert raw.tolist() == list(range(8))


def test_binary_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTAFIELD" * 10)
    with pytest.raises(ValueError, match="magic"):
        read_field(path)
    path.write_bytes(b"WP")
    with pytest.raises(ValueError, match="short"):
        read_field(path)
