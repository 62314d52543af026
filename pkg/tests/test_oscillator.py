import math
from fractions import Fraction

import numpy as np
import pytest

from qphase.entropy import information, s2
from qphase.grid import GridSpec, integrate, make_grid
from qphase.oscillator import (OscillatorParams, UnderResolvedError, hermite_functions,
                               ho_eigenstate, ho_info_ladder, ho_info_ladder_exact,
                               ho_smoothed_closed, ho_wigner_closed, laguerre)
from qphase.smoothing import gaussian_kernel, smooth
from qphase.states import gaussian_psi, gaussian_wigner
from qphase.wigner import wigner_from_psi


def test_hermite_functions_against_scipy():
    from scipy.special import eval_hermite
    xi = np.linspace(-5, 5, 41)
    h = hermite_functions(10, xi)
    for n in range(11):
        ref = (eval_hermite(n, xi) * np.exp(-xi ** 2 / 2)
               / math.sqrt(2 ** n * math.factorial(n) * math.sqrt(math.pi)))
        assert np.allclose(h[n], ref, atol=1e-12)


def test_laguerre_low_orders():
    xi = np.linspace(0, 5, 11)
    assert np.allclose(laguerre(0, xi), 1)
    assert np.allclose(laguerre(1, xi), 1 - xi)
    assert np.allclose(laguerre(2, xi), 1 - 2 * xi + xi ** 2 / 2)
    from scipy.special import eval_laguerre
    assert np.allclose(laguerre(12, xi), eval_laguerre(12, xi))


def test_ground_state_is_gaussian(grid):
    psi = ho_eigenstate(0, grid=grid)
    assert np.allclose(psi.values, gaussian_psi(grid, OscillatorParams().sigma).values,
                       atol=1e-14)


def test_first_state_shape(grid):
    psi = ho_eigenstate(1, grid=grid)
    x = grid.x_values
    ratio = psi.values.real[x != 0] / (x * np.exp(-x ** 2 / 2))[x != 0]
    assert np.ptp(ratio) < 1e-12


def test_gram_matrix(grid):
    states = np.array([ho_eigenstate(n, grid=grid).values for n in range(9)])
    gram = states.conj() @ states.T * grid.dx
    assert np.max(np.abs(gram - np.eye(9))) < 1e-9


def test_under_resolved_grid_rejected():
    tight = make_grid(GridSpec(nx=64, npts=64, x_half=3.0))
    with pytest.raises(UnderResolvedError):
        ho_eigenstate(10, grid=tight)
    with pytest.raises(ValueError):
        ho_eigenstate(21, grid=tight)


def test_closed_wigner_low_orders(grid):
    assert ho_wigner_closed(0, grid=grid).max_abs_diff(gaussian_wigner(grid, 1 / math.sqrt(2))) < 1e-14
    w1 = ho_wigner_closed(1, grid=grid)
    assert w1.values[grid.nx // 2, grid.npts // 2] == pytest.approx(-1 / math.pi)


@pytest.mark.parametrize("n", [0, 2, 5, 8])
def test_smoothed_closed_form(grid, n):
    wbar = ho_smoothed_closed(n, grid=grid)
    assert np.min(wbar.values) >= 0
    assert abs(integrate(wbar) - 1) < 1e-7
    numeric = smooth(ho_wigner_closed(n, grid=grid), gaussian_kernel(OscillatorParams().sigma, grid))
    assert wbar.max_abs_diff(numeric) < 1e-6


def test_smoothed_ground_state(grid):
    X, P = grid.mesh()
    expected = np.exp(-(X ** 2 + P ** 2) / 2) / (2 * math.pi)
    assert np.max(np.abs(ho_smoothed_closed(0, grid=grid).values - expected)) < 1e-15


def test_ladder_values():
    assert ho_info_ladder_exact(0) == Fraction(1, 2)
    assert ho_info_ladder_exact(1) == Fraction(1, 4)
    assert ho_info_ladder_exact(2) == Fraction(3, 16)
    assert ho_info_ladder_exact(3) == Fraction(5, 32)
    for n in range(11):
        assert ho_info_ladder(n) == pytest.approx(float(ho_info_ladder_exact(n)), rel=1e-13)
    ratio = ho_info_ladder(40) / ho_info_ladder(10)
    assert abs(ratio - 0.5) / 0.5 < 0.05


def test_ladder_limits():
    values = [ho_info_ladder(n) for n in range(61)]
    assert all(b < a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        ho_info_ladder(61)


@pytest.mark.parametrize("n", range(9))
def test_ladder_quadrature(grid, n):
    assert abs(information(ho_smoothed_closed(n, grid=grid)) - ho_info_ladder(n)) < 1e-6


def test_entropy_ladder_rises_toward_one():
    g = make_grid(GridSpec(nx=256, npts=256, x_half=16.0))
    values = [s2(ho_smoothed_closed(n, grid=g)).s2 for n in range(21)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[20] > 0.9


def test_pure_eigenstates_zero_entropy(grid):
    for n in range(9):
        assert abs(s2(wigner_from_psi(ho_eigenstate(n, grid=grid))).s2) < 1e-6


def test_other_frequency(grid):
    params = OscillatorParams(omega=2.0)
    w = wigner_from_psi(ho_eigenstate(3, params, grid))
    assert w.max_abs_diff(ho_wigner_closed(3, params, grid)) < 1e-7


def test_params_validation(grid):
    with pytest.raises(ValueError):
        OscillatorParams(omega=0.0)
    with pytest.raises(ValueError, match="hbar"):
        ho_eigenstate(0, OscillatorParams(hbar=2.0), grid)
