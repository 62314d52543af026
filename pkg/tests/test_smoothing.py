import math
import warnings

import numpy as np
import pytest

from qphase import acceptance, smoothing
from qphase.entropy import information, s2
from qphase.grid import Field2D, fourier2, integrate
from qphase.oscillator import OscillatorParams, ho_eigenstate, ho_info_ladder
from qphase.smoothing import (UnderResolvedWarning, admissibility_test, coherent_expansion,
                              counterexample_suite, fourier_bound_check, gaussian_info,
                              gaussian_kernel, positive_blob, pure_state_kernel, sigma_sweep,
                              smooth, smoothed_info_direct, spatial_std, witness_catalog)
from qphase.states import example_psi, gaussian_psi, gaussian_wigner, pure_catalog
from qphase.wigner import MixtureSpec, mix, rho_from_wigner, wigner_from_psi

SIGMA_HO = OscillatorParams().sigma


@pytest.fixture(scope="module")
def witnesses(grid):
    return witness_catalog(grid)


def test_kernel_properties(grid):
    k = gaussian_kernel(0.7, grid)
    assert k.is_positive and k.kind == "gaussian"
    assert abs(integrate(k.field) - 1) < 1e-8
    assert k.warnings == ()


def test_under_resolved_kernel_warns(grid):
    with pytest.warns(UnderResolvedWarning):
        k = gaussian_kernel(0.1, grid)
    assert k.warnings
    with pytest.raises(ValueError):
        gaussian_kernel(0.0, grid)


@pytest.mark.filterwarnings("ignore::qphase.smoothing.UnderResolvedWarning")
def test_gaussian_on_gaussian_field(grid):
    mu, sigma = 0.6, 0.9
    out = smooth(gaussian_wigner(grid, mu), gaussian_kernel(sigma, grid))
    sx2 = sigma ** 2 + mu ** 2
    sp2 = grid.hbar ** 2 / 4 * (1 / sigma ** 2 + 1 / mu ** 2)
    X, P = grid.mesh()
    expected = np.exp(-X ** 2 / (2 * sx2) - P ** 2 / (2 * sp2)) / (2 * np.pi * math.sqrt(sx2 * sp2))
    assert out.max_abs_diff(expected) < 1e-10


def test_smoothing_makes_first_state_positive(grid):
    w1 = wigner_from_psi(ho_eigenstate(1, grid=grid))
    wbar = smooth(w1, gaussian_kernel(SIGMA_HO, grid))
    assert np.min(wbar.values) >= -1e-8
    assert abs(integrate(wbar) - 1) < 1e-8


def test_delta_kernel_is_identity(grid):
    w = wigner_from_psi(ho_eigenstate(2, grid=grid))
    d = np.zeros(grid.shape)
    d[grid.nx // 2, grid.npts // 2] = 1 / grid.cell_area
    assert smooth(w, Field2D(d, grid)).max_abs_diff(w) < 1e-10


def test_spectral_multiplicativity(grid):
    w = wigner_from_psi(example_psi(grid))
    k = gaussian_kernel(0.8, grid).field
    lhs = fourier2(smooth(w, k)).values
    rhs = fourier2(w).values * fourier2(k).values
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_admissibility_of_smoothed_pure_state(grid, witnesses):
    wbar = smooth(wigner_from_psi(ho_eigenstate(3, grid=grid)), gaussian_kernel(SIGMA_HO, grid))
    verdict = admissibility_test(wbar, witnesses)
    assert verdict.passed
    assert verdict.n_tests == len(witnesses) == 18 + 25 + 10


def test_pseudo_mixture_fails_against_third_state(grid, witnesses):
    states = [ho_eigenstate(n, grid=grid) for n in range(3)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = mix(MixtureSpec([2 / 3, 2 / 3, -1 / 3], states))
    verdict = admissibility_test(w, witnesses)
    assert not verdict.passed
    assert verdict.overlaps["ho:2@w=1"] == pytest.approx(-1 / (3 * grid.h), abs=1e-8)


def test_self_overlap_is_positive(grid):
    w = wigner_from_psi(example_psi(grid))
    verdict = admissibility_test(w, [w])
    assert verdict.min_overlap == pytest.approx(1 / grid.h)


def test_malformed_witness_rejected(grid, small_grid):
    w = gaussian_wigner(grid, 0.7)
    with pytest.raises(ValueError, match="malformed witness"):
        admissibility_test(w, {"half": 0.5 * w})
    with pytest.raises(ValueError, match="malformed witness"):
        admissibility_test(w, {"other": gaussian_wigner(small_grid, 0.7)})


def test_counterexample(grid):
    r = counterexample_suite(grid)
    assert abs(r.value - (-1 / (27 * math.pi))) < 1e-5
    assert r.rel_error < 1e-4
    assert abs(r.spectral - r.expected) / abs(r.expected) < 1e-4
    assert r.route_rel_diff < 1e-6
    assert r.closed_form_error < 1e-8
    assert not r.verdict.passed


def test_counterexample_rejects_small_box():
    from qphase.grid import GridSpec, make_grid
    with pytest.raises(ValueError, match="leakage"):
        counterexample_suite(make_grid(GridSpec(nx=64, npts=64, x_half=1.5)))


def test_fourier_bound(grid):
    assert fourier_bound_check(gaussian_wigner(grid, 0.7)) == pytest.approx(1.0, abs=1e-12)
    for n in range(9):
        w = wigner_from_psi(ho_eigenstate(n, grid=grid))
        spec = fourier2(w)
        assert fourier_bound_check(w) <= 1 + 1e-8
        assert abs(spec.at_origin()) == pytest.approx(fourier_bound_check(w))
    assert fourier_bound_check(2 * gaussian_wigner(grid, 0.7)) == pytest.approx(2.0)


@pytest.mark.filterwarnings("ignore::qphase.smoothing.UnderResolvedWarning")
@pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
def test_smoothed_info_direct_gaussian(grid, z):
    mu = 0.8
    psi = gaussian_psi(grid, mu)
    direct = smoothed_info_direct(psi, z * mu)
    assert direct == pytest.approx(z / (1 + z * z), abs=1e-7)
    numeric = information(smooth(wigner_from_psi(psi), gaussian_kernel(z * mu, grid)))
    assert abs(direct - numeric) < 1e-6


def test_smoothed_info_direct_first_state(grid):
    psi = ho_eigenstate(1, grid=grid)
    assert abs(smoothed_info_direct(psi, SIGMA_HO) - ho_info_ladder(1)) < 1e-6


def test_smoothed_info_bound(grid):
    for name, psi in pure_catalog(grid).items():
        for sigma in (0.4, 0.7, 1.2):
            assert smoothed_info_direct(psi, sigma) <= 0.5 + 1e-8, name


def test_gaussian_info_peak():
    z = np.geomspace(0.1, 10, 101)
    assert z[np.argmax(gaussian_info(z))] == pytest.approx(1.0)
    assert float(gaussian_info(2.0)) == pytest.approx(0.4)


def test_spatial_std(grid):
    assert spatial_std(gaussian_psi(grid, 0.6, x0=1.0)) == pytest.approx(0.6, rel=1e-10)


@pytest.mark.filterwarnings("ignore::qphase.smoothing.UnderResolvedWarning")
def test_sigma_sweep_minimum_near_width(grid):
    w = gaussian_wigner(grid, 0.7)
    sigmas = 0.7 * np.geomspace(0.5, 2, 9)
    vals = sigma_sweep(w, sigmas)
    assert np.argmin(vals) == 4
    assert vals[4] == pytest.approx(0.5, abs=1e-10)


def test_coherent_expansion_matches_wigner_route(grid):
    w = 0.5 * wigner_from_psi(ho_eigenstate(1, grid=grid)) + 0.5 * gaussian_wigner(grid, 0.5, x0=1)
    rho = coherent_expansion(w, SIGMA_HO)
    ref = rho_from_wigner(smooth(w, gaussian_kernel(SIGMA_HO, grid)))
    assert np.max(np.abs(rho.values - ref.values)) < 1e-6


def test_coherent_expansion_of_zero(small_grid):
    assert np.all(coherent_expansion(small_grid.zeros(), 0.7).values == 0)


def test_smoothed_positive_blobs_pass(grid, witnesses):
    rng = np.random.default_rng(21)
    kernel = gaussian_kernel(SIGMA_HO, grid)
    for _ in range(5):
        blob = positive_blob(grid, rng)
        assert np.min(blob.values) >= 0 and abs(integrate(blob) - 1) < 1e-12
        assert admissibility_test(smooth(blob, kernel), witnesses).passed


def test_monotonicity_with_non_gaussian_kernels(grid):
    catalog = {n: wigner_from_psi(p) for n, p in pure_catalog(grid, n_max=2, n_random=1).items()}
    for w in catalog.values():
        for psi in (example_psi(grid), ho_eigenstate(2, grid=grid)):
            k = pure_state_kernel(psi)
            assert not k.is_positive
            assert s2(smooth(w, k)).s2 >= s2(w).s2 - 1e-8


def test_injected_sign_error_is_caught(monkeypatch):
    real = smoothing.gaussian_wigner

    def negated(grid, sigma, x0=0.0, p0=0.0):
        return -real(grid, sigma, x0, p0)

    monkeypatch.setattr(smoothing, "gaussian_wigner", negated)
    assert not acceptance.admissibility().passed

    def flipped(grid, sigma, x0=0.0, p0=0.0):
        X, P = grid.mesh()
        v = np.exp(-X ** 2 / (2 * sigma ** 2) + 2 * P ** 2 * sigma ** 2 / grid.hbar ** 2)
        return Field2D(np.minimum(v, 1e300) / (np.pi * grid.hbar), grid)

    monkeypatch.setattr(smoothing, "gaussian_wigner", flipped)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = {r.id: r.passed for r in acceptance.run(["gaussian-bound", "gaussian-on-gaussian"])}
    assert results == {"gaussian-bound": False, "gaussian-on-gaussian": False}
