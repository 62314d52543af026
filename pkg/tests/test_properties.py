import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qphase.entropy import s2
from qphase.grid import Field2D, GridSpec, convolve, fourier2, integrate, inverse_fourier2, make_grid
from qphase.states import random_superposition
from qphase.wigner import DensityMatrix, rho_from_wigner, wigner_from_psi, wigner_from_rho

G = make_grid(GridSpec(nx=32, npts=32, x_half=5.0))
# the odd-parity half of rho is interpolated periodically, so states must fit the box
FINE = make_grid(GridSpec(nx=128, npts=128, x_half=8.0))
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
fields = arrays(np.float64, G.shape, elements=finite).map(lambda v: Field2D(v, G))
scalars = st.floats(-10, 10, allow_nan=False)


def _scale(*fs):
    return max(1.0, *(float(np.max(np.abs(f.values))) for f in fs))


@settings(max_examples=30, deadline=None)
@given(fields, fields, scalars, scalars)
def test_integrate_is_linear(a, b, alpha, beta):
    lhs = integrate(alpha * a + beta * b)
    rhs = alpha * integrate(a) + beta * integrate(b)
    assert abs(lhs - rhs) <= 1e-12 * _scale(a, b) * G.cell_area * a.values.size * 20


@settings(max_examples=30, deadline=None)
@given(fields)
def test_fourier_round_trip_and_parseval(a):
    spec = fourier2(a)
    assert inverse_fourier2(spec).max_abs_diff(a) <= 1e-12 * _scale(a)
    lhs = float(np.sum(a.values ** 2)) * G.cell_area
    rhs = float(np.sum(np.abs(spec.values) ** 2)) * spec.dk * spec.dlam / (4 * np.pi ** 2)
    assert abs(lhs - rhs) <= 1e-10 * max(lhs, 1e-300)


@settings(max_examples=30, deadline=None)
@given(fields, fields)
def test_convolution_properties(a, b):
    ab, ba = convolve(a, b), convolve(b, a)
    scale = _scale(a) * _scale(b) * G.cell_area * a.values.size
    assert ab.max_abs_diff(ba) <= 1e-12 * scale
    assert abs(integrate(ab) - integrate(a) * integrate(b)) <= 1e-10 * scale * G.cell_area * a.values.size
    lhs = fourier2(ab).values
    rhs = fourier2(a).values * fourier2(b).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale * G.cell_area


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_rho_linearity_and_round_trip(seed, alpha):
    rng = np.random.default_rng(seed)
    p1, p2 = random_superposition(FINE, rng, nmax=3), random_superposition(FINE, rng, nmax=3)
    r1, r2 = DensityMatrix.pure(p1), DensityMatrix.pure(p2)
    mixed = DensityMatrix(alpha * r1.values + (1 - alpha) * r2.values, FINE)
    w = wigner_from_rho(mixed)
    expected = alpha * wigner_from_psi(p1) + (1 - alpha) * wigner_from_psi(p2)
    assert w.max_abs_diff(expected) < 1e-12
    assert np.max(np.abs(rho_from_wigner(w).values - mixed.values)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_pure_states_are_pure(seed):
    psi = random_superposition(G, np.random.default_rng(seed), nmax=3)
    w = wigner_from_psi(psi)
    assert abs(integrate(w) - 1) < 1e-8
    assert abs(s2(w).s2) < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5))
def test_admissible_mixture_entropy_range(seed, n):
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(n))
    w = sum(a * wigner_from_psi(random_superposition(G, rng, nmax=3)) for a in weights)
    assert -1e-8 <= s2(w).s2 <= 1
