"""Phase-space entropy toolkit: Wigner transforms, quadratic entropy,
Gaussian smoothing, harmonic-oscillator oracles and Wigner dynamics."""
from .grid import (Field2D, GridMismatchError, GridSpec, PhaseGrid, SpectralField,
                   convolve, fourier2, integrate, inverse_fourier2, make_grid,
                   read_field, write_field)
from .wigner import (DensityMatrix, MixtureSpec, NonAdmissibleWarning, NormalizationError,
                     Wavefunction, expectation, marginals, mix, normalize, overlap,
                     rho_from_wigner, wigner_from_psi, wigner_from_rho)
from .entropy import EntropyReport, information, s2, s2_from_rho, vn_entropy
from .smoothing import (admissibility_test, counterexample_suite, gaussian_kernel,
                        pure_state_kernel, smooth, witness_catalog)
from .oscillator import (OscillatorParams, ho_eigenstate, ho_info_ladder,
                         ho_smoothed_closed, ho_wigner_closed)
from .dynamics import PotentialSpec, WignerPropagator, propagate

__version__ = "0.1.0"
