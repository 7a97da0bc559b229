"""Gaussian ensembles of random cyclic matrices and their level spacings."""

__version__ = "0.1.0"

from .ensemble import (
    EnsembleConfig,
    FirstRow,
    ParityMatrix,
    generalized_parity,
    materialize_matrix,
    pseudo_symmetry_residual,
    sample_first_row,
    sample_rows,
)
from .laws import LawKind, LawSpec, cdf, density, mean_spacing_rc
from .spacing import (
    SpacingSample,
    build_histogram,
    extract_cc,
    extract_generic,
    extract_rc,
    ks_distance,
    normalize_to_unit_mean,
)
from .special import bessel_i0, hyp2f1_c_constant
from .spectral import Spectrum, eigenvalues_dft, fourier_eigenvector, inverse_coefficients, s_matrix
from .symmetry import eta_apply, eta_eigen_residual, eta_pair_product, pt_norm, symmetry_report
