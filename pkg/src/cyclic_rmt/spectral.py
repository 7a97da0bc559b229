"""Closed-form spectra of cyclic matrices.

Every cyclic matrix is diagonalised by the Fourier vectors
``u_l[j] = omega**(j*l) / sqrt(N)`` with ``omega = exp(2 pi i / N)``, and its
eigenvalues are ``E_l = sum_p a_p omega**(p*l)`` (all indices 0-based here).
Since the coefficients are real, ``E_l`` and ``E_{N-l}`` are complex
conjugates; ``E_0`` (and ``E_{N/2}`` for even N) are real.  Reality is
therefore decided by index, never by inspecting ``Im E``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ensemble import FirstRow, ParityMatrix, generalized_parity

__all__ = [
    "EigenClass",
    "Spectrum",
    "SMatrix",
    "partner_index",
    "real_indices",
    "complex_indices",
    "pair_indices",
    "eigenvalues_dft",
    "eigenvalues_batch",
    "fourier_eigenvector",
    "inverse_coefficients",
    "inverse_batch",
    "s_matrix",
]

FFT_MIN_DIMENSION = 256
INVERSE_IMAG_TOL = 1e-10


class EigenClass(enum.Enum):
    REAL = "real"
    PAIR = "pair"


def partner_index(n: int, l: int) -> int:
    """Index of the conjugate partner of eigenvalue ``l`` (itself if real)."""
    return (n - l) % n


def real_indices(n: int) -> np.ndarray:
    return np.array([0, n // 2]) if n % 2 == 0 else np.array([0])


def complex_indices(n: int) -> np.ndarray:
    """All indices carrying a member of a conjugate pair."""
    idx = np.arange(1, n)
    if n % 2 == 0:
        idx = idx[idx != n // 2]
    return idx


def pair_indices(n: int) -> np.ndarray:
    """One representative ``l`` (``1 <= l < N/2``) per conjugate pair."""
    return np.arange(1, (n + 1) // 2)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    realization_index: int = 0
    seed: int = 0

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def partners(self) -> np.ndarray:
        n = self.dimension
        return (-np.arange(n)) % n

    @property
    def labels(self) -> list[tuple[EigenClass, int]]:
        """``(class, partner)`` per eigenvalue; real ones are their own partner."""
        return [
            (EigenClass.REAL if p == l else EigenClass.PAIR, int(p))
            for l, p in enumerate(self.partners)
        ]


@lru_cache(maxsize=32)
def _dft_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Reduce p*l mod N before the trig call so large products keep full accuracy.
    phase = 2.0 * np.pi * ((np.arange(n)[:, None] * np.arange(n)[None, :]) % n) / n
    cos, sin = np.cos(phase), np.sin(phase)
    cos.setflags(write=False)
    sin.setflags(write=False)
    return cos, sin


def _symmetrize(rows: np.ndarray, energies: np.ndarray) -> np.ndarray:
    n = rows.shape[1]
    energies[:, 0] = rows.sum(axis=1)
    if n % 2 == 0:
        energies[:, n // 2] = energies[:, n // 2].real
    upper = pair_indices(n)
    energies[:, n - upper] = np.conj(energies[:, upper])
    return energies


def eigenvalues_batch(rows, method: str = "auto") -> np.ndarray:
    """Eigenvalues of many cyclic matrices given their first rows.

    Parameters
    ----------
    rows : array_like, shape (count, N)
    method : {"auto", "direct", "fft"}
        ``"direct"`` evaluates the O(N^2) sum; ``"fft"`` uses numpy's FFT.
        ``"auto"`` picks FFT from N = 256 upwards.

    Returns
    -------
    ndarray, shape (count, N), complex
        ``E[:, 0]`` is ``rows.sum(axis=1)`` exactly, real-class entries have
        zero imaginary part and ``E[:, N-l] == conj(E[:, l])`` exactly.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = rows.shape[1]
    if n < 2:
        raise ValueError("need N >= 2")
    if method == "auto":
        method = "fft" if n >= FFT_MIN_DIMENSION else "direct"
    if method == "direct":
        cos, sin = _dft_tables(n)
        energies = rows @ cos + 1j * (rows @ sin)
    elif method == "fft":
        # numpy's forward FFT uses exp(-i...); conjugating gives exp(+i...) for real input.
        energies = np.conj(np.fft.fft(rows, axis=1))
    else:
        raise ValueError(f"unknown method {method!r}")
    return _symmetrize(rows, energies)


def eigenvalues_dft(row: FirstRow, method: str = "auto") -> Spectrum:
    """Spectrum of the cyclic matrix with first row ``row``."""
    energies = eigenvalues_batch(row.coefficients[None, :], method=method)[0]
    return Spectrum(energies, row.realization_index, row.seed)


def fourier_eigenvector(n: int, l: int) -> np.ndarray:
    """Unit eigenvector ``u_l`` shared by every N x N cyclic matrix (0-based l)."""
    if not 0 <= l < n:
        raise IndexError(f"eigenvector index {l} outside [0, {n})")
    phase = 2.0 * np.pi * ((np.arange(n) * l) % n) / n
    return np.exp(1j * phase) / np.sqrt(n)


@dataclass(frozen=True)
class SMatrix:
    """Matrix of the inverse map, ``S[i, l] = omega**(i * (N - l))``.

    ``S`` is symmetric and ``S @ S = N * eta``; the coefficients are recovered
    as ``a = S @ E / N``.
    """

    dimension: int
    entries: np.ndarray

    def square_residual(self, eta: ParityMatrix | None = None) -> float:
        """Max entrywise ``|S @ S - N eta|``."""
        eta = generalized_parity(self.dimension) if eta is None else eta
        sq = self.entries @ self.entries
        return float(np.max(np.abs(sq - self.dimension * eta.dense())))

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))


def s_matrix(n: int) -> SMatrix:
    if int(n) != n or n < 2:
        raise ValueError(f"S matrix needs N >= 2, got {n!r}")
    i = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    exponent = (i * (n - l)) % n
    entries = np.exp(2j * np.pi * exponent / n)
    return SMatrix(int(n), entries)


def inverse_batch(energies) -> np.ndarray:
    """Coefficients ``a = S @ E / N`` for each row of ``energies``.

    Raises
    ------
    ValueError
        If the recovered coefficients have an imaginary part above 1e-10
        relative to the spectrum scale, i.e. the input breaks conjugate
        pairing.
    """
    energies = np.atleast_2d(np.asarray(energies, dtype=complex))
    n = energies.shape[1]
    coeffs = energies @ s_matrix(n).entries.T / n
    scale = max(1.0, float(np.max(np.abs(energies))))
    worst = float(np.max(np.abs(coeffs.imag)))
    if worst > INVERSE_IMAG_TOL * scale:
        raise ValueError(
            f"imaginary residue {worst:.3g} in recovered coefficients; "
            "spectrum is not conjugate-paired"
        )
    return coeffs.real


def inverse_coefficients(spec: Spectrum) -> FirstRow:
    a = inverse_batch(spec.eigenvalues[None, :])[0]
    return FirstRow(a, spec.realization_index, spec.seed)
