"""Gaussian ensemble of real cyclic matrices.

A realization is fully described by its first row ``a``; row ``i`` of the
matrix is the first row cyclically shifted right ``i`` times, so
``M[i, j] = a[(j - i) mod N]`` (0-based).  Under the weight
``exp(-A tr M^T M)`` with ``tr M^T M = N sum(a**2)`` every coefficient is an
independent ``N(0, 1/(2 N A))`` variable.

Randomness is drawn from counter-based Philox substreams keyed by
``(master_seed, realization_index)``, so realization ``k`` is the same no
matter which worker draws it or in which order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EnsembleConfig",
    "FirstRow",
    "ParityMatrix",
    "coefficient_variance",
    "substream",
    "sample_first_row",
    "sample_rows",
    "standard_rows",
    "materialize_matrix",
    "generalized_parity",
    "pseudo_symmetry_residual",
]

_UINT64_MAX = 2**64 - 1

# Third Philox counter word; separates independent streams for one realization.
COEFFICIENT_STREAM = 0
SELECTION_STREAM = 1


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of one ensemble.

    Attributes
    ----------
    dimension : int
        Matrix size N (>= 2).
    scale : float
        The weight parameter A (> 0).
    realizations : int
        Number of matrices in the ensemble.
    seed : int
        Unsigned 64-bit master seed.
    """

    dimension: int
    scale: float = 1.0
    realizations: int = 1
    seed: int = 0

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        if not self.scale > 0 or not np.isfinite(self.scale):
            raise ValueError(f"scale A must be positive, got {self.scale!r}")
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= _UINT64_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def sigma(self) -> float:
        """Standard deviation of each coefficient."""
        return float(np.sqrt(coefficient_variance(self.dimension, self.scale)))


@dataclass(frozen=True)
class FirstRow:
    coefficients: np.ndarray
    realization_index: int = 0
    seed: int = 0

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("a first row needs at least two real coefficients")
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)

    @property
    def dimension(self) -> int:
        return self.coefficients.size

    def __len__(self):
        return self.coefficients.size


@dataclass(frozen=True)
class ParityMatrix:
    """Generalized parity as an index map.

    ``index_map[j]`` is the 0-based image of ``j``: 0 is fixed and
    ``j -> N - j`` otherwise.  Acting on a vector is a pure gather, so every
    identity built from it is exact.
    """

    dimension: int
    index_map: np.ndarray = field(repr=False)

    def apply(self, v):
        """Return ``eta @ v`` (rows permuted; works on the leading axis)."""
        v = np.asarray(v)
        if v.shape[0] != self.dimension:
            raise ValueError(f"length {v.shape[0]} does not match parity dimension {self.dimension}")
        return v[self.index_map]

    @property
    def fixed_points(self) -> np.ndarray:
        return np.flatnonzero(self.index_map == np.arange(self.dimension))

    def dense(self) -> np.ndarray:
        n = self.dimension
        out = np.zeros((n, n))
        out[np.arange(n), self.index_map] = 1.0
        return out


def coefficient_variance(dimension: int, scale: float) -> float:
    return 1.0 / (2.0 * dimension * scale)


def substream(seed: int, index: int, stream: int = COEFFICIENT_STREAM) -> np.random.Generator:
    """Generator for one realization.

    The Philox key is ``(seed, index)``; ``stream`` occupies a high counter
    word so that different streams of one realization never overlap.
    """
    key = np.array([seed, index], dtype=np.uint64)
    counter = np.array([0, 0, stream, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _check_index(config: EnsembleConfig, k: int) -> None:
    if not 0 <= k < config.realizations:
        raise IndexError(f"realization index {k} outside [0, {config.realizations})")


def sample_first_row(config: EnsembleConfig, k: int) -> FirstRow:
    """Draw realization ``k`` of the ensemble."""
    _check_index(config, k)
    z = substream(config.seed, k).standard_normal(config.dimension)
    return FirstRow(z * config.sigma, realization_index=k, seed=config.seed)


def standard_rows(config: EnsembleConfig, start: int, stop: int) -> np.ndarray:
    """Unit-variance draws behind realizations ``start..stop-1``.

    Multiplying by ``config.sigma`` gives the coefficients; keeping the
    unscaled draws lets ensembles at different A share substreams exactly.
    """
    if start < 0 or stop > config.realizations or start > stop:
        raise IndexError(f"range [{start}, {stop}) outside [0, {config.realizations})")
    n = config.dimension
    out = np.empty((stop - start, n))
    for i, k in enumerate(range(start, stop)):
        out[i] = substream(config.seed, k).standard_normal(n)
    return out


def sample_rows(config: EnsembleConfig, start: int = 0, stop: int | None = None) -> np.ndarray:
    """First rows of realizations ``start..stop-1`` as a ``(count, N)`` array.

    Row ``i`` equals ``sample_first_row(config, start + i).coefficients``
    bit for bit.
    """
    stop = config.realizations if stop is None else stop
    return standard_rows(config, start, stop) * config.sigma


def materialize_matrix(row) -> np.ndarray:
    """Dense cyclic matrix with ``M[i, j] = a[(j - i) mod N]``.

    Intended for tests and oracles; the spectral code works on the first row.
    """
    a = row.coefficients if isinstance(row, FirstRow) else np.asarray(row, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("a first row needs at least two real coefficients")
    n = a.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return a[idx]


def generalized_parity(dimension: int) -> ParityMatrix:
    if int(dimension) != dimension or dimension < 2:
        raise ValueError(f"generalized parity needs N >= 2, got {dimension!r}")
    n = int(dimension)
    index_map = (-np.arange(n)) % n
    index_map.setflags(write=False)
    return ParityMatrix(n, index_map)


def pseudo_symmetry_residual(matrix, eta: ParityMatrix) -> float:
    """Max-norm of ``M^T - eta M eta^{-1}``.

    ``eta`` is its own inverse, so the conjugated matrix is a pure index
    gather and cyclic matrices give exactly 0.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape != (eta.dimension, eta.dimension):
        raise ValueError(f"matrix shape {m.shape} does not match parity dimension {eta.dimension}")
    p = eta.index_map
    conjugated = m[np.ix_(p, p)]
    return float(np.max(np.abs(m.T - conjugated)))
