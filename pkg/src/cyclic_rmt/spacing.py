"""Spacing observables and goodness of fit.

Three kinds of spacing are extracted from a spectrum:

* ``cc``: within a conjugate pair, ``|E_l - E_{N-l}| = 2 |Im E_l|``;
* ``rc``: between the real eigenvalue ``E_0`` and a complex one;
* ``generic``: between two complex eigenvalues that are neither equal
  nor conjugate partners.

Spacings among real eigenvalues are never used.  With the ``"one"`` pairing
policy a single rc/generic spacing is taken per realization, chosen with
the realization's own selection substream, so samples stay i.i.d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import SELECTION_STREAM, substream
from .laws import LawSpec
from .spectral import Spectrum, complex_indices, pair_indices

__all__ = [
    "PAIRING_POLICIES",
    "SpacingSample",
    "Histogram",
    "extract_cc",
    "extract_rc",
    "extract_generic",
    "cc_batch",
    "rc_batch",
    "generic_batch",
    "normalize_to_unit_mean",
    "ks_distance",
    "ks_critical_value",
    "build_histogram",
    "fit_small_spacing",
]

PAIRING_POLICIES = ("one", "all")

# Asymptotic Kolmogorov critical values sqrt(-ln(alpha/2)/2).
_KS_COEFF = {0.05: 1.3581, 0.01: 1.6276}


def _policy(policy: str) -> str:
    if policy not in PAIRING_POLICIES:
        raise ValueError(f"pairing policy must be one of {PAIRING_POLICIES}, got {policy!r}")
    return policy


def _selection_rng(spec: Spectrum, rng):
    return rng if rng is not None else substream(spec.seed, spec.realization_index, SELECTION_STREAM)


# -- batched extraction -------------------------------------------------------

def cc_batch(energies: np.ndarray) -> np.ndarray:
    """Conjugate-pair spacings, shape ``(count, pairs)``."""
    energies = np.atleast_2d(energies)
    return 2.0 * np.abs(energies[:, pair_indices(energies.shape[1])].imag)


def rc_batch(energies: np.ndarray, policy: str = "one", choices: np.ndarray | None = None) -> np.ndarray:
    """Real-complex spacings ``|E_0 - E_l|``.

    With ``policy="one"``, ``choices[r]`` is a uniform variate in ``[0, 1)``
    selecting the complex index for realization ``r``; the result has shape
    ``(count,)``.  With ``"all"`` it has shape ``(count, complex_count)``.
    """
    energies = np.atleast_2d(energies)
    n = energies.shape[1]
    cidx = complex_indices(n)
    if cidx.size == 0:
        return np.empty((energies.shape[0], 0))
    if _policy(policy) == "all":
        return np.abs(energies[:, :1] - energies[:, cidx])
    pick = cidx[np.minimum((choices * cidx.size).astype(int), cidx.size - 1)]
    rows = np.arange(energies.shape[0])
    return np.abs(energies[:, 0] - energies[rows, pick])


def _generic_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    cidx = complex_indices(n)
    j, k = np.meshgrid(cidx, cidx, indexing="ij")
    keep = (j < k) & (k != (n - j) % n)
    return j[keep], k[keep]


def generic_batch(energies: np.ndarray, policy: str = "one", choices: np.ndarray | None = None) -> np.ndarray:
    """Spacings between non-conjugate complex eigenvalues.

    With ``policy="one"``, ``choices`` has shape ``(count, 2)`` of uniform
    variates: the first picks ``j`` among the complex indices, the second
    picks ``k`` among the complex indices other than ``j`` and its partner.
    """
    energies = np.atleast_2d(energies)
    n = energies.shape[1]
    cidx = complex_indices(n)
    if pair_indices(n).size < 2:
        shape = (energies.shape[0], 0)
        return np.empty(shape)
    if _policy(policy) == "all":
        j, k = _generic_pairs(n)
        return np.abs(energies[:, j] - energies[:, k])
    m = cidx.size
    pos_j = np.minimum((choices[:, 0] * m).astype(int), m - 1)
    j = cidx[pos_j]
    # position of the partner in cidx is the mirror image of j's position
    pos_p = m - 1 - pos_j
    lo, hi = np.minimum(pos_j, pos_p), np.maximum(pos_j, pos_p)
    r = np.minimum((choices[:, 1] * (m - 2)).astype(int), m - 3)
    # skip over the two excluded positions
    r = r + (r >= lo)
    r = r + (r >= hi)
    k = cidx[r]
    rows = np.arange(energies.shape[0])
    return np.abs(energies[rows, j] - energies[rows, k])


# -- single-spectrum API ------------------------------------------------------

def extract_cc(spec: Spectrum) -> np.ndarray:
    """One spacing per conjugate pair; empty for N = 2."""
    return cc_batch(spec.eigenvalues[None, :])[0]


def extract_rc(spec: Spectrum, policy: str = "one", rng: np.random.Generator | None = None) -> np.ndarray:
    """Real-complex spacings of one spectrum.

    ``rng`` defaults to the realization's selection substream.
    """
    if _policy(policy) == "all":
        return rc_batch(spec.eigenvalues[None, :], "all")[0]
    if complex_indices(spec.dimension).size == 0:
        return np.empty(0)
    u = _selection_rng(spec, rng).random(1)
    return rc_batch(spec.eigenvalues[None, :], "one", u)


def extract_generic(spec: Spectrum, policy: str = "one", rng: np.random.Generator | None = None) -> np.ndarray:
    if _policy(policy) == "all":
        return generic_batch(spec.eigenvalues[None, :], "all")[0]
    if pair_indices(spec.dimension).size < 2:
        return np.empty(0)
    u = _selection_rng(spec, rng).random(2)[None, :]
    return generic_batch(spec.eigenvalues[None, :], "one", u)


# -- samples and statistics ---------------------------------------------------

@dataclass(frozen=True)
class SpacingSample:
    kind: str
    values: np.ndarray
    normalized: bool = False
    empirical_mean: float = float("nan")

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if np.any(v < 0) or np.any(np.isnan(v)):
            raise ValueError("spacings must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if np.isnan(self.empirical_mean) and v.size:
            object.__setattr__(self, "empirical_mean", float(v.mean()))

    def __len__(self):
        return self.values.size


def normalize_to_unit_mean(values, kind: str = "") -> SpacingSample:
    """Divide by the sample mean; the original mean is kept on the result."""
    if isinstance(values, SpacingSample):
        kind = kind or values.kind
        values = values.values
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("cannot normalise an empty sample")
    mean = float(v.mean())
    if not mean > 0:
        raise ValueError("degenerate sample: mean spacing is zero")
    return SpacingSample(kind, v / mean, normalized=True, empirical_mean=mean)


def ks_critical_value(n: int, alpha: float = 0.05) -> float:
    return _KS_COEFF[alpha] / np.sqrt(n)


def ks_distance(sample: SpacingSample, law: LawSpec) -> float:
    """Kolmogorov-Smirnov statistic ``sup |F_n - F|`` against ``law``."""
    if len(sample) == 0:
        raise ValueError("KS distance of an empty sample")
    if sample.normalized != law.normalized:
        raise ValueError(
            f"sample normalized={sample.normalized} but law {law.name} "
            f"normalized={law.normalized}"
        )
    x = np.sort(sample.values)
    n = x.size
    f = law.cdf(x)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def density_values(self) -> np.ndarray:
        return self.counts / (self.counts.sum() * self.widths)

    def as_table(self) -> np.ndarray:
        """Columns ``bin_left, bin_right, density``."""
        return np.column_stack([self.bin_edges[:-1], self.bin_edges[1:], self.density_values])


def build_histogram(sample: SpacingSample, bin_count: int) -> Histogram:
    """Equal-width histogram over ``[0, max * (1 + 1e-9)]``."""
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if len(sample) == 0:
        raise ValueError("cannot histogram an empty sample")
    top = float(sample.values.max()) * (1.0 + 1e-9)
    if top == 0:
        top = 1.0
    edges = np.linspace(0.0, top, bin_count + 1)
    counts, _ = np.histogram(sample.values, bins=edges)
    return Histogram(edges, counts)


def fit_small_spacing(hist: Histogram, z_max: float = 0.3, degree: int = 1,
                      through_origin: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares polynomial fit of the histogram density near zero.

    Uses bins lying entirely inside ``[0, z_max]``.  Returns
    ``(coefficients, standard_errors)`` in increasing powers; with
    ``through_origin`` the constant term is omitted and ``coefficients[0]``
    multiplies ``z``.  Errors are propagated from binomial bin counts.
    """
    inside = hist.bin_edges[1:] <= z_max * (1 + 1e-12)
    if inside.sum() <= degree:
        raise ValueError("too few bins below z_max for the requested fit")
    z = hist.centers[inside]
    y = hist.density_values[inside]
    n = hist.counts.sum()
    p = hist.counts[inside] / n
    sigma = np.sqrt(np.maximum(p * (1 - p), 1.0 / n) / n) / hist.widths[inside]
    powers = np.arange(1 if through_origin else 0, degree + 1)
    design = z[:, None] ** powers[None, :]
    w = 1.0 / sigma
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    cov = np.linalg.inv((design * w[:, None]).T @ (design * w[:, None]))
    return coef, np.sqrt(np.diag(cov))
