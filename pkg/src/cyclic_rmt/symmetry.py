"""Generalized-parity properties of the cyclic eigenvectors.

Real-class Fourier vectors are eigenvectors of eta.  For a complex-class
vector, eta maps ``u_l`` onto its conjugate partner ``u_{N-l}``, which is
orthogonal to ``u_l``; hence its eta-norm ``<u_l, eta u_l>`` vanishes.

"Orthogonality with respect to eta" of a conjugate pair is ambiguous, so both
the sesquilinear ``<v1, eta v2>`` and the bilinear ``v1^T eta v2`` products
are reported.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .ensemble import ParityMatrix, generalized_parity
from .spectral import EigenClass, fourier_eigenvector, partner_index

__all__ = [
    "EigenvectorRecord",
    "SymmetryReport",
    "eta_apply",
    "eta_eigen_residual",
    "pt_norm",
    "pt_norm_bilinear",
    "eta_pair_product",
    "symmetry_report",
]


def _check_length(v: np.ndarray, eta: ParityMatrix) -> None:
    if v.ndim != 1 or v.size != eta.dimension:
        raise ValueError(f"vector of shape {v.shape} does not match parity dimension {eta.dimension}")


def eta_apply(v, eta: ParityMatrix) -> np.ndarray:
    v = np.asarray(v)
    _check_length(v, eta)
    return v[eta.index_map]


def eta_eigen_residual(v, eta: ParityMatrix) -> float:
    """``min_{s = +1, -1} ||eta v - s v||_inf / ||v||_inf``."""
    v = np.asarray(v)
    _check_length(v, eta)
    norm = np.max(np.abs(v))
    if norm == 0:
        raise ValueError("eta_eigen_residual is undefined for the zero vector")
    ev = v[eta.index_map]
    return float(min(np.max(np.abs(ev - v)), np.max(np.abs(ev + v))) / norm)


def pt_norm(v, eta: ParityMatrix) -> complex:
    """Sesquilinear eta-norm ``<v, eta v> = sum conj(v) * (eta v)``."""
    v = np.asarray(v)
    _check_length(v, eta)
    return complex(np.vdot(v, v[eta.index_map]))


def pt_norm_bilinear(v, eta: ParityMatrix) -> complex:
    v = np.asarray(v)
    _check_length(v, eta)
    return complex(np.dot(v, v[eta.index_map]))


def eta_pair_product(v1, v2, eta: ParityMatrix) -> tuple[complex, complex]:
    """``(<v1, eta v2>, v1^T eta v2)``: sesquilinear and bilinear forms."""
    v1 = np.asarray(v1)
    v2 = np.asarray(v2)
    _check_length(v1, eta)
    _check_length(v2, eta)
    ev2 = v2[eta.index_map]
    return complex(np.vdot(v1, ev2)), complex(np.dot(v1, ev2))


@dataclass(frozen=True)
class EigenvectorRecord:
    index: int
    eigen_class: EigenClass
    partner: int
    eta_eigen_residual: float
    pt_norm: complex
    pt_norm_bilinear: complex
    pair_sesquilinear: complex | None = None
    pair_bilinear: complex | None = None


def _cplx(z):
    return None if z is None else [z.real, z.imag]


@dataclass(frozen=True)
class SymmetryReport:
    dimension: int
    records: tuple[EigenvectorRecord, ...]

    def _select(self, cls):
        return [r for r in self.records if r.eigen_class is cls]

    @property
    def max_real_eta_residual(self) -> float:
        return max(r.eta_eigen_residual for r in self._select(EigenClass.REAL))

    @property
    def max_complex_pt_norm(self) -> float:
        recs = self._select(EigenClass.PAIR)
        return max((abs(r.pt_norm) for r in recs), default=0.0)

    @property
    def min_complex_eta_residual(self) -> float:
        recs = self._select(EigenClass.PAIR)
        return min((r.eta_eigen_residual for r in recs), default=float("inf"))

    def vanishing_pair_forms(self, tol: float = 1e-12) -> dict[str, bool]:
        """Which pair form vanishes for every conjugate pair."""
        recs = self._select(EigenClass.PAIR)
        return {
            "sesquilinear": bool(recs) and all(abs(r.pair_sesquilinear) < tol for r in recs),
            "bilinear": bool(recs) and all(abs(r.pair_bilinear) < tol for r in recs),
        }

    def to_dict(self) -> dict:
        rows = []
        for r in self.records:
            d = asdict(r)
            d["eigen_class"] = r.eigen_class.value
            for key in ("pt_norm", "pt_norm_bilinear", "pair_sesquilinear", "pair_bilinear"):
                d[key] = _cplx(getattr(r, key))
            rows.append(d)
        return {
            "dimension": self.dimension,
            "max_real_eta_residual": self.max_real_eta_residual,
            "max_complex_pt_norm": self.max_complex_pt_norm,
            "min_complex_eta_residual": self.min_complex_eta_residual,
            "vanishing_pair_forms": self.vanishing_pair_forms(),
            "records": rows,
        }


def symmetry_report(n: int) -> SymmetryReport:
    """Check every Fourier eigenvector of the N x N cyclic matrices."""
    eta = generalized_parity(n)
    vectors = [fourier_eigenvector(n, l) for l in range(n)]
    records = []
    for l, u in enumerate(vectors):
        p = partner_index(n, l)
        cls = EigenClass.REAL if p == l else EigenClass.PAIR
        ses = bil = None
        if cls is EigenClass.PAIR:
            ses, bil = eta_pair_product(u, vectors[p], eta)
        records.append(EigenvectorRecord(
            index=l,
            eigen_class=cls,
            partner=p,
            eta_eigen_residual=eta_eigen_residual(u, eta),
            pt_norm=pt_norm(u, eta),
            pt_norm_bilinear=pt_norm_bilinear(u, eta),
            pair_sesquilinear=ses,
            pair_bilinear=bil,
        ))
    return SymmetryReport(n, tuple(records))
