"""Analytic spacing laws of the cyclic ensemble.

Five densities are provided:

=========  ==============================================================
CC_RAW     conjugate-pair spacing, ``sqrt(2A/pi) exp(-A S^2 / 2)``
CC_NORM    same, unit mean: ``(2/pi) exp(-z^2/pi)``
RC_RAW     real-complex spacing,
           ``(4A/sqrt 3) S exp(-(4A/3) S^2) I0((2A/3) S^2)``
RC_NORM    same, unit mean:
           ``(3 sqrt3 pi/16) c^2 z exp(-(3pi/16) c^2 z^2) I0((3pi/32) c^2 z^2)``
WIGNER     generic complex pair, unit mean: ``(pi s/2) exp(-pi s^2/4)``
=========  ==============================================================

``c = 2F1(3/4, 5/4; 1; 1/4)``.  The RC_RAW exponent carries A so that the
density is normalised for every A and its mean equals
``(3/8) sqrt(pi/A) c``; the A-free exponent is available separately as
:func:`rc_raw_printed_density` for comparison.

CDFs are tabulated once per law by adaptive quadrature on a uniform grid
and interpolated with cubic Hermite splines whose slopes are the exact
density values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .quadrature import integrate, integrate_intervals
from .special import bessel_i0e, hyp2f1_c_constant

__all__ = [
    "LawKind",
    "LawSpec",
    "density",
    "cdf",
    "quantile",
    "mean_spacing_rc",
    "mean_spacing_cc",
    "rc_raw_printed_density",
    "PrintedRCLaw",
    "density_table",
    "C",
]

C = hyp2f1_c_constant()

_RC_NORM_LINEAR = 3.0 * math.sqrt(3.0) * math.pi / 16.0 * C * C
_RC_NORM_BESSEL = 3.0 * math.pi / 32.0 * C * C

GRID_INTERVALS = 4096
TAIL_CUTOFF = 1e-16
QUAD_ABS_TOL = 1e-10


class LawKind(enum.Enum):
    CC_RAW = "cc_raw"
    CC_NORM = "cc_norm"
    RC_RAW = "rc_raw"
    RC_NORM = "rc_norm"
    WIGNER = "wigner"

    @property
    def normalized(self) -> bool:
        return self in (LawKind.CC_NORM, LawKind.RC_NORM, LawKind.WIGNER)


def mean_spacing_rc(scale: float) -> float:
    """Mean real-complex spacing ``(3/8) sqrt(pi/A) c``."""
    if not scale > 0:
        raise ValueError(f"A must be positive, got {scale!r}")
    return 0.375 * math.sqrt(math.pi / scale) * C


def mean_spacing_cc(scale: float) -> float:
    """Mean conjugate-pair spacing ``sqrt(2/(pi A))`` (half-normal mean)."""
    if not scale > 0:
        raise ValueError(f"A must be positive, got {scale!r}")
    return math.sqrt(2.0 / (math.pi * scale))


def _cc_norm(z):
    return (2.0 / math.pi) * np.exp(-z * z / math.pi)


def _rc_norm(z):
    # exp(-2b z^2) I0(b z^2) == exp(-b z^2) i0e(b z^2)
    arg = _RC_NORM_BESSEL * z * z
    return _RC_NORM_LINEAR * z * np.exp(-arg) * bessel_i0e(arg)


def _wigner(s):
    return 0.5 * math.pi * s * np.exp(-0.25 * math.pi * s * s)


def _cc_raw(s, a):
    return math.sqrt(2.0 * a / math.pi) * np.exp(-0.5 * a * s * s)


def _rc_raw(s, a):
    arg = (2.0 * a / 3.0) * s * s
    return (4.0 * a / math.sqrt(3.0)) * s * np.exp(-arg) * bessel_i0e(arg)


def rc_raw_printed_density(scale: float, s):
    """Real-complex density with the A-free exponent ``exp(-(4/3) S^2)``.

    Unnormalised in general and not integrable for ``A >= 2``; it coincides
    with RC_RAW at ``A = 1``.
    """
    s = np.asarray(s, dtype=float)
    arg = (2.0 * scale / 3.0) * s * s
    return (4.0 * scale / math.sqrt(3.0)) * s * np.exp(arg - (4.0 / 3.0) * s * s) * bessel_i0e(arg)


class _TabulatedLaw:
    """Quadrature-tabulated CDF and quantile for any density on [0, inf)."""

    normalized: bool
    mean: float

    def pdf(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    @cached_property
    def upper_limit(self) -> float:
        """Point beyond which the density stays below 1e-16 of its peak."""
        xs = np.linspace(0.0, 40.0 * self.mean, 40001)
        vals = self.pdf(xs)
        peak_at = int(np.argmax(vals))
        below = np.flatnonzero(vals[peak_at:] < TAIL_CUTOFF * vals[peak_at])
        if below.size == 0:
            return float(xs[-1])
        return float(xs[peak_at + below[0]])

    @cached_property
    def _table(self):
        nodes = np.linspace(0.0, self.upper_limit, GRID_INTERVALS + 1)
        pieces = integrate_intervals(self.pdf, nodes, abs_tol=QUAD_ABS_TOL * 1e-2)
        values = np.concatenate([[0.0], np.cumsum(pieces)])
        spline = CubicHermiteSpline(nodes, values, self.pdf(nodes))
        return nodes, values, spline

    @property
    def total_mass(self) -> float:
        """Quadrature integral of the density over ``[0, upper_limit]``."""
        return float(self._table[1][-1])

    def moment(self, order: int = 1) -> float:
        return integrate(lambda x: x**order * self.pdf(x), 0.0, self.upper_limit,
                         abs_tol=QUAD_ABS_TOL, pieces=64)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        nodes, values, spline = self._table
        inside = np.clip(x, 0.0, nodes[-1])
        i = np.clip(np.searchsorted(nodes, inside, side="right") - 1, 0, nodes.size - 2)
        # spline rounding can wiggle by an ulp where the density is ~0
        out = np.clip(spline(inside), values[i], values[i + 1])
        out = np.where(x >= nodes[-1], 1.0, np.minimum(out, 1.0))
        if out.ndim:
            order = np.argsort(x, kind="stable")
            out[order] = np.maximum.accumulate(out[order])
        return out

    def quantile(self, u) -> np.ndarray:
        """Inverse CDF by Newton iteration started from the tabulated CDF."""
        u = np.asarray(u, dtype=float)
        if np.any((u < 0) | (u > 1)):
            raise ValueError("quantile levels must lie in [0, 1]")
        nodes, values, _ = self._table
        x = np.interp(u, values, nodes)
        for _ in range(6):
            f = self.pdf(x)
            step = np.where(f > 0, (self.cdf(x) - u) / np.where(f > 0, f, 1.0), 0.0)
            x = np.clip(x - step, 0.0, nodes[-1])
        return x


@dataclass(frozen=True)
class LawSpec(_TabulatedLaw):
    """An analytic spacing law.

    Parameters
    ----------
    kind : LawKind
    scale : float, optional
        The ensemble parameter A; required for the raw laws and ignored
        (stored as None) for the unit-mean ones.
    """

    kind: LawKind
    scale: float | None = None

    def __post_init__(self):
        kind = LawKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind.normalized:
            object.__setattr__(self, "scale", None)
        elif self.scale is None or not self.scale > 0:
            raise ValueError(f"{kind.name} needs a positive scale A, got {self.scale!r}")
        else:
            object.__setattr__(self, "scale", float(self.scale))

    @property
    def normalized(self) -> bool:
        return self.kind.normalized

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def mean(self) -> float:
        """Analytic first moment."""
        if self.normalized:
            return 1.0
        if self.kind is LawKind.CC_RAW:
            return mean_spacing_cc(self.scale)
        return mean_spacing_rc(self.scale)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k is LawKind.CC_NORM:
            return _cc_norm(x)
        if k is LawKind.RC_NORM:
            return _rc_norm(x)
        if k is LawKind.WIGNER:
            return _wigner(x)
        if k is LawKind.CC_RAW:
            return _cc_raw(x, self.scale)
        return _rc_raw(x, self.scale)


class PrintedRCLaw(_TabulatedLaw):
    """The A-free-exponent real-complex form, renormalised by quadrature.

    Only defined for ``0 < A < 2``; at ``A = 1`` it equals RC_RAW.
    """

    normalized = False

    def __init__(self, scale: float):
        if not 0 < scale < 2:
            raise ValueError("the A-free exponent form is only integrable for 0 < A < 2")
        self.scale = float(scale)
        self.name = "rc_raw_printed"
        self._mass = 1.0
        self.mean = mean_spacing_rc(self.scale)
        self._mass = integrate(self._unnormalized, 0.0, 40.0 * self.mean,
                               abs_tol=QUAD_ABS_TOL, pieces=256)
        self.mean = self.moment(1)

    def _unnormalized(self, x):
        return rc_raw_printed_density(self.scale, x)

    def pdf(self, x) -> np.ndarray:
        return self._unnormalized(np.asarray(x, dtype=float)) / self._mass

    @property
    def raw_mass(self) -> float:
        """Integral of the unrenormalised form."""
        return self._mass


def _check_x(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("spacing laws are defined on x >= 0")
    return arr


def density(law: LawSpec, x):
    """Evaluate the law's density at ``x >= 0``."""
    out = law.pdf(_check_x(x))
    return out if out.ndim else float(out)


def cdf(law: LawSpec, x):
    """``P(X <= x)`` from the cached quadrature table (abs error < 1e-8)."""
    out = law.cdf(_check_x(x))
    return out if out.ndim else float(out)


def quantile(law: LawSpec, u):
    out = law.quantile(u)
    return out if out.ndim else float(out)


def density_table(law: LawSpec, points: int = 501, x_max: float | None = None) -> np.ndarray:
    """Two-column ``(x, p(x))`` array on ``[0, x_max]`` for plotting overlays."""
    x_max = 5.0 * law.mean if x_max is None else x_max
    xs = np.linspace(0.0, x_max, points)
    return np.column_stack([xs, law.pdf(xs)])
