import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from cyclic_rmt.laws import (
    C,
    LawKind,
    LawSpec,
    PrintedRCLaw,
    cdf,
    density,
    density_table,
    mean_spacing_cc,
    mean_spacing_rc,
    quantile,
    rc_raw_printed_density,
)
from cyclic_rmt.quadrature import integrate_intervals

SCALES = [0.5, 1.0, 2.0]
ALL_LAWS = [LawSpec(k, a) for k in LawKind for a in (SCALES if not k.normalized else [1.0])]


def ids(law):
    return f"{law.name}-{law.scale}"


def rc_raw_oracle(r, a):
    """Density of |X + iY| for X ~ N(0, 3/(4A)), Y ~ N(0, 1/(4A)), by angular quadrature."""
    sx, sy = math.sqrt(3 / (4 * a)), math.sqrt(1 / (4 * a))
    f = lambda t: stats.norm.pdf(r * math.cos(t), scale=sx) * stats.norm.pdf(r * math.sin(t), scale=sy)
    return r * integrate.quad(f, 0, 2 * math.pi, epsabs=1e-14, epsrel=1e-13)[0]


def test_density_examples():
    assert density(LawSpec(LawKind.CC_NORM), 0.0) == pytest.approx(2 / math.pi)
    w = LawSpec(LawKind.WIGNER)
    assert density(w, 0.0) == 0.0
    assert density(w, 1.0) == pytest.approx(math.pi / 2 * math.exp(-math.pi / 4), rel=1e-15)
    assert density(LawSpec(LawKind.CC_RAW, 2.0), 0.0) == pytest.approx(math.sqrt(4 / math.pi))


def test_domain_errors():
    law = LawSpec(LawKind.WIGNER)
    with pytest.raises(ValueError):
        density(law, -0.1)
    with pytest.raises(ValueError):
        cdf(law, np.array([0.5, -1.0]))
    with pytest.raises(ValueError):
        LawSpec(LawKind.RC_RAW)
    with pytest.raises(ValueError):
        LawSpec(LawKind.CC_RAW, -1.0)
    with pytest.raises(ValueError):
        mean_spacing_rc(0.0)
    with pytest.raises(ValueError):
        PrintedRCLaw(2.0)


def test_normalized_laws_ignore_scale():
    assert LawSpec(LawKind.WIGNER, 3.0) == LawSpec("wigner")


@pytest.mark.parametrize("law", ALL_LAWS, ids=ids)
def test_normalization_and_moment(law):
    # scipy quad is an independent check on the in-house adaptive rule
    mass = integrate.quad(law.pdf, 0, np.inf, epsabs=1e-12, limit=200)[0]
    assert mass == pytest.approx(1.0, abs=1e-6)
    assert law.total_mass == pytest.approx(1.0, abs=1e-6)
    mean = integrate.quad(lambda x: x * law.pdf(x), 0, np.inf, epsabs=1e-12, limit=200)[0]
    assert mean == pytest.approx(law.mean, abs=1e-6)
    assert law.moment(1) == pytest.approx(law.mean, abs=1e-8)


@pytest.mark.parametrize("law", ALL_LAWS, ids=ids)
def test_nonnegative_and_monotone_cdf(law):
    xs = np.linspace(0, 10 * law.mean, 10_000)
    assert np.all(law.pdf(xs) >= 0)
    f = cdf(law, xs)
    assert cdf(law, 0.0) == 0.0
    assert np.all(np.diff(f) >= 0)
    assert cdf(law, 1e6) == 1.0


def test_wigner_cdf_closed_form():
    s = np.linspace(0, 8, 20_001)
    np.testing.assert_allclose(cdf(LawSpec("wigner"), s), 1 - np.exp(-math.pi * s * s / 4), atol=1e-8, rtol=0)


def test_cc_cdf_closed_forms():
    z = np.linspace(0, 12, 20_001)
    np.testing.assert_allclose(cdf(LawSpec("cc_norm"), z), special.erf(z / math.sqrt(math.pi)), atol=1e-8, rtol=0)
    a = 0.7
    np.testing.assert_allclose(cdf(LawSpec("cc_raw", a), z), special.erf(z * math.sqrt(a / 2)), atol=1e-8, rtol=0)


def test_rc_cdf_against_scipy_quad():
    law = LawSpec(LawKind.RC_NORM)
    for x in (0.05, 0.3, 1.0, 2.2, 4.0):
        want = integrate.quad(law.pdf, 0, x, epsabs=1e-13)[0]
        assert cdf(law, x) == pytest.approx(want, abs=1e-8)


@pytest.mark.parametrize("a", SCALES)
def test_cc_raw_to_norm_consistency(a):
    mean = math.sqrt(2 / (math.pi * a))
    assert mean == pytest.approx(mean_spacing_cc(a))
    z = np.linspace(0, 6, 301)
    np.testing.assert_allclose(
        LawSpec("cc_norm").pdf(z), mean * LawSpec("cc_raw", a).pdf(mean * z), rtol=1e-10, atol=1e-300
    )


@pytest.mark.parametrize("a", SCALES)
def test_rc_raw_matches_geometric_oracle(a):
    law = LawSpec("rc_raw", a)
    for r in (0.05, 0.4, 0.9, 1.7, 3.0):
        assert law.pdf(r) == pytest.approx(rc_raw_oracle(r, a), rel=1e-9)


@pytest.mark.parametrize("a", SCALES)
def test_rc_raw_to_norm_consistency(a):
    mean = mean_spacing_rc(a)
    z = np.linspace(0, 6, 301)
    np.testing.assert_allclose(LawSpec("rc_norm").pdf(z), mean * LawSpec("rc_raw", a).pdf(mean * z), rtol=1e-12)


def test_mean_spacing_rc():
    assert mean_spacing_rc(1.0) == pytest.approx(0.375 * math.sqrt(math.pi) * 1.31112, rel=1e-5)
    assert round(mean_spacing_rc(1.0), 5) == 0.87146
    assert mean_spacing_rc(1.0) / mean_spacing_rc(4.0) == pytest.approx(2.0, rel=1e-15)
    quad_mean = integrate.quad(lambda s: s * LawSpec("rc_raw", 1.0).pdf(s), 0, np.inf)[0]
    assert quad_mean == pytest.approx(mean_spacing_rc(1.0), abs=1e-5)


def test_rc_norm_constants_follow_from_c():
    # linear coefficient near zero is (3 sqrt3 pi/16) c^2
    k = 3 * math.sqrt(3) * math.pi / 16 * C**2
    z = 1e-6
    assert LawSpec("rc_norm").pdf(z) / z == pytest.approx(k, rel=1e-9)


def test_printed_exponent_reading():
    s = np.linspace(0, 4, 50)
    # identical at A = 1
    np.testing.assert_allclose(rc_raw_printed_density(1.0, s), LawSpec("rc_raw", 1.0).pdf(s), rtol=1e-14)
    # at A = 0.5 the A-free exponent is neither normalised nor has the stated mean
    printed = PrintedRCLaw(0.5)
    assert printed.raw_mass == pytest.approx(1 / math.sqrt(5), rel=1e-9)
    assert abs(printed.mean - mean_spacing_rc(0.5)) / mean_spacing_rc(0.5) > 0.3
    assert printed.total_mass == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("law", ALL_LAWS, ids=ids)
def test_quantile_inverts_cdf(law):
    u = np.linspace(1e-4, 1 - 1e-4, 200)
    np.testing.assert_allclose(cdf(law, quantile(law, u)), u, atol=1e-10)
    assert quantile(law, 0.0) == 0.0


def test_density_table_columns():
    tab = density_table(LawSpec("wigner"), points=11, x_max=2.0)
    assert tab.shape == (11, 2)
    assert tab[-1, 0] == 2.0
    assert tab[5, 1] == pytest.approx(LawSpec("wigner").pdf(1.0))


def test_adaptive_quadrature_against_closed_form():
    edges = np.linspace(0, 3, 7)
    got = integrate_intervals(np.sin, edges, abs_tol=1e-13)
    np.testing.assert_allclose(got, -np.diff(np.cos(edges)), atol=1e-14)
    # a sharply peaked integrand forces subdivision
    peak = lambda x: 1 / (1e-4 + (x - 0.3) ** 2)
    got = integrate_intervals(peak, np.array([0.0, 1.0]), abs_tol=1e-9).sum()
    want = 100 * (math.atan(0.7 / 1e-2) + math.atan(0.3 / 1e-2))
    assert got == pytest.approx(want, abs=1e-8)
