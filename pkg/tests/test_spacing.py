import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from cyclic_rmt.ensemble import EnsembleConfig, FirstRow, sample_first_row
from cyclic_rmt.experiments import collect_spacings
from cyclic_rmt.laws import LawKind, LawSpec
from cyclic_rmt.spacing import (
    Histogram,
    SpacingSample,
    build_histogram,
    extract_cc,
    extract_generic,
    extract_rc,
    fit_small_spacing,
    generic_batch,
    ks_critical_value,
    ks_distance,
    normalize_to_unit_mean,
)
from cyclic_rmt.spectral import eigenvalues_dft


def spectrum(a, index=0, seed=0):
    return eigenvalues_dft(FirstRow(np.asarray(a, dtype=float), index, seed))


def eig_oracle(a, l):
    n = len(a)
    return sum(a[p] * np.exp(2j * np.pi * p * l / n) for p in range(n))


# -- extraction -----------------------------------------------------------------

def test_cc_n3_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.standard_normal(3)
        (s,) = extract_cc(spectrum(a))
        assert s == pytest.approx(math.sqrt(3) * abs(a[2] - a[1]), rel=1e-12, abs=1e-15)


def test_cc_degenerate_and_empty():
    assert extract_cc(spectrum([0.0, 1.0, 1.0]))[0] == pytest.approx(0.0, abs=1e-15)
    assert extract_cc(spectrum([0.3, 0.9])).size == 0


def test_cc_n5_pairs():
    a = np.random.default_rng(2).standard_normal(5)
    got = extract_cc(spectrum(a))
    assert got.size == 2
    np.testing.assert_allclose(got, [2 * abs(eig_oracle(a, l).imag) for l in (1, 2)], rtol=1e-12)


def test_rc_n3_closed_form_and_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.standard_normal(3)
        want = abs(1.5 * (a[1] + a[2]) + 1j * math.sqrt(3) / 2 * (a[1] - a[2]))
        both = extract_rc(spectrum(a), policy="all")
        np.testing.assert_allclose(both, [want, want], rtol=1e-12)
        np.testing.assert_allclose(extract_rc(spectrum(a)), [want], rtol=1e-12)
    assert extract_rc(spectrum([1.0, 0.0, 0.0]))[0] == pytest.approx(0.0, abs=1e-15)


def test_rc_empty_without_complex_eigenvalues():
    assert extract_rc(spectrum([1.0, 2.0])).size == 0
    assert extract_rc(spectrum([1.0, 2.0]), policy="all").size == 0


def test_rc_one_policy_is_deterministic_per_realization():
    cfg = EnsembleConfig(10, realizations=5, seed=11)
    spec = eigenvalues_dft(sample_first_row(cfg, 3))
    first = extract_rc(spec)
    assert np.array_equal(first, extract_rc(spec))
    assert first[0] in extract_rc(spec, policy="all")


def test_unknown_policy():
    with pytest.raises(ValueError):
        extract_rc(spectrum([1.0, 2.0, 3.0]), policy="some")


def test_generic_exclusion_rule_n6():
    a = np.random.default_rng(4).standard_normal(6)
    spec = spectrum(a)
    e = spec.eigenvalues
    got = extract_generic(spec, policy="all")
    # complex indices (0-based) 1, 2, 4, 5; partners 1<->5, 2<->4
    want = sorted(abs(e[j] - e[k]) for j, k in [(1, 2), (1, 4), (2, 5), (4, 5)])
    np.testing.assert_allclose(sorted(got), want, rtol=1e-12)
    assert not np.any(np.isclose(got, abs(e[1] - e[5])))


def test_generic_needs_two_pairs():
    assert extract_generic(spectrum([1.0, 2.0, 3.0, 4.0])).size == 0
    assert extract_generic(spectrum([1.0, 2.0, 3.0])).size == 0
    assert extract_generic(spectrum(np.ones(5)), policy="all").size == 4


def test_generic_degenerate_retained():
    got = extract_generic(spectrum(np.full(8, 0.5)), policy="all")
    assert got.size == 12
    np.testing.assert_allclose(got, 0.0, atol=1e-15)


@pytest.mark.parametrize("n", [5, 6, 9, 10])
def test_generic_one_policy_uniform_over_admissible(n):
    a = np.random.default_rng(n).standard_normal(n)
    e = eigenvalues_dft(FirstRow(a)).eigenvalues
    admissible = {}
    complex_idx = [l for l in range(1, n) if l != (n - l) % n]
    for j in complex_idx:
        for k in complex_idx:
            if j < k and k != (n - j) % n:
                admissible[(j, k)] = abs(e[j] - e[k])
    trials = 20_000
    u = np.random.default_rng(0).random((trials, 2))
    got = generic_batch(np.tile(e, (trials, 1)), "one", u)
    # identify each drawn spacing with its (unordered) admissible pair
    keys = list(admissible)
    values = np.array([admissible[k] for k in keys])
    hits = Counter()
    for s in got:
        match = np.flatnonzero(np.isclose(values, s, rtol=1e-12, atol=0))
        assert match.size >= 1
        hits[keys[match[0]]] += 1
    # conjugation maps (j, k) to (N-j, N-k) with equal spacing, so compare
    # against expected counts after merging equal values
    expected = Counter()
    for k in keys:
        first = keys[np.flatnonzero(np.isclose(values, admissible[k], rtol=1e-12, atol=0))[0]]
        expected[first] += trials / len(keys)
    chi2 = sum((hits[k] - expected[k]) ** 2 / expected[k] for k in expected)
    assert stats.chi2.sf(chi2, len(expected) - 1) > 1e-3


# -- normalisation ----------------------------------------------------------------

def test_normalize_examples():
    s = normalize_to_unit_mean([2.0, 4.0, 6.0])
    np.testing.assert_allclose(s.values, [0.5, 1.0, 1.5])
    assert s.empirical_mean == 4.0 and s.normalized
    unit = normalize_to_unit_mean([0.5, 1.5, 1.0])
    np.testing.assert_array_equal(unit.values, [0.5, 1.5, 1.0])
    with pytest.raises(ValueError):
        normalize_to_unit_mean([0.0, 0.0])
    with pytest.raises(ValueError):
        normalize_to_unit_mean([])


@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=300))
def test_normalized_mean_is_one(values):
    s = normalize_to_unit_mean(values)
    assert abs(s.values.mean() - 1) < 1e-15 * 8


def test_negative_spacings_rejected():
    with pytest.raises(ValueError):
        SpacingSample("cc", [1.0, -0.1])


def test_cc_raw_mean_at_a1():
    raw = collect_spacings(3, 1.0, 100_000, seed=17)
    s = normalize_to_unit_mean(raw["cc"])
    assert s.empirical_mean == pytest.approx(math.sqrt(2 / math.pi), rel=0.02)


# -- KS -------------------------------------------------------------------------------

@pytest.mark.parametrize("kind", list(LawKind))
def test_ks_exact_quantiles(kind):
    law = LawSpec(kind, 1.3)
    n = 400
    x = law.quantile((np.arange(1, n + 1) - 0.5) / n)
    sample = SpacingSample("q", x, normalized=law.normalized, empirical_mean=1.0)
    assert ks_distance(sample, law) <= 1 / (2 * n) + 1e-9


def test_ks_matches_scipy():
    law = LawSpec(LawKind.RC_NORM)
    x = law.quantile(np.random.default_rng(5).random(700))
    sample = normalize_to_unit_mean(x)
    want = stats.kstest(sample.values, law.cdf).statistic
    assert ks_distance(sample, law) == pytest.approx(want, abs=1e-12)


def test_ks_errors():
    with pytest.raises(ValueError):
        ks_distance(SpacingSample("x", []), LawSpec("wigner"))
    with pytest.raises(ValueError):
        ks_distance(SpacingSample("x", [1.0, 2.0]), LawSpec("wigner"))
    with pytest.raises(ValueError):
        ks_distance(normalize_to_unit_mean([1.0, 2.0]), LawSpec("cc_raw", 1.0))


def test_wigner_sample_rejected_by_cc_law():
    wigner = LawSpec("wigner")
    x = wigner.quantile(np.random.default_rng(6).random(5000))
    assert ks_distance(normalize_to_unit_mean(x), LawSpec("cc_norm")) > 0.1
    # sup gap between the two CDFs, by quadrature tables
    s = np.linspace(0, 6, 60_001)
    assert np.max(np.abs(wigner.cdf(s) - LawSpec("cc_norm").cdf(s))) > 0.1


def test_cc_ks_calibration_repeated_trials():
    law = LawSpec("cc_norm")
    n, trials = 2000, 40
    passed = 0
    for t in range(trials):
        raw = collect_spacings(3, 1.0, n, seed=1000 + t)
        passed += ks_distance(normalize_to_unit_mean(raw["cc"]), law) < ks_critical_value(n, 0.05)
    assert passed >= 35


@pytest.mark.parametrize("kind", list(LawKind))
def test_ks_self_test(kind):
    law = LawSpec(kind, 0.8)
    n = 500
    rng = np.random.default_rng(abs(hash(kind.value)) % 2**32)
    passes = 0
    for _ in range(100):
        x = law.quantile(rng.random(n))
        sample = normalize_to_unit_mean(x) if law.normalized else SpacingSample(kind.value, x)
        passes += ks_distance(sample, law) < ks_critical_value(n, 0.01)
    assert passes >= 98


# -- histograms -------------------------------------------------------------------------

def test_histogram_examples():
    h = build_histogram(SpacingSample("x", np.ones(100)), 1)
    assert h.density_values[0] == pytest.approx(1 / h.widths[0])
    flat = build_histogram(SpacingSample("x", np.linspace(0, 1, 10_001)), 10)
    np.testing.assert_allclose(flat.density_values, 1.0, rtol=2e-3)
    assert np.sum(flat.density_values * flat.widths) == pytest.approx(1.0, abs=1e-12)
    assert flat.as_table().shape == (10, 3)
    with pytest.raises(ValueError):
        build_histogram(SpacingSample("x", []), 3)
    with pytest.raises(ValueError):
        build_histogram(SpacingSample("x", [1.0]), 0)


def test_cc_histogram_within_multinomial_noise():
    raw = collect_spacings(3, 1.0, 10_000, seed=23)
    sample = normalize_to_unit_mean(raw["cc"])
    h = build_histogram(sample, 30)
    law = LawSpec("cc_norm")
    n = len(sample)
    p = np.diff(law.cdf(h.bin_edges))
    se = np.sqrt(p * (1 - p) / n) / h.widths
    z = (h.density_values - p / h.widths) / np.where(se > 0, se, 1)
    assert np.max(np.abs(z[p > 1e-4])) < 4.5
    assert np.sum(h.density_values * h.widths) == pytest.approx(1.0, abs=1e-12)


def test_fit_small_spacing_recovers_linear_density():
    edges = np.linspace(0, 1, 51)
    centers = 0.5 * (edges[1:] + edges[:-1])
    counts = np.round(1e6 * 2 * centers * np.diff(edges)).astype(int)
    h = Histogram(edges, counts)
    (slope,), _ = fit_small_spacing(h, 0.3, degree=1, through_origin=True)
    assert slope == pytest.approx(2.0, rel=1e-3)
    coef, err = fit_small_spacing(h, 0.3, degree=2)
    assert coef[0] == pytest.approx(0.0, abs=5 * err[0])
    with pytest.raises(ValueError):
        fit_small_spacing(h, 0.01, degree=2)


def test_rc_exponent_reading_adjudicated_by_monte_carlo():
    # at A = 1 both readings coincide, so compare at A = 0.5
    from cyclic_rmt.laws import PrintedRCLaw, mean_spacing_rc

    raw = collect_spacings(3, 0.5, 20_000, seed=31)["rc"]
    sample = SpacingSample("rc", raw)
    assert raw.mean() == pytest.approx(mean_spacing_rc(0.5), rel=0.02)
    assert ks_distance(sample, LawSpec("rc_raw", 0.5)) < ks_critical_value(raw.size, 0.01)
    assert ks_distance(sample, PrintedRCLaw(0.5)) > 0.2
