"""Experiment driver behind the CLI.

Realizations are processed in fixed-size blocks.  Each block depends only on
``(seed, N, A, block range)``, and blocks are reduced in index order, so the
output does not depend on the number of workers.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import (
    SELECTION_STREAM,
    EnsembleConfig,
    generalized_parity,
    materialize_matrix,
    pseudo_symmetry_residual,
    sample_rows,
    substream,
)
from .laws import C, LawKind, LawSpec, PrintedRCLaw, density_table, mean_spacing_cc, mean_spacing_rc
from .spacing import (
    SpacingSample,
    build_histogram,
    cc_batch,
    fit_small_spacing,
    generic_batch,
    ks_distance,
    normalize_to_unit_mean,
    rc_batch,
)
from .spectral import eigenvalues_batch, fourier_eigenvector, inverse_batch, s_matrix
from .symmetry import symmetry_report

log = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"
DEFAULT_SEED = 20090301
BLOCK_SIZE = 1000
EXPERIMENTS = ("fig1_cc", "fig2_rc", "fig3_generic", "structural", "all")
STRUCTURAL_DIMENSIONS = (2, 3, 4, 8, 16, 64, 100)
ORACLE_DIMENSIONS = (3, 4, 8, 16, 64)
SCALE_INVARIANCE = (0.5, 2.0)

# Monte Carlo panels: (dimension, realizations, KS threshold).
PANELS = {
    "fig1_cc": [(3, 10_000, 0.02)],
    "fig2_rc": [(3, 10_000, 0.02), (100, 1_000, 0.05)],
    "fig3_generic": [(100, 5_000, 0.025)],
}
OBSERVABLE = {"fig1_cc": "cc", "fig2_rc": "rc", "fig3_generic": "generic"}
NORMALIZED_LAW = {"cc": LawKind.CC_NORM, "rc": LawKind.RC_NORM, "generic": LawKind.WIGNER}


class ConfigError(ValueError):
    """Invalid run configuration."""


def ks_threshold(n: int) -> float:
    """KS acceptance bound for a sample size without a stated threshold."""
    return 2.0 / math.sqrt(n)


@dataclass
class RunConfig:
    experiment: str = "all"
    dimension: int | None = None
    scale: float = 1.0
    realizations: int | None = None
    seed: int = DEFAULT_SEED
    pairing: str = "one"
    bins: int = 50
    out_dir: Path = Path("results")
    workers: int = 1
    data_format: str = "csv"
    plots: bool = True

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.pairing not in ("one", "all"):
            raise ConfigError("pairing must be 'one' or 'all'")
        if self.data_format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.bins < 1:
            raise ConfigError("bins must be >= 1")
        if self.dimension is not None and self.dimension < 2:
            raise ConfigError("dimension must be >= 2")
        if self.realizations is not None and self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if not self.scale > 0:
            raise ConfigError("scale A must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        minimum = {"fig1_cc": 3, "fig2_rc": 3, "fig3_generic": 5}
        if self.dimension is not None:
            for name in self.experiments():
                if name in minimum and self.dimension < minimum[name]:
                    raise ConfigError(f"{name} needs dimension >= {minimum[name]}")

    def experiments(self) -> list[str]:
        if self.experiment == "all":
            return ["structural", "fig1_cc", "fig2_rc", "fig3_generic"]
        return [self.experiment]

    def panels(self, name: str) -> list[tuple[int, int, float]]:
        """Paper-sized panels unless dimension/realizations override them."""
        defaults = PANELS[name]
        if self.dimension is None and self.realizations is None:
            return list(defaults)
        out = []
        for n, r, thr in defaults:
            n2 = self.dimension if self.dimension is not None else n
            r2 = self.realizations if self.realizations is not None else r
            out.append((n2, r2, thr if (n2, r2) == (n, r) else ks_threshold(r2)))
        return list(dict.fromkeys(out))

    def echo(self) -> dict:
        d = asdict(self)
        d["out_dir"] = str(self.out_dir)
        return d


# -- sampling -----------------------------------------------------------------

def _block(args) -> dict[str, np.ndarray]:
    n, scale, seed, start, stop, want_all = args
    config = EnsembleConfig(n, scale, stop, seed)
    rows = sample_rows(config, start, stop)
    energies = eigenvalues_batch(rows)
    choices = np.array([substream(seed, k, SELECTION_STREAM).random(3) for k in range(start, stop)])
    out = {"cc": cc_batch(energies).ravel()}
    if n >= 3:
        out["rc"] = rc_batch(energies, "one", choices[:, 0])
        if want_all:
            out["rc_all"] = rc_batch(energies, "all").ravel()
    if n >= 5:
        out["generic"] = generic_batch(energies, "one", choices[:, 1:])
        if want_all:
            out["generic_all"] = generic_batch(energies, "all").ravel()
    return out


def collect_spacings(n: int, scale: float, realizations: int, seed: int,
                     workers: int = 1, want_all: bool = False) -> dict[str, np.ndarray]:
    """Raw spacings of every kind for one ensemble, ordered by realization."""
    tasks = [
        (n, scale, seed, start, min(start + BLOCK_SIZE, realizations), want_all)
        for start in range(0, realizations, BLOCK_SIZE)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block, tasks))
    else:
        parts = [_block(t) for t in tasks]
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


# -- Monte Carlo panels ---------------------------------------------------------

@dataclass
class PanelResult:
    tag: str
    observable: str
    law: str
    dimension: int
    scale: float
    realizations: int
    sample_size: int
    empirical_mean: float
    analytic_mean: float | None
    ks: float
    threshold: float
    passed: bool
    extra: dict = field(default_factory=dict)
    sample: SpacingSample | None = field(default=None, repr=False)


def _raw_mean(observable: str, scale: float) -> float | None:
    if observable == "cc":
        return mean_spacing_cc(scale)
    if observable == "rc":
        return mean_spacing_rc(scale)
    return None


def run_panel(observable: str, n: int, realizations: int, threshold: float, *,
              scale: float = 1.0, seed: int = DEFAULT_SEED, workers: int = 1,
              pairing: str = "one") -> PanelResult:
    want_all = pairing == "all" or (observable == "rc" and n > 3)
    raw = collect_spacings(n, scale, realizations, seed, workers, want_all)
    values = raw[observable]
    sample = normalize_to_unit_mean(values, kind=observable)
    law = LawSpec(NORMALIZED_LAW[observable])
    ks = ks_distance(sample, law)
    extra: dict = {}
    if observable == "cc":
        extra["ks_raw"] = ks_distance(SpacingSample("cc", values), LawSpec(LawKind.CC_RAW, scale))
    if observable == "rc":
        raw_sample = SpacingSample("rc", values)
        extra["ks_raw"] = ks_distance(raw_sample, LawSpec(LawKind.RC_RAW, scale))
        extra["ks_raw_printed_exponent"] = (
            ks_distance(raw_sample, PrintedRCLaw(scale)) if scale < 2 else None
        )
        if "rc_all" in raw:
            extra["ks_all_pairs"] = ks_distance(normalize_to_unit_mean(raw["rc_all"]), law)
    if observable == "generic" and "generic_all" in raw:
        extra["ks_all_pairs"] = ks_distance(normalize_to_unit_mean(raw["generic_all"]), law)
    if pairing == "all" and f"{observable}_all" in raw:
        sample = normalize_to_unit_mean(raw[f"{observable}_all"], kind=observable)
    return PanelResult(
        tag=f"{observable}_n{n}",
        observable=observable,
        law=law.name,
        dimension=n,
        scale=scale,
        realizations=realizations,
        sample_size=int(values.size),
        empirical_mean=float(values.mean()),
        analytic_mean=_raw_mean(observable, scale),
        ks=ks,
        threshold=threshold,
        passed=bool(ks < threshold),
        extra=extra,
        sample=sample,
    )


def scale_invariance(observable: str, n: int, realizations: int, seed: int,
                     scales=(0.5, 1.0, 2.0), workers: int = 1) -> dict[float, float]:
    """Normalised KS distance at several A with matched substreams."""
    law = LawSpec(NORMALIZED_LAW[observable])
    out = {}
    for a in scales:
        raw = collect_spacings(n, a, realizations, seed, workers)
        out[a] = ks_distance(normalize_to_unit_mean(raw[observable]), law)
    return out


def raw_moment_check(scale: float = 1.0, realizations: int = 100_000,
                     seed: int = DEFAULT_SEED, workers: int = 1) -> dict:
    """Empirical mean cc and rc spacings at N = 3 against the analytic means."""
    raw = collect_spacings(3, scale, realizations, seed, workers)
    out = {}
    for kind, analytic in (("cc", mean_spacing_cc(scale)), ("rc", mean_spacing_rc(scale))):
        mean = float(raw[kind].mean())
        out[kind] = {
            "sample_size": int(raw[kind].size),
            "empirical_mean": mean,
            "analytic_mean": analytic,
            "relative_error": abs(mean - analytic) / analytic,
        }
    return out


def small_spacing_check(realizations: int = 100_000, seed: int = DEFAULT_SEED,
                        bin_width: float = 0.02, z_max: float = 0.3, workers: int = 1) -> dict:
    """Histogram behaviour near zero spacing at N = 3.

    rc: slope of a through-origin linear fit against the analytic slope
    ``(3 sqrt3 pi/16) c^2``.  cc: first-bin density against ``2/pi`` and the
    linear coefficient of a quadratic fit, which should vanish.
    """
    raw = collect_spacings(3, 1.0, realizations, seed, workers)
    result = {}
    rc = normalize_to_unit_mean(raw["rc"])
    rc_hist = build_histogram(rc, int(math.ceil(rc.values.max() / bin_width)))
    (slope,), (slope_err,) = fit_small_spacing(rc_hist, z_max, degree=1, through_origin=True)
    analytic = 3.0 * math.sqrt(3.0) * math.pi / 16.0 * C * C
    result["rc"] = {
        "slope": float(slope),
        "slope_stderr": float(slope_err),
        "analytic_slope": analytic,
        "relative_error": float(abs(slope - analytic) / analytic),
    }
    cc = normalize_to_unit_mean(raw["cc"])
    cc_hist = build_histogram(cc, int(math.ceil(cc.values.max() / bin_width)))
    coef, err = fit_small_spacing(cc_hist, z_max, degree=2)
    first = float(cc_hist.density_values[0])
    result["cc"] = {
        "first_bin_density": first,
        "first_bin_width": float(cc_hist.widths[0]),
        "analytic_at_zero": 2.0 / math.pi,
        "first_bin_relative_error": abs(first - 2.0 / math.pi) / (2.0 / math.pi),
        "slope_at_zero": float(coef[1]),
        "slope_stderr": float(err[1]),
    }
    return result


# -- structural suite -------------------------------------------------------------

def structural_suite(seed: int = DEFAULT_SEED, residual_count: int = 1000,
                     oracle_count: int = 100) -> dict:
    """Algebraic checks on the ensemble, spectra, eigenvectors and laws."""
    out: dict = {}

    worst = 0.0
    for n in STRUCTURAL_DIMENSIONS:
        eta = generalized_parity(n)
        rows = sample_rows(EnsembleConfig(n, 1.0, residual_count, seed))
        for a in rows:
            worst = max(worst, pseudo_symmetry_residual(materialize_matrix(a), eta))
    out["pseudo_symmetry"] = {"max_residual": worst, "passed": worst == 0.0}

    eig_worst = 0.0
    trip_worst = 0.0
    for n in ORACLE_DIMENSIONS:
        rows = sample_rows(EnsembleConfig(n, 1.0, oracle_count, seed))
        energies = eigenvalues_batch(rows)
        vectors = np.column_stack([fourier_eigenvector(n, l) for l in range(n)])
        for a, e in zip(rows, energies):
            resid = materialize_matrix(a) @ vectors - vectors * e[None, :]
            eig_worst = max(eig_worst, float(np.max(np.abs(resid))) / (1 + np.max(np.abs(a))))
        back = inverse_batch(energies)
        trip_worst = max(trip_worst, float(np.max(np.abs(back - rows) / np.max(np.abs(rows), axis=1, keepdims=True))))
    out["eigen_equation"] = {"max_scaled_residual": eig_worst, "passed": eig_worst < 1e-10}

    s_sq = {n: s_matrix(n).square_residual() for n in range(2, 65)}
    s_worst = max(s_sq[n] / (1e-12 * n) for n in range(3, 65))
    out["inverse_map"] = {
        "max_round_trip_relative_error": trip_worst,
        "max_s_squared_residual_over_tolerance": s_worst,
        "s_squared_residual_n2": s_sq[2],
        "passed": trip_worst < 1e-12 and s_worst < 1.0,
    }

    real_worst = pt_worst = 0.0
    sep = math.inf
    vanishing = {"sesquilinear": True, "bilinear": True}
    for n in range(2, 65):
        rep = symmetry_report(n)
        real_worst = max(real_worst, rep.max_real_eta_residual)
        pt_worst = max(pt_worst, rep.max_complex_pt_norm)
        sep = min(sep, rep.min_complex_eta_residual)
        if n >= 3:
            forms = rep.vanishing_pair_forms()
            vanishing = {k: vanishing[k] and forms[k] for k in vanishing}
    out["eigenvector_symmetry"] = {
        "max_real_eta_residual": real_worst,
        "max_complex_pt_norm": pt_worst,
        "min_complex_eta_residual": sep,
        "vanishing_pair_forms": vanishing,
        "passed": real_worst < 1e-12 and pt_worst < 1e-12,
    }

    out["symmetry_reports"] = {str(n): symmetry_report(n).to_dict() for n in (3, 4, 8)}
    out["analytic_laws"] = law_self_consistency()
    out["passed"] = all(v["passed"] for v in out.values() if "passed" in v)
    return out


def law_self_consistency(scale: float = 1.0) -> dict:
    laws = [LawSpec(k, scale) for k in LawKind]
    mass = {law.name: law.total_mass for law in laws}
    means = {law.name: law.moment(1) for law in laws}
    mass_err = max(abs(m - 1) for m in mass.values())
    mean_err = max(abs(means[law.name] - 1) for law in laws if law.normalized)
    wigner = LawSpec(LawKind.WIGNER)
    s = np.linspace(0.0, 6.0, 6001)
    cdf_err = float(np.max(np.abs(wigner.cdf(s) - (1 - np.exp(-math.pi * s * s / 4)))))
    c_ok = round(C, 5) == 1.31112
    return {
        "mass": mass,
        "first_moment": means,
        "max_mass_error": mass_err,
        "max_normalized_mean_error": mean_err,
        "c_constant": C,
        "wigner_cdf_max_error": cdf_err,
        "passed": mass_err < 1e-6 and mean_err < 1e-6 and c_ok and cdf_err < 1e-8,
    }


# -- output -------------------------------------------------------------------------

def _write_values(path: Path, header: list[str], rows: np.ndarray, data_format: str) -> Path:
    rows = np.asarray(rows)
    if rows.ndim == 1:
        rows = rows[:, None]
    if data_format == "json":
        path = path.with_suffix(".json")
        payload = {"columns": header, "data": [[float(x) for x in r] for r in rows]}
        path.write_text(json.dumps(payload) + "\n")
        return path
    path = path.with_suffix(".csv")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([repr(float(x)) for x in r])
    return path


def write_panel_data(result: PanelResult, out_dir: Path, bins: int, data_format: str) -> dict[str, str]:
    sample = result.sample
    hist = build_histogram(sample, bins)
    law = LawSpec(result.law)
    paths = {
        "spacings": _write_values(out_dir / f"spacings_{result.tag}", ["z"], sample.values, data_format),
        "histogram": _write_values(out_dir / f"histogram_{result.tag}",
                                   ["bin_left", "bin_right", "density"], hist.as_table(), data_format),
        "density": _write_values(out_dir / f"density_{law.name}", ["x", "p"],
                                 density_table(law), data_format),
    }
    return {k: p.name for k, p in paths.items()}


def _panel_dict(result: PanelResult) -> dict:
    d = asdict(result)
    d.pop("sample")
    return d


def run(config: RunConfig) -> dict:
    """Execute the configured experiments, write outputs and return the report."""
    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    report: dict = {
        "format_version": FORMAT_VERSION,
        "package_version": __version__,
        "config": config.echo(),
        "experiments": {},
    }
    panels: list[PanelResult] = []
    for name in config.experiments():
        t0 = time.perf_counter()
        if name == "structural":
            report["structural"] = structural_suite(config.seed)
            passed = report["structural"]["passed"]
        else:
            observable = OBSERVABLE[name]
            results = []
            for n, r, thr in config.panels(name):
                log.info("%s: N=%d, %d realizations", name, n, r)
                res = run_panel(observable, n, r, thr, scale=config.scale, seed=config.seed,
                                workers=config.workers, pairing=config.pairing)
                res.extra["files"] = write_panel_data(res, out_dir, config.bins, config.data_format)
                if config.scale == 1.0:
                    inv = scale_invariance(observable, n, r, config.seed, SCALE_INVARIANCE, config.workers)
                    res.extra["ks_by_scale"] = {str(a): v for a, v in inv.items()}
                    res.extra["max_ks_shift_over_scale"] = max(abs(v - res.ks) for v in inv.values())
                results.append(res)
            panels.extend(results)
            report["experiments"][name] = [_panel_dict(r) for r in results]
            passed = all(r.passed for r in results)
        timings[name] = time.perf_counter() - t0
        log.info("%s: %s", name, "PASS" if passed else "FAIL")

    report["passed"] = bool(
        report.get("structural", {}).get("passed", True)
        and all(p.passed for p in panels)
    )
    if panels:
        from .plotting import render_figures, write_gnuplot_script

        report["plot_script"] = write_gnuplot_script(panels, out_dir).name
        if config.plots:
            try:
                report["figures"] = [p.name for p in render_figures(panels, out_dir, config.bins)]
            except Exception as exc:  # plotting never gates acceptance
                log.warning("figure rendering failed: %s", exc)
                report["figures"] = []
    report["timings"] = timings
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, default=_json_default) + "\n")
    return report


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
