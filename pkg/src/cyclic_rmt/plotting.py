"""Figures for the Monte Carlo panels.

Two outputs: a gnuplot script reading the exported CSV files, and PNG
figures rendered directly with matplotlib.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .laws import LawSpec
from .spacing import build_histogram

log = logging.getLogger(__name__)

LAW_LABELS = {
    "cc_norm": r"$\frac{2}{\pi}e^{-z^2/\pi}$",
    "rc_norm": r"$p_{rc}(z)$",
    "wigner": r"$\frac{\pi s}{2}e^{-\pi s^2/4}$",
}
TITLES = {
    "cc": "complex-conjugate spacing",
    "rc": "real-complex spacing",
    "generic": "generic complex spacing",
}


def _style():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({
        "font.size": 11,
        "axes.labelsize": 12,
        "legend.frameon": False,
        "figure.figsize": (5.0, 3.6),
        "savefig.dpi": 150,
    })
    return plt


def write_gnuplot_script(panels, out_dir: Path, name: str = "plots.gp") -> Path:
    """Batch-mode gnuplot script: one PNG per panel, histogram plus density."""
    out_dir = Path(out_dir)
    lines = [
        "# Spacing histograms with analytic densities.",
        f"# Run with: gnuplot {name}",
    ]
    if not panels:
        lines.append("# no Monte Carlo panels in this run")
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n")
        return path
    lines += [
        "set datafile separator ','",
        "set terminal pngcairo size 800,560",
        "set style fill transparent solid 0.4",
        "set xlabel 'normalized spacing'",
        "set ylabel 'density'",
    ]
    for p in panels:
        files = p.extra.get("files", {})
        hist = files.get("histogram")
        dens = files.get("density")
        missing = [f for f in (hist, dens) if f is None or not (out_dir / f).exists()]
        if missing or not hist.endswith(".csv"):
            log.warning("skipping %s in plot script: data files unavailable", p.tag)
            lines.append(f"# skipped {p.tag}: csv data not available")
            continue
        lines += [
            "",
            f"set output 'gp_{p.tag}.png'",
            f"set title '{TITLES[p.observable]}, N={p.dimension}, {p.realizations} realizations'",
            f"plot '{hist}' skip 1 using (($1+$2)/2):3:($2-$1) with boxes title 'Monte Carlo', \\",
            f"     '{dens}' skip 1 using 1:2 with lines lw 2 title '{p.law}'",
        ]
    path = out_dir / name
    path.write_text("\n".join(lines) + "\n")
    return path


def render_figures(panels, out_dir: Path, bins: int = 50) -> list[Path]:
    plt = _style()
    out = []
    for p in panels:
        hist = build_histogram(p.sample, bins)
        law = LawSpec(p.law)
        xs = np.linspace(0.0, hist.bin_edges[-1], 400)
        fig, ax = plt.subplots()
        ax.bar(hist.bin_edges[:-1], hist.density_values, width=hist.widths, align="edge",
               alpha=0.45, color="C0", label=f"N={p.dimension}, {p.realizations} realizations")
        ax.plot(xs, law.pdf(xs), color="C3", lw=2, label=LAW_LABELS.get(p.law, p.law))
        ax.set_xlim(0, min(hist.bin_edges[-1], 4.0))
        ax.set_xlabel("z")
        ax.set_ylabel("P(z)")
        ax.set_title(f"{TITLES[p.observable]} (KS = {p.ks:.4f})")
        ax.legend()
        fig.tight_layout()
        path = Path(out_dir) / f"fig_{p.tag}.png"
        fig.savefig(path)
        plt.close(fig)
        out.append(path)
    return out
