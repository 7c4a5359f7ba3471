"""The six figure kinds and the render() entry point.

Figures are declared by a :class:`FigureSpec` (which files go in, which image
path comes out, where the target-level markers sit) and rendered with a fixed
style table on the Agg backend, so re-rendering identical inputs writes an
identical image file.  All statistics are read from the input files; the code
below only bins, scales, and draws.
"""

import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from crcplots import schema
from crcplots.style import (
    CORRECTION_COLOR,
    CURVE_STYLE,
    DEFAULT_METHOD_CURVE,
    FAMILY_LINESTYLES,
    LEVEL_STYLE,
    METHOD_CURVE,
    RC_PARAMS,
    method_style,
)

FIGURE_KINDS = (
    "risk-hist",
    "size-hist",
    "risk-curves",
    "phase-heatmap",
    "bounds-vs-n",
    "bounds-vs-sigma",
)

CURVE_FILES = {
    "empirical": "empirical.csv",
    "loss-monotonized": "loss_monotonized.csv",
    "risk-monotonized": "risk_monotonized.csv",
}


class RenderError(Exception):
    """The inputs parsed but cannot make the requested figure."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw, from which files, to which image path.

    ``kind`` picks one of :data:`FIGURE_KINDS`; the path fields that matter
    depend on it (results tables for the histograms, a curves directory plus
    selection records for the overlay, a phase table for the heatmap,
    correction tables for the bound plots).  ``alpha`` and ``alpha_prime``
    place the dashed / dotted target-level markers where a kind supports
    them.  ``output`` must end in .png or .svg.
    """

    kind: str
    output: str
    results: str | None = None
    summary: str | None = None
    curves_dir: str | None = None
    selections: tuple[str, ...] = ()
    true_curve: str | None = None
    phase: str | None = None
    corrections: tuple[str, ...] = ()
    alpha: float | None = None
    alpha_prime: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise RenderError(
                f"unknown figure kind {self.kind!r}; expected one of {', '.join(FIGURE_KINDS)}"
            )
        ext = os.path.splitext(self.output)[1]
        if ext not in (".png", ".svg"):
            raise RenderError(f"output must end in .png or .svg, got {self.output!r}")
        object.__setattr__(self, "selections", tuple(self.selections))
        object.__setattr__(self, "corrections", tuple(self.corrections))


def histogram_edges(values) -> np.ndarray:
    """Freedman–Diaconis bin edges with a fixed 30-bin fallback.

    The fallback covers degenerate inputs (too few points, zero IQR, or a
    single distinct value); both branches are deterministic functions of the
    data alone.
    """
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    if n >= 2 and v[-1] > v[0]:
        iqr = float(np.percentile(v, 75) - np.percentile(v, 25))
        width = 2.0 * iqr / n ** (1.0 / 3.0)
        if width > 0.0:
            count = max(1, math.ceil((v[-1] - v[0]) / width))
            return np.linspace(v[0], v[-1], count + 1)
    lo = v[0] if n else 0.0
    hi = v[-1] if n else 1.0
    if hi <= lo:
        lo, hi = lo - 0.5, lo + 0.5
    return np.linspace(lo, hi, 31)


def _level_lines(ax, spec: FigureSpec, orientation: str = "vertical") -> None:
    draw = ax.axvline if orientation == "vertical" else ax.axhline
    if spec.alpha is not None:
        draw(spec.alpha, **LEVEL_STYLE["alpha"], label=f"α = {spec.alpha:g}")
    if spec.alpha_prime is not None:
        draw(
            spec.alpha_prime,
            **LEVEL_STYLE["alpha_prime"],
            label=f"α′ = {spec.alpha_prime:g}",
        )


def _grouped(rows, key):
    """Values per method, in order of first appearance."""
    groups: dict[str, list] = {}
    for row in rows:
        groups.setdefault(row["method"], []).append(key(row))
    return groups


def _method_panels(groups, spec: FigureSpec, xlabel: str, titles=None):
    names = list(groups)
    ncols = 2 if len(names) > 1 else 1
    nrows = math.ceil(len(names) / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.4 * ncols, 3.1 * nrows), squeeze=False
    )
    flat = axes.ravel()
    for ax, name in zip(flat, names):
        style = method_style(name)
        values = groups[name]
        ax.hist(
            values,
            bins=histogram_edges(values),
            color=style.color,
            edgecolor="white",
            linewidth=0.4,
        )
        _level_lines(ax, spec)
        title = style.label
        if titles and name in titles:
            title = f"{style.label}\n{titles[name]}"
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("repetitions")
    for ax in flat[len(names):]:
        ax.set_visible(False)
    if (spec.alpha is not None or spec.alpha_prime is not None) and names:
        flat[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_risk_hist(spec: FigureSpec):
    if spec.results is None:
        raise RenderError("risk-hist needs a results file")
    rows = schema.read_results_csv(spec.results)
    if not rows:
        raise RenderError(f"results file has no rows: {spec.results}")
    titles = None
    if spec.summary is not None:
        summary = schema.read_summary_json(spec.summary)
        titles = {
            name: f"violation rate {stats['violation_rate']:.2f}"
            for name, stats in summary.items()
        }
    groups = _grouped(rows, key=lambda r: r["test_risk"])
    return _method_panels(groups, spec, xlabel="test risk", titles=titles)


def _render_size_hist(spec: FigureSpec):
    if spec.results is None:
        raise RenderError("size-hist needs a results file")
    rows = schema.read_results_csv(spec.results)
    if not rows:
        raise RenderError(f"results file has no rows: {spec.results}")
    with_sizes = [r for r in rows if r["set_size"] is not None]
    if not with_sizes:
        raise RenderError(f"results carry no set_size values: {spec.results}")
    groups = _grouped(with_sizes, key=lambda r: r["set_size"])
    return _method_panels(groups, spec, xlabel="set size")


def _render_risk_curves(spec: FigureSpec):
    if spec.curves_dir is None:
        raise RenderError("risk-curves needs a curves directory")
    curves = {}
    for kind, filename in CURVE_FILES.items():
        curves[kind] = schema.read_curve_csv(os.path.join(spec.curves_dir, filename))
    if spec.true_curve is not None:
        curves["true"] = schema.read_curve_csv(spec.true_curve)
    selections = [schema.read_selection_json(p) for p in spec.selections]

    # resolve every circle's y-value from its curve before drawing anything
    circles = []
    for sel in selections:
        curve_kind = METHOD_CURVE.get(sel["method"], DEFAULT_METHOD_CURVE)
        curve = curves[curve_kind]
        lam = sel["lambda"]
        try:
            y = curve["risk"][curve["lambda"].index(lam)]
        except ValueError:
            raise RenderError(
                f"selected lambda {lam!r} from {sel['method']!r} is not on the "
                f"{curve_kind} curve grid"
            ) from None
        circles.append((sel["method"], lam, y))

    fig, ax = plt.subplots(figsize=(7.2, 4.6))
    for kind, curve in curves.items():
        style = dict(CURVE_STYLE[kind])
        if curve["estimated"] and kind == "true":
            style["label"] += " (estimated)"
        ax.plot(curve["lambda"], curve["risk"], linewidth=1.4, **style)
    for name, lam, y in circles:
        style = method_style(name)
        ax.scatter(
            [lam],
            [y],
            s=70,
            facecolors="none",
            edgecolors=style.color,
            linewidths=1.6,
            zorder=5,
            label=f"{style.label} selection",
        )
    _level_lines(ax, spec, orientation="horizontal")
    ax.set_xlabel("threshold λ")
    ax.set_ylabel("risk")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_phase_heatmap(spec: FigureSpec):
    if spec.phase is None:
        raise RenderError("phase-heatmap needs a phase table")
    cells = schema.read_phase_csv(spec.phase)
    ns = sorted({c["n"] for c in cells})
    ms = sorted({c["m"] for c in cells})
    grid = np.full((len(ms), len(ns)), np.nan)
    controlled = np.zeros((len(ms), len(ns)), dtype=bool)
    for c in cells:
        i, j = ms.index(c["m"]), ns.index(c["n"])
        grid[i, j] = c["analytic_risk"]
        controlled[i, j] = c["controlled"]

    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(ns), 1.2 + 0.9 * len(ms)))
    mesh = ax.pcolormesh(
        np.ma.masked_invalid(grid), cmap="viridis", vmin=0.0, edgecolors="white",
        linewidth=0.5,
    )
    vmax = float(np.nanmax(grid))
    for i in range(len(ms)):
        for j in range(len(ns)):
            if np.isnan(grid[i, j]):
                continue
            mark = "*" if controlled[i, j] else ""
            color = "white" if vmax > 0 and grid[i, j] < 0.5 * vmax else "black"
            ax.text(
                j + 0.5,
                i + 0.5,
                f"{grid[i, j]:.3f}{mark}",
                ha="center",
                va="center",
                color=color,
                fontsize=8,
            )
    ax.set_xticks([j + 0.5 for j in range(len(ns))], [str(n) for n in ns])
    ax.set_yticks([i + 0.5 for i in range(len(ms))], [str(m) for m in ms])
    ax.set_xlabel("calibration size n")
    ax.set_ylabel("grid size m")
    ax.set_title("analytic risk of the selected threshold (* = controlled)")
    ax.grid(False)
    fig.colorbar(mesh, ax=ax, label="analytic risk")
    fig.tight_layout()
    return fig


def _correction_rows(spec: FigureSpec):
    if not spec.corrections:
        raise RenderError(f"{spec.kind} needs at least one corrections table")
    rows = []
    for path in spec.corrections:
        rows.extend(schema.read_corrections_csv(path))
    return rows


def _render_bounds_vs_n(spec: FigureSpec):
    rows = _correction_rows(spec)
    many_m = len({r["m"] for r in rows}) > 1
    families: dict[tuple, list] = {}
    for r in rows:
        families.setdefault((r["kind"], r["sigma"], r["m"]), []).append(r)

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    linestyle_of: dict[tuple, str] = {}
    for key, members in families.items():
        kind, sigma, m = key
        members.sort(key=lambda r: r["n"])
        variant = (sigma, m)
        if variant not in linestyle_of:
            linestyle_of[variant] = FAMILY_LINESTYLES[
                len(linestyle_of) % len(FAMILY_LINESTYLES)
            ]
        label = kind
        if sigma is not None:
            label += f", σ={sigma:g}"
        if many_m:
            label += f", m={m}"
        ax.plot(
            [r["n"] for r in members],
            [r["amount"] for r in members],
            marker="o",
            markersize=4,
            color=CORRECTION_COLOR.get(kind, "#666666"),
            linestyle=linestyle_of[variant],
            label=label,
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    _level_lines(ax, spec, orientation="horizontal")
    ax.set_xlabel("calibration size n")
    ax.set_ylabel("correction amount")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_bounds_vs_sigma(spec: FigureSpec):
    rows = [r for r in _correction_rows(spec) if r["sigma"] is not None]
    if not rows:
        raise RenderError("no rows carry a sigma value")
    many_m = len({r["m"] for r in rows}) > 1
    many_n = len({r["n"] for r in rows}) > 1
    families: dict[tuple, list] = {}
    for r in rows:
        families.setdefault((r["kind"], r["n"], r["m"]), []).append(r)

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    linestyle_of: dict[tuple, str] = {}
    for key, members in families.items():
        kind, n, m = key
        members.sort(key=lambda r: r["sigma"])
        variant = (n, m)
        if variant not in linestyle_of:
            linestyle_of[variant] = FAMILY_LINESTYLES[
                len(linestyle_of) % len(FAMILY_LINESTYLES)
            ]
        label = kind
        if many_n:
            label += f", n={n}"
        if many_m:
            label += f", m={m}"
        ax.plot(
            [r["sigma"] for r in members],
            [r["amount"] for r in members],
            marker="o",
            markersize=4,
            color=CORRECTION_COLOR.get(kind, "#666666"),
            linestyle=linestyle_of[variant],
            label=label,
        )
    _level_lines(ax, spec, orientation="horizontal")
    ax.set_xlabel("per-column standard deviation σ")
    ax.set_ylabel("correction amount")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "risk-hist": _render_risk_hist,
    "size-hist": _render_size_hist,
    "risk-curves": _render_risk_curves,
    "phase-heatmap": _render_phase_heatmap,
    "bounds-vs-n": _render_bounds_vs_n,
    "bounds-vs-sigma": _render_bounds_vs_sigma,
}


def render(spec: FigureSpec) -> str:
    """Render one figure and return the written image path.

    Inputs are parsed and validated in full before the figure is created, so
    a schema mismatch or empty table never leaves a partial image behind.
    """
    with matplotlib.rc_context(RC_PARAMS):
        fig = _RENDERERS[spec.kind](spec)
        try:
            if spec.output.endswith(".svg"):
                fig.savefig(spec.output, metadata={"Date": None})
            else:
                fig.savefig(spec.output, metadata={"Software": "crcplots"})
        finally:
            plt.close(fig)
    return spec.output
