"""The single style table: colors, labels, and line styles per method name.

Every figure kind draws from this table, so a method keeps its identity
across histograms, curve overlays, and bound plots.  Unknown method names
fall back to a neutral grey rather than erroring — the file formats allow
labels this table has never heard of.
"""

from typing import NamedTuple


class MethodStyle(NamedTuple):
    color: str
    label: str


METHOD_STYLE: dict[str, MethodStyle] = {
    "crc": MethodStyle("#1f77b4", "CRC"),
    "crc-nm": MethodStyle("#d62728", "CRC-NM"),
    "crc-c": MethodStyle("#9467bd", "CRC-C"),
    "crc-nm-bernstein": MethodStyle("#8c564b", "CRC-NM (Bernstein)"),
    "crc-nm-empbern": MethodStyle("#e377c2", "CRC-NM (emp. Bernstein)"),
    "crc-nm-min": MethodStyle("#17a2b8", "CRC-NM (min)"),
    "loss-mono": MethodStyle("#ff7f0e", "loss monotonization"),
    "risk-mono": MethodStyle("#2ca02c", "risk monotonization"),
    "weighted-crc": MethodStyle("#0f9b8e", "weighted CRC"),
}

FALLBACK_STYLE_COLOR = "#666666"


def method_style(name: str) -> MethodStyle:
    return METHOD_STYLE.get(name, MethodStyle(FALLBACK_STYLE_COLOR, name))


# which curve a method's selection circle sits on, keyed by curve kind
METHOD_CURVE = {
    "loss-mono": "loss-monotonized",
    "risk-mono": "risk-monotonized",
}
DEFAULT_METHOD_CURVE = "empirical"

CURVE_STYLE = {
    "empirical": {"color": "#1f77b4", "linestyle": "-", "label": "empirical risk"},
    "loss-monotonized": {
        "color": "#ff7f0e",
        "linestyle": "--",
        "label": "loss-monotonized risk",
    },
    "risk-monotonized": {
        "color": "#2ca02c",
        "linestyle": "-.",
        "label": "risk-monotonized risk",
    },
    "true": {"color": "#888888", "linestyle": ":", "label": "true risk"},
}

LEVEL_STYLE = {
    "alpha": {"color": "black", "linestyle": "--", "linewidth": 1.0},
    "alpha_prime": {"color": "black", "linestyle": ":", "linewidth": 1.0},
}

CORRECTION_COLOR = {
    "hoeffding": "#1f77b4",
    "bernstein": "#d62728",
    "empirical-bernstein": "#ff7f0e",
    "min-combined": "#2ca02c",
}

# deterministic line-style cycle for families within one correction kind
FAMILY_LINESTYLES = ("-", "--", "-.", ":")

# fixed rendering parameters: identical inputs must give identical bytes
RC_PARAMS = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.5,
    "legend.framealpha": 0.9,
    "svg.hashsalt": "crcplots",
    "path.simplify": False,
}
