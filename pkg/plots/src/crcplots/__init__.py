"""Figure rendering for gridcrc experiment artifacts.

This package consumes the producer's frozen CSV/JSON file formats and turns
them into figures.  It never recomputes statistics: every plotted number is
read from a file by a schema-only parser; the only numerics added here are
axis scaling and histogram binning.
"""

from crcplots.figures import FIGURE_KINDS, FigureSpec, RenderError, render
from crcplots.schema import (
    SchemaError,
    read_corrections_csv,
    read_curve_csv,
    read_phase_csv,
    read_results_csv,
    read_selection_json,
    read_summary_json,
)

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderError",
    "SchemaError",
    "render",
    "read_corrections_csv",
    "read_curve_csv",
    "read_phase_csv",
    "read_results_csv",
    "read_selection_json",
    "read_summary_json",
    "__version__",
]
