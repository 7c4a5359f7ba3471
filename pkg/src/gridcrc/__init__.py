"""Conformal risk control over finite threshold grids.

The package calibrates a threshold (grid index) from bounded losses so that
expected test loss stays at or below a target level, including when the loss
is not monotone in the threshold.  It provides:

* ``core`` — grids, loss matrices, risk curves, the augmented and plain
  threshold scans, and monotonization transforms;
* ``corrections`` — finite-sample excess-risk corrections (Hoeffding,
  Bernstein, empirical Bernstein, their pointwise minimum) and a bootstrap
  stability estimate;
* ``selectors`` — named end-to-end selection methods built from the two;
* ``generators`` — seeded synthetic loss-matrix generators with analytic
  risk curves where available;
* ``harness`` — seeded Monte Carlo experiment runner and diagnostic probes;
* ``fileio``/``cli`` — frozen CSV/JSON wire formats and the command-line
  front end.
"""

from gridcrc.core import (
    Grid,
    InvalidInputError,
    LossMatrix,
    RiskCurve,
    Selection,
    crc_scan,
    empirical_risk,
    grid_oracle,
    loss_monotonize,
    plain_scan,
    risk_monotonize,
)
from gridcrc.corrections import (
    CorrectionSpec,
    CorrectionValue,
    bernstein_correction,
    bootstrap_stability,
    empirical_bernstein_correction,
    empirical_sigma_max,
    hoeffding_correction,
    min_combined_correction,
)
from gridcrc.selectors import (
    METHOD_NAMES,
    ConfigurationError,
    MethodConfig,
    WeightVector,
    crc_nm_adjusted_level,
    select,
    weighted_select,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "LossMatrix",
    "RiskCurve",
    "Selection",
    "InvalidInputError",
    "empirical_risk",
    "crc_scan",
    "plain_scan",
    "loss_monotonize",
    "risk_monotonize",
    "grid_oracle",
    "CorrectionSpec",
    "CorrectionValue",
    "hoeffding_correction",
    "bernstein_correction",
    "empirical_bernstein_correction",
    "empirical_sigma_max",
    "min_combined_correction",
    "bootstrap_stability",
    "METHOD_NAMES",
    "MethodConfig",
    "WeightVector",
    "ConfigurationError",
    "select",
    "weighted_select",
    "crc_nm_adjusted_level",
    "__version__",
]
