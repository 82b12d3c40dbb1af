"""Location-based relay selection over Poisson relay fields."""

from .analytic import (DistParams, PathLossParams, gamma_opt_cdf, gamma_opt_cdf_via_halves,
                       gamma_opt_pdf, truncated_gamma_cdf, truncated_gamma_opt_right_cdf,
                       y_cdf, y_pdf)
from .geometry import (EmptyField, FieldTooSmall, NetworkLayout, PolicyKind, RelayField,
                       SelectionResult, hyperplane_projection_score,
                       midpoint_optimality_certificate, select, selection_score)
from .metrics import (ChannelSpec, Fading, OutageQuery, RateResult, average_rate_analytic,
                      conditional_rate, instantaneous_rate, outage_analytic)
from .montecarlo import (EstimateWithError, TrialRecord, TrialSet, estimate_average_rate,
                         estimate_outage, run_trials)
from .spatialprocess import PppSpec, Region, SeedSpec, sample_ppp

__version__ = "0.1.0"
