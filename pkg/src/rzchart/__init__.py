"""Shewhart-RZ control chart for the ratio of two autocorrelated normal variables.

The process is a bivariate VAR(1); the chart monitors the ratio of subgroup
means against probability limits from a normal approximation to the ratio
distribution.
"""
from .chart import (ChartDesign, RunLengthReport, ShiftSpec, Verdict, arl, classify, design_chart,
                    design_from_cv, earl, non_detection_probability, null_shift)
from .errors import (ApproximationDomainError, ApproximationRangeWarning, ConfigError, DataError,
                     DomainError, EstimationError, RZChartError, StationarityError)
from .estimation import EstimationResult, PhaseISeries, estimate_var1
from .ratio import RatioParams, ratio_cdf, ratio_quantile
from .simulate import SimConfig, draw_subgroup, empirical_run_length, replay_example, shifted_model
from .var1 import (StationaryCov, SubgroupStats, Var1Model, stationary_covariance, subgroup_covariance,
                   subgroup_mean_covariance)

__version__ = "0.1.0"
