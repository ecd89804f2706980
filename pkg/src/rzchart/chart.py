"""Shewhart-RZ chart: probability limits and analytic run-length performance."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError
from .ratio import RatioParams, ratio_cdf, ratio_quantile
from .var1 import SubgroupStats, Var1Model, cv_subgroup_stats, subgroup_covariance

BETA_SATURATION = 1e-15
EARL_GRID_STEP = 0.01
EARL_QUADRATURE_ORDER = 64


class Verdict(str, Enum):
    IN_CONTROL = "in_control"
    OUT_OF_CONTROL = "out_of_control"


def arl0_from_alpha(alpha: float) -> float:
    return 1.0 / alpha


def alpha_from_arl0(arl0: float) -> float:
    if not arl0 > 1.0:
        raise DomainError(f"in-control ARL must exceed 1, got {arl0}")
    return 1.0 / arl0


def resolve_alpha(alpha: float | None = None, arl0: float | None = None) -> float:
    """Accept exactly one of ``alpha`` / ``arl0``."""
    if (alpha is None) == (arl0 is None):
        raise DomainError("give exactly one of alpha or arl0")
    if alpha is None:
        alpha = alpha_from_arl0(arl0)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def ratio_params(stats: SubgroupStats) -> RatioParams:
    return RatioParams(stats.gamma_xbar, stats.gamma_ybar, stats.omega_bar, stats.rho_bar)


@dataclass(frozen=True, eq=False)
class ChartDesign:
    lcl: float
    ucl: float
    alpha: float
    n: int
    z0: float
    rho0: float
    in_control_stats: SubgroupStats

    @property
    def arl0(self) -> float:
        return arl0_from_alpha(self.alpha)

    @property
    def params(self) -> RatioParams:
        return ratio_params(self.in_control_stats)


@dataclass(frozen=True)
class ShiftSpec:
    """Out-of-control condition: ratio ``z1 = tau * z0`` and correlation ``rho1``."""

    tau: float
    rho1: float

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be positive, got {self.tau}")
        if not -1.0 < self.rho1 < 1.0:
            raise DomainError(f"rho1 must lie in (-1, 1), got {self.rho1}")


@dataclass(frozen=True)
class RunLengthReport:
    """Run-length summary; ``kind`` is ``"analytic"`` or ``"empirical"``.

    For empirical reports ``arl`` is the sample mean run length and ``beta``
    the implied non-detection probability ``1 - 1/arl``.  ``saturated`` marks
    an analytic beta that rounds to 1 (infinite ARL); ``lower_bound`` marks
    an empirical mean where every replication hit the run-length cap.
    """

    beta: float
    arl: float
    kind: str
    saturated: bool = False
    stderr: float | None = None
    replications: int | None = None
    censored: int = 0
    lower_bound: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def mean(self) -> float:
        return self.arl


def design_from_stats(stats: SubgroupStats, alpha: float) -> ChartDesign:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    params = ratio_params(stats)
    lcl = ratio_quantile(alpha / 2.0, params)
    ucl = ratio_quantile(1.0 - alpha / 2.0, params)
    s = stats.sigma_w
    rho0 = float(s[0, 1] / math.sqrt(s[0, 0] * s[1, 1]))
    return ChartDesign(lcl=lcl, ucl=ucl, alpha=float(alpha), n=stats.n, z0=stats.z,
                       rho0=rho0, in_control_stats=stats)


def design_chart(model: Var1Model, n: int, alpha: float | None = None,
                 arl0: float | None = None) -> ChartDesign:
    """Probability limits for subgroups of size ``n`` drawn from ``model``."""
    return design_from_stats(subgroup_covariance(model, n=n), resolve_alpha(alpha, arl0))


def design_from_cv(gamma_x: float, gamma_y: float, rho0: float, phi, n: int,
                   alpha: float | None = None, arl0: float | None = None,
                   z0: float = 1.0) -> ChartDesign:
    """Design from the direct parameterisation used in design tables."""
    stats = cv_subgroup_stats(gamma_x, gamma_y, rho0, phi, n, z0=z0)
    return design_from_stats(stats, resolve_alpha(alpha, arl0))


def out_of_control_params(design: ChartDesign, shift: ShiftSpec) -> RatioParams:
    """Ratio parameters after the shift.

    The subgroup CVs stay at their in-control values; only the mean ratio and
    the correlation move, and the subgroup correlation is recomputed from
    ``rho1`` with the autocorrelation structure unchanged.
    """
    ic = design.in_control_stats
    if shift.rho1 == design.rho0:
        rho_bar = ic.rho_bar
    else:
        rho_bar = ic.with_correlation(shift.rho1).rho_bar
    z1 = shift.tau * design.z0
    return RatioParams(ic.gamma_xbar, ic.gamma_ybar, ic.gamma_xbar / ic.gamma_ybar * z1, rho_bar)


def null_shift(design: ChartDesign) -> ShiftSpec:
    return ShiftSpec(tau=1.0, rho1=design.rho0)


def non_detection_probability(design: ChartDesign, shift: ShiftSpec) -> float:
    params = out_of_control_params(design, shift)
    return ratio_cdf(design.ucl, params) - ratio_cdf(design.lcl, params)


def arl(design: ChartDesign, shift: ShiftSpec) -> RunLengthReport:
    beta = non_detection_probability(design, shift)
    if beta >= 1.0 - BETA_SATURATION:
        return RunLengthReport(beta=beta, arl=math.inf, kind="analytic", saturated=True)
    return RunLengthReport(beta=beta, arl=1.0 / (1.0 - beta), kind="analytic")


def tau_grid(interval, closed=(True, True), step: float = EARL_GRID_STEP) -> np.ndarray:
    """Lattice ``a, a+step, ...`` of shift sizes inside the interval.

    An endpoint is kept only if that side is closed (and, for ``b``, only if
    it lies on the lattice), so ``[0.9, 1)`` yields exactly 0.90..0.99 and
    ``(1, 1.1]`` yields 1.01..1.10.
    """
    a, b = map(float, interval)
    if not 0.0 < a <= b:
        raise DomainError(f"shift interval must satisfy 0 < a <= b, got {interval}")
    count = int(math.floor((b - a) / step + 1e-9))
    pts = [round(a + k * step, 12) for k in range(count + 1)]
    if not closed[0]:
        pts = pts[1:]
    if not closed[1]:
        pts = [t for t in pts if t < b - 1e-12]
    if not pts:
        raise DomainError(f"no grid points of step {step} inside {interval}")
    return np.array(pts)


def earl(design: ChartDesign, interval, rho1: float | None = None, closed=(True, True),
         method: str = "grid", step: float = EARL_GRID_STEP,
         order: int = EARL_QUADRATURE_ORDER) -> float:
    """Expected ARL for a shift size uniformly distributed on ``interval``.

    ``method="grid"`` averages the ARL over the equally spaced shift sizes of
    ``tau_grid`` (``closed`` decides whether each endpoint is included).
    ``method="quadrature"`` integrates the ARL against the continuous uniform
    density with Gauss-Legendre of the given order; endpoints are then
    immaterial.
    """
    if rho1 is None:
        rho1 = design.rho0
    a, b = map(float, interval)
    if method == "grid":
        taus = tau_grid((a, b), closed, step)
        weights = np.full(len(taus), 1.0 / len(taus))
    elif method == "quadrature":
        if not 0.0 < a < b:
            raise DomainError(f"shift interval must satisfy 0 < a < b, got {interval}")
        nodes, w = np.polynomial.legendre.leggauss(order)
        taus = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        weights = 0.5 * w
    else:
        raise ValueError(f"unknown EARL method {method!r}")
    total = 0.0
    for t, wt in zip(taus, weights):
        total += wt * arl(design, ShiftSpec(float(t), rho1)).arl
    return float(total)


def classify(design: ChartDesign, zbar: float) -> Verdict:
    """Signal iff the statistic falls strictly outside ``[LCL, UCL]``."""
    if zbar < design.lcl or zbar > design.ucl:
        return Verdict.OUT_OF_CONTROL
    return Verdict.IN_CONTROL
