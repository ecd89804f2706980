"""Approximate distribution of the ratio ``Z = X / Y`` of correlated normals.

Parameterised by the coefficients of variation of numerator and
denominator, the standard-deviation ratio ``omega = sigma_X / sigma_Y`` and
the correlation ``rho``.  The quantile function is the root of a quadratic in
``z`` (Geary-Hinkley transform); the CDF is its exact algebraic inverse.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ApproximationDomainError, ApproximationRangeWarning, DomainError

CV_VALIDITY_MAX = 0.2


@dataclass(frozen=True)
class RatioParams:
    gamma_x: float
    gamma_y: float
    omega: float
    rho: float

    def __post_init__(self):
        for name in ("gamma_x", "gamma_y", "omega"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not -1.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (-1, 1), got {self.rho}")
        if not self.in_validity_range:
            warnings.warn(
                f"coefficient of variation above {CV_VALIDITY_MAX} "
                f"(gamma_x={self.gamma_x:.4g}, gamma_y={self.gamma_y:.4g}); "
                "ratio quantile approximation may be inaccurate",
                ApproximationRangeWarning, stacklevel=3)

    @property
    def in_validity_range(self) -> bool:
        return self.gamma_x <= CV_VALIDITY_MAX and self.gamma_y <= CV_VALIDITY_MAX

    @property
    def median(self) -> float:
        """Point where the two quadratic branches meet; equals ``mu_X / mu_Y``."""
        return self.omega * self.gamma_y / self.gamma_x


def standard_normal_cdf(x):
    return ndtr(x)


def standard_normal_quantile(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    out = ndtri(arr)
    return float(out) if out.ndim == 0 else out


def ratio_quantile(p: float, params: RatioParams) -> float:
    """Approximate ``F_Z^{-1}(p)``.

    Raises
    ------
    ApproximationDomainError
        If ``Phi^{-1}(p)^2 >= 1/gamma_Y^2``: the quadratic then has no
        admissible root (only reachable far in the tails for large ``gamma_Y``).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    gx, gy, w, r = params.gamma_x, params.gamma_y, params.omega, params.rho
    q2 = float(ndtri(p)) ** 2
    c1 = 1.0 / gy ** 2 - q2
    if c1 <= 0.0:
        raise ApproximationDomainError(
            f"tail probability p={p:g} is beyond the approximation's range for gamma_y={gy:g} "
            f"(requires Phi^-1(p)^2 < 1/gamma_y^2 = {1.0 / gy ** 2:g})")
    c2 = 2.0 * w * (r * q2 - 1.0 / (gx * gy))
    c3 = w * w * (1.0 / gx ** 2 - q2)
    # c2^2 - 4 c1 c3 expanded so the 1/(gx gy)^2 terms cancel symbolically;
    # the textbook form loses about eight digits near p = 1/2.
    bracket = 1.0 / gx ** 2 - 2.0 * r / (gx * gy) + 1.0 / gy ** 2 - q2 * (1.0 - r * r)
    root = 2.0 * w * math.sqrt(q2 * max(bracket, 0.0))
    if p <= 0.5:
        # smaller root via the product of roots c3/c1 (no subtractive cancellation)
        den = -c2 + root
        if den > 0.0:
            return 2.0 * c3 / den
        return (-c2 - root) / (2.0 * c1)
    return (-c2 + root) / (2.0 * c1)


def ratio_cdf(z, params: RatioParams):
    """Approximate ``F_Z(z)``; scalar or array input."""
    gx, gy, w, r = params.gamma_x, params.gamma_y, params.omega, params.rho
    z = np.asarray(z, dtype=float)
    # the numerator of the squared transform is the square of z/gy - w/gx,
    # whose sign is that of z - median; taking the root directly avoids
    # cancellation near the median
    den = z * z - 2.0 * r * w * z + w * w
    q = np.sign(z - params.median) * np.abs(z / gy - w / gx) / np.sqrt(den)
    out = ndtr(q)
    return float(out) if out.ndim == 0 else out
