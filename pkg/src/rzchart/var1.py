"""Bivariate VAR(1) process: stationary covariance and subgroup-mean statistics.

The observation model is

    W_j = mu + Phi (W_{j-1} - mu) + eps_j,    eps_j ~ N(0, Sigma_eps)

and a chart works with the mean of ``n`` consecutive observations.  All
matrices are 2x2 ``numpy`` arrays; objects are immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RZChartError, StationarityError

STATIONARITY_MARGIN = 1e-9
# direct summation of the matrix power series is used up to this n
DIRECT_SUM_MAX_N = 10_000
CLOSED_FORM_MAX_COND = 1e8
_PSD_CLIP = 1e-12


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.shape != shape:
        raise DomainError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite entries")
    arr.setflags(write=False)
    return arr


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def spectral_radius(phi) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(phi, dtype=float)))))


def check_stationary(phi) -> None:
    rad = spectral_radius(phi)
    if not rad < 1.0 - STATIONARITY_MARGIN:
        raise StationarityError(
            f"transition matrix is not stationary: spectral radius {rad:.12g} >= 1 - {STATIONARITY_MARGIN:g}")


@dataclass(frozen=True, eq=False)
class Var1Model:
    """Process law of the bivariate VAR(1) observations.

    Parameters
    ----------
    mu : (2,) array
        Process means ``(mu_X, mu_Y)``.
    phi : (2, 2) array
        Transition matrix.
    sigma_eps : (2, 2) array
        Innovation covariance, symmetric positive semi-definite.
    """

    mu: np.ndarray
    phi: np.ndarray
    sigma_eps: np.ndarray

    def __post_init__(self):
        mu = _frozen(self.mu, (2,))
        phi = _frozen(self.phi, (2, 2))
        sig = np.array(self.sigma_eps, dtype=float)
        if sig.shape != (2, 2) or not np.all(np.isfinite(sig)):
            raise DomainError("sigma_eps must be a finite 2x2 matrix")
        scale = max(1.0, float(np.max(np.abs(sig))))
        if abs(sig[0, 1] - sig[1, 0]) > 1e-12 * scale:
            raise DomainError("sigma_eps is not symmetric")
        sig = _frozen(_symmetrize(sig), (2, 2))
        if np.min(np.linalg.eigvalsh(sig)) < -1e-12 * scale:
            raise DomainError("sigma_eps is not positive semi-definite")
        if mu[1] == 0.0:
            raise DomainError("mu_Y must be non-zero for the ratio mu_X/mu_Y to exist")
        check_stationary(phi)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "sigma_eps", sig)

    @property
    def z(self) -> float:
        return float(self.mu[0] / self.mu[1])

    @property
    def is_diagonal(self) -> bool:
        return self.phi[0, 1] == 0.0 and self.phi[1, 0] == 0.0

    @classmethod
    def from_stationary(cls, mu, phi, sigma_w) -> "Var1Model":
        """Build the model whose stationary covariance is ``sigma_w``.

        The innovation covariance is recovered from the Stein equation,
        ``Sigma_eps = Sigma_W - Phi Sigma_W Phi^T``; a ``DomainError`` is
        raised when that matrix is not PSD (no VAR(1) with this ``phi`` has
        the requested stationary law).
        """
        phi = np.asarray(phi, dtype=float)
        sigma_w = np.asarray(sigma_w, dtype=float)
        return cls(mu, phi, _symmetrize(sigma_w - phi @ sigma_w @ phi.T))

    @classmethod
    def from_cv(cls, gamma_x, gamma_y, rho, phi, z0=1.0, mu_y=1.0) -> "Var1Model":
        """Model with given coefficients of variation, correlation and mean ratio."""
        return cls.from_stationary(*_cv_to_stationary(gamma_x, gamma_y, rho, phi, z0, mu_y))


def _cv_to_stationary(gamma_x, gamma_y, rho, phi, z0, mu_y):
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")
    if gamma_x <= 0 or gamma_y <= 0:
        raise DomainError("coefficients of variation must be positive")
    mu = np.array([z0 * mu_y, mu_y], dtype=float)
    sx, sy = gamma_x * abs(mu[0]), gamma_y * abs(mu[1])
    sigma_w = np.array([[sx * sx, rho * sx * sy], [rho * sx * sy, sy * sy]])
    return mu, np.asarray(phi, dtype=float), sigma_w


@dataclass(frozen=True, eq=False)
class StationaryCov:
    """Stationary covariance ``Sigma_W`` of a single observation."""

    sigma_w: np.ndarray

    @property
    def rho(self) -> float:
        s = self.sigma_w
        return float(s[0, 1] / np.sqrt(s[0, 0] * s[1, 1]))


@dataclass(frozen=True, eq=False)
class SubgroupStats:
    """Moments of the subgroup-mean vector and the ratio parameters they imply.

    ``phi`` and ``sigma_w`` are kept so that the statistics can be recomputed
    under a different correlation (see ``with_correlation``).
    """

    n: int
    mu: np.ndarray
    phi: np.ndarray
    sigma_w: np.ndarray
    sigma_wbar: np.ndarray
    gamma_xbar: float
    gamma_ybar: float
    rho_bar: float
    omega_bar: float
    z: float

    def with_correlation(self, rho: float) -> "SubgroupStats":
        """Statistics for the same process with the observation-level correlation set to ``rho``."""
        if not -1.0 < rho < 1.0:
            raise DomainError(f"rho must lie in (-1, 1), got {rho}")
        s = self.sigma_w
        cross = rho * np.sqrt(s[0, 0] * s[1, 1])
        sigma_w = np.array([[s[0, 0], cross], [cross, s[1, 1]]])
        return subgroup_stats(self.mu, self.phi, sigma_w, self.n)


def kron_inverse_closed_form(phi) -> np.ndarray:
    """``(I4 - Phi kron Phi)^-1`` from the cofactor expressions ``Delta_ij / Delta``."""
    p = np.asarray(phi, dtype=float)
    a, b, c, d = p[0, 0], p[0, 1], p[1, 0], p[1, 1]
    det = a * d - b * c
    delta = (det - 1.0) * (a * a * d * d - 2 * a * b * c * d + b * b * c * c
                           - a * a - 2 * b * c - d * d + 1.0)
    if delta == 0.0:
        raise StationarityError("I4 - Phi kron Phi is singular")
    m = np.empty((4, 4))
    m[0, 0] = -(a * d ** 3 - b * c * d * d - a * d - b * c - d * d + 1.0)
    m[0, 1] = m[0, 2] = b * (a * d * d - b * c * d - a)
    m[0, 3] = -b * b * (det + 1.0)
    m[1, 0] = c * (a * d * d - b * c * d - a)
    m[1, 1] = -(a * a * d * d - a * b * c * d - a * a - b * c - d * d + 1.0)
    m[1, 2] = -c * b * (det + 1.0)
    m[1, 3] = b * (a * a * d - a * b * c - d)
    m[2, 0], m[2, 1], m[2, 2], m[2, 3] = m[1, 0], m[1, 2], m[1, 1], m[1, 3]
    m[3, 0] = -c * c * (det + 1.0)
    m[3, 1] = m[3, 2] = c * (a * a * d - a * b * c - d)
    m[3, 3] = -(a ** 3 * d - a * a * b * c - a * a - a * d - b * c + 1.0)
    return m / delta


def _vec(m: np.ndarray) -> np.ndarray:
    return m.reshape(-1, order="F")


def _unvec(v: np.ndarray) -> np.ndarray:
    return v.reshape(2, 2, order="F")


def stationary_covariance(model: Var1Model, method: str = "solve",
                          cross_check: bool = False, tol: float = 1e-10) -> StationaryCov:
    """Solve ``Sigma_W = Phi Sigma_W Phi^T + Sigma_eps``.

    ``method="solve"`` uses the 4x4 linear system on ``vec(Sigma_W)``;
    ``method="closed_form"`` uses the explicit cofactor inverse.  With
    ``cross_check=True`` both are computed and must agree to ``tol``
    (relative to the largest entry).
    """
    phi = model.phi
    rhs = _vec(model.sigma_eps)
    if method not in ("solve", "closed_form"):
        raise ValueError(f"unknown method {method!r}")

    def by_solve():
        try:
            return _unvec(np.linalg.solve(np.eye(4) - np.kron(phi, phi), rhs))
        except np.linalg.LinAlgError as exc:
            raise StationarityError("I4 - Phi kron Phi is singular") from exc

    def by_closed_form():
        return _unvec(kron_inverse_closed_form(phi) @ rhs)

    sigma_w = by_solve() if method == "solve" else by_closed_form()
    if cross_check:
        other = by_closed_form() if method == "solve" else by_solve()
        scale = max(1.0, float(np.max(np.abs(sigma_w))))
        if np.max(np.abs(sigma_w - other)) > tol * scale:
            raise RZChartError("closed-form and linear-solve stationary covariances disagree")
    sigma_w = _symmetrize(sigma_w)
    sigma_w.setflags(write=False)
    return StationaryCov(sigma_w)


def matrix_power_sums(phi, n: int, cross_check: bool = False, tol: float = 1e-10):
    """Return ``(Lambda, Pi)`` with ``Lambda = sum_{k=1}^{n-1} Phi^k`` and
    ``Pi = sum_{k=1}^{n-1} k Phi^k``.

    Direct summation is exact and handles singular ``phi``; the geometric
    closed forms are used only for very large ``n`` or as a cross-check.
    """
    phi = np.asarray(phi, dtype=float)
    n = _check_n(n)
    check_stationary(phi)
    if n > DIRECT_SUM_MAX_N:
        closed = matrix_power_sums_closed_form(phi, n)
        if closed is None:
            raise DomainError("closed form unavailable for singular or ill-conditioned phi at large n")
        return closed
    lam = np.zeros((2, 2))
    pi = np.zeros((2, 2))
    power = np.eye(2)
    for k in range(1, n):
        power = power @ phi
        lam += power
        pi += k * power
    if cross_check:
        closed = matrix_power_sums_closed_form(phi, n)
        if closed is not None:
            for direct, cf in zip((lam, pi), closed):
                scale = max(1.0, float(np.max(np.abs(direct))))
                if np.max(np.abs(direct - cf)) > tol * scale:
                    raise RZChartError("closed-form and direct matrix power sums disagree")
    return lam, pi


def matrix_power_sums_closed_form(phi, n: int):
    """Geometric closed forms for ``(Lambda, Pi)``; ``None`` if ``Phi`` or
    ``I - Phi`` is too ill-conditioned for the inverses involved."""
    phi = np.asarray(phi, dtype=float)
    eye = np.eye(2)
    if np.linalg.cond(phi) >= CLOSED_FORM_MAX_COND or np.linalg.cond(eye - phi) >= CLOSED_FORM_MAX_COND:
        return None
    inv_i_minus = np.linalg.inv(eye - phi)
    phi_n1 = np.linalg.matrix_power(phi, n - 1)
    lam = (phi - phi_n1 @ phi) @ inv_i_minus
    lead = np.linalg.inv(np.linalg.inv(phi) - eye)
    pi = lead @ ((eye - phi_n1) @ inv_i_minus - (n - 1) * phi_n1)
    return lam, pi


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"subgroup size must be an integer >= 1, got {n}")
    return int(n)


def _psd_repair(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if vals.min() >= 0.0:
        return m
    if vals.min() < -_PSD_CLIP * scale:
        raise DomainError("subgroup-mean covariance is not positive semi-definite")
    vals = np.clip(vals, 0.0, None)
    return _symmetrize(vecs @ np.diag(vals) @ vecs.T)


def subgroup_mean_covariance(phi, sigma_w, n: int) -> np.ndarray:
    """Covariance of the mean of ``n`` consecutive stationary observations.

    ``(1/n) [Sigma_W (I + Lambda(Phi^T) - Pi(Phi^T)/n) + (Lambda(Phi) - Pi(Phi)/n) Sigma_W^T]``;
    ``Sigma_W`` is symmetric, so its transpose is itself.
    """
    n = _check_n(n)
    phi = np.asarray(phi, dtype=float)
    sigma_w = np.asarray(sigma_w, dtype=float)
    lam, pi = matrix_power_sums(phi, n)
    left = sigma_w @ (np.eye(2) + lam.T - pi.T / n)
    right = (lam - pi / n) @ sigma_w
    return _psd_repair(_symmetrize((left + right) / n))


def diagonal_subgroup_covariance(sigma_w, phi11: float, phi22: float, n: int) -> np.ndarray:
    """Closed form of the subgroup-mean covariance when ``Phi`` is diagonal."""
    n = _check_n(n)
    f1 = autocorrelation_factor(phi11, n)
    f2 = autocorrelation_factor(phi22, n)
    f12 = 0.5 * (f1 + f2)
    s = np.asarray(sigma_w, dtype=float)
    xi12 = s[0, 1] / n * f12
    return np.array([[s[0, 0] / n * f1, xi12], [xi12, s[1, 1] / n * f2]])


def autocorrelation_factor(phi_ii: float, n: int) -> float:
    """``1 + (2/n) sum_{k=1}^{n-1} (n-k) phi^k``: variance inflation of a univariate AR(1) mean."""
    return 1.0 + 2.0 / n * sum((n - k) * phi_ii ** k for k in range(1, n))


def subgroup_stats(mu, phi, sigma_w, n: int) -> SubgroupStats:
    """Derived ratio parameters of the subgroup mean for a stationary law."""
    mu = np.asarray(mu, dtype=float)
    if mu[0] <= 0 or mu[1] <= 0:
        raise DomainError("ratio charts require positive process means")
    phi = np.asarray(phi, dtype=float)
    sigma_w = np.asarray(sigma_w, dtype=float)
    n = _check_n(n)
    swbar = sigma_w.copy() if n == 1 else subgroup_mean_covariance(phi, sigma_w, n)
    sx, sy = np.sqrt(swbar[0, 0]), np.sqrt(swbar[1, 1])
    if sx <= 0 or sy <= 0:
        raise DomainError("subgroup-mean variances must be positive")
    gx = float(sx / mu[0])
    gy = float(sy / mu[1])
    z = float(mu[0] / mu[1])
    rho_bar = float(swbar[0, 1] / (sx * sy))
    for arr in (mu, phi, sigma_w, swbar):
        arr.setflags(write=False)
    return SubgroupStats(n=n, mu=mu, phi=phi, sigma_w=sigma_w, sigma_wbar=swbar,
                         gamma_xbar=gx, gamma_ybar=gy, rho_bar=rho_bar,
                         omega_bar=gx / gy * z, z=z)


def subgroup_covariance(model: Var1Model, cov: StationaryCov | None = None, n: int = 1) -> SubgroupStats:
    """Subgroup statistics for ``model`` (``cov`` is computed if not given)."""
    if cov is None:
        cov = stationary_covariance(model)
    return subgroup_stats(model.mu, model.phi, cov.sigma_w, n)


def cv_subgroup_stats(gamma_x, gamma_y, rho, phi, n: int, z0: float = 1.0, mu_y: float = 1.0) -> SubgroupStats:
    """Subgroup statistics from the direct parameterisation (CVs, correlation, ``Phi``).

    Unlike ``Var1Model.from_cv`` this does not require the implied innovation
    covariance to be PSD, so every cell of a design grid can be evaluated.
    """
    mu, phi, sigma_w = _cv_to_stationary(gamma_x, gamma_y, rho, phi, z0, mu_y)
    check_stationary(phi)
    return subgroup_stats(mu, phi, sigma_w, n)
