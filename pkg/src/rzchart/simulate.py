"""Monte Carlo generation of autocorrelated subgroups and empirical run lengths.

Every replication gets its own ``PCG64`` stream spawned from the master seed
via ``numpy.random.SeedSequence``, so a replication's run length depends only
on ``(seed, replication index)``.  That makes serial and parallel runs
bitwise identical and lets the block size change without changing results.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .chart import ChartDesign, RunLengthReport, ShiftSpec, Verdict, classify, design_chart
from .errors import DataError, DomainError
from .scenarios import FOOD_ALPHA, FOOD_N, food_model
from .var1 import Var1Model, stationary_covariance

RNG_NAME = "numpy.random.Generator(PCG64)"
NORMAL_METHOD = "ziggurat (Generator.standard_normal)"
DEFAULT_MAX_RUN_LENGTH = 10 ** 6
DEFAULT_BLOCK = 256

FIXTURE_SUBGROUPS = "muesli_subgroups.csv"
FIXTURE_PUBLISHED = "muesli_published.csv"
FIXTURE_SHA256 = "2f750b943733ad267e074c6719fdb8cb249013dd9795bf4480f03d74f2e22504"


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Monte Carlo settings.

    ``model`` is the process that generates the data (already shifted when
    out-of-control performance is wanted, see ``shifted_model``).
    """

    model: Var1Model
    n: int
    seed: int
    replications: int
    max_run_length: int = DEFAULT_MAX_RUN_LENGTH
    block: int = DEFAULT_BLOCK

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"subgroup size must be an integer >= 1, got {self.n}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")
        if int(self.max_run_length) != self.max_run_length or self.max_run_length < 1:
            raise DomainError(f"max_run_length must be >= 1, got {self.max_run_length}")
        if self.block < 1:
            raise DomainError(f"block must be >= 1, got {self.block}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def symmetric_sqrt(m) -> np.ndarray:
    """Symmetric PSD square root via the eigendecomposition (works for singular ``m``)."""
    vals, vecs = np.linalg.eigh(np.asarray(m, dtype=float))
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


class SubgroupSampler:
    """Draws independent subgroups of ``n`` consecutive VAR(1) observations.

    Each subgroup starts from the stationary law ``N(mu, Sigma_W)`` and runs
    the recursion for the remaining ``n - 1`` steps.
    """

    def __init__(self, model: Var1Model, n: int):
        self.n = int(n)
        self.mu = np.asarray(model.mu)
        self.phi_t = np.asarray(model.phi).T
        self.root_w = symmetric_sqrt(stationary_covariance(model).sigma_w)
        self.root_eps = symmetric_sqrt(model.sigma_eps)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Return ``count`` subgroups as an array of shape ``(count, n, 2)``."""
        z = rng.standard_normal((count, self.n, 2))
        out = np.empty_like(z)
        dev = z[:, 0] @ self.root_w
        out[:, 0] = dev
        for j in range(1, self.n):
            dev = dev @ self.phi_t + z[:, j] @ self.root_eps
            out[:, j] = dev
        return out + self.mu


def draw_subgroup(model: Var1Model, n: int, rng: np.random.Generator) -> np.ndarray:
    """One subgroup of shape ``(n, 2)``; ``rng`` is advanced in place."""
    return SubgroupSampler(model, n).draw(rng, 1)[0]


def replication_seeds(seed: int, replications: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(int(seed)).spawn(int(replications))


def subgroup_ratios(groups: np.ndarray) -> np.ndarray:
    """``Zbar_i = sum_j X_ij / sum_j Y_ij`` for an array of shape ``(m, n, 2)``."""
    return groups[..., 0].sum(axis=-1) / groups[..., 1].sum(axis=-1)


def _run_one(sampler: SubgroupSampler, lcl: float, ucl: float, seq, cap: int, block: int):
    rng = np.random.Generator(np.random.PCG64(seq))
    count = 0
    while count < cap:
        m = min(block, cap - count)
        z = subgroup_ratios(sampler.draw(rng, m))
        hits = np.flatnonzero((z < lcl) | (z > ucl))
        if hits.size:
            return count + int(hits[0]) + 1, False
        count += m
    return cap, True


def _run_chunk(args):
    sampler, lcl, ucl, seqs, cap, block = args
    return [_run_one(sampler, lcl, ucl, s, cap, block) for s in seqs]


def simulate_run_lengths(design: ChartDesign, config: SimConfig, workers: int = 1):
    """Per-replication run lengths and censoring flags, in replication order."""
    if config.n != design.n:
        raise DomainError(f"simulation subgroup size {config.n} differs from the design's n={design.n}")
    sampler = SubgroupSampler(config.model, config.n)
    seqs = replication_seeds(config.seed, config.replications)
    if workers <= 1 or config.replications < 2 * workers:
        results = _run_chunk((sampler, design.lcl, design.ucl, seqs, config.max_run_length, config.block))
    else:
        size = math.ceil(len(seqs) / (4 * workers))
        chunks = [(sampler, design.lcl, design.ucl, seqs[i:i + size], config.max_run_length, config.block)
                  for i in range(0, len(seqs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    lengths = np.array([r[0] for r in results], dtype=np.int64)
    censored = np.array([r[1] for r in results], dtype=bool)
    return lengths, censored


def rng_metadata(config: SimConfig) -> dict:
    return {
        "rng": RNG_NAME,
        "normal_method": NORMAL_METHOD,
        "numpy_version": np.__version__,
        "seed": int(config.seed),
        "seed_derivation": "SeedSequence(seed).spawn(replications)",
        "replications": int(config.replications),
        "max_run_length": int(config.max_run_length),
        "n": int(config.n),
    }


def empirical_run_length(design: ChartDesign, config: SimConfig, workers: int = 1) -> RunLengthReport:
    """Mean run length of the chart on data generated from ``config.model``.

    Censored replications (no signal before ``max_run_length``) enter the mean
    at the cap, so any censoring makes the mean a lower bound; the report
    flags that case.
    """
    lengths, censored = simulate_run_lengths(design, config, workers)
    mean = float(lengths.mean())
    stderr = float(lengths.std(ddof=1) / math.sqrt(len(lengths))) if len(lengths) > 1 else math.nan
    n_cens = int(censored.sum())
    return RunLengthReport(beta=1.0 - 1.0 / mean, arl=mean, kind="empirical", stderr=stderr,
                           replications=int(config.replications), censored=n_cens,
                           lower_bound=n_cens > 0, metadata=rng_metadata(config))


def shifted_model(model: Var1Model, shift: ShiftSpec) -> Var1Model:
    """Process after a shift of the mean ratio by ``tau`` and of the correlation to ``rho1``.

    With ``D = diag(tau, 1)`` the shifted process is ``D W`` where ``W`` has the
    original autoregression and the correlation replaced by ``rho1``: the
    coefficients of variation and the autocorrelation of each component are
    unchanged, which is the out-of-control law used by the analytic ARL.
    """
    sw = np.array(stationary_covariance(model).sigma_w)
    cross = shift.rho1 * math.sqrt(sw[0, 0] * sw[1, 1])
    sw[0, 1] = sw[1, 0] = cross
    d = np.diag([shift.tau, 1.0])
    d_inv = np.diag([1.0 / shift.tau, 1.0])
    mu = d @ model.mu
    phi = d @ model.phi @ d_inv
    return Var1Model.from_stationary(mu, phi, d @ sw @ d)


@dataclass(frozen=True, eq=False)
class ReplayRow:
    sample: int
    x: np.ndarray
    y: np.ndarray
    xbar: float
    ybar: float
    zbar: float
    verdict: Verdict
    published_zbar: str
    published_xbar: str
    published_ybar: str


def _fixture_text(name: str) -> bytes:
    return resources.files("rzchart").joinpath("data").joinpath(name).read_bytes()


def load_food_fixture():
    """Raw subgroups ``(samples, data)`` and the printed summaries of the food example.

    Raises
    ------
    DataError
        If the packaged fixture has been altered or is structurally wrong.
    """
    from .io import parse_subgroups_csv, read_csv_records

    raw = _fixture_text(FIXTURE_SUBGROUPS)
    if hashlib.sha256(raw).hexdigest() != FIXTURE_SHA256:
        raise DataError(f"fixture {FIXTURE_SUBGROUPS} failed its integrity check (checksum mismatch)")
    samples, data = parse_subgroups_csv(raw.decode())
    if len(samples) != 15 or data.shape != (15, 5, 2):
        raise DataError(f"fixture {FIXTURE_SUBGROUPS} must hold 15 subgroups of 5, got {data.shape}")
    published = read_csv_records(_fixture_text(FIXTURE_PUBLISHED).decode())
    if [int(r["sample"]) for r in published] != samples:
        raise DataError(f"fixture {FIXTURE_PUBLISHED} does not list the same samples")
    return samples, data, published


def replay_example(design: ChartDesign | None = None) -> list[ReplayRow]:
    """Re-run the food-line monitoring example on the packaged data."""
    if design is None:
        design = design_chart(food_model(), FOOD_N, alpha=FOOD_ALPHA)
    samples, data, published = load_food_fixture()
    rows = []
    for s, g, pub in zip(samples, data, published):
        xbar, ybar = float(g[:, 0].mean()), float(g[:, 1].mean())
        zbar = float(subgroup_ratios(g))
        rows.append(ReplayRow(sample=s, x=g[:, 0], y=g[:, 1], xbar=xbar, ybar=ybar, zbar=zbar,
                              verdict=classify(design, zbar), published_zbar=pub["zbar"],
                              published_xbar=pub["xbar"], published_ybar=pub["ybar"]))
    return rows
