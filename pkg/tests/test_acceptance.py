"""Acceptance criteria, one check per criterion.

Each ``check_*`` returns ``(passed, detail)``.  Under pytest every criterion
is a test and a one-line PASS/FAIL summary per criterion is printed at the end
of the session (see ``conftest.py``); run this file directly with
``python3 tests/test_acceptance.py`` to get the same lines without pytest.

Criterion 1 asks for the limits grid at Phi = diag(0.1, 0.1).  The reference
values are reproduced only at Phi = diag(0.2, 0.2) (all 100 cells within
5e-5); the check is kept at the stated Phi and is expected to fail.  The
companion line shows the Phi = 0.2 comparison.
"""
import csv
import math
import os
import sys
import time
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))
import oracles  # noqa: E402

from rzchart.chart import (ShiftSpec, Verdict, arl, design_chart, design_from_cv, earl,  # noqa: E402
                           non_detection_probability, null_shift)
from rzchart.errors import DomainError  # noqa: E402
from rzchart.ratio import RatioParams, ratio_cdf, ratio_quantile  # noqa: E402
from rzchart.scenarios import FOOD_ALPHA, FOOD_N, food_model, furnace_model  # noqa: E402
from rzchart.simulate import (SimConfig, empirical_run_length, replay_example, shifted_model,  # noqa: E402
                              simulate_run_lengths)
from rzchart.var1 import (Var1Model, diagonal_subgroup_covariance, matrix_power_sums,  # noqa: E402
                          matrix_power_sums_closed_form, spectral_radius, stationary_covariance,
                          subgroup_covariance, subgroup_mean_covariance)

DATA = Path(__file__).parent / "data"
ALPHA = 0.005
RESULTS = []


def record(label, passed, detail, elapsed):
    line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail} ({elapsed:.1f}s)"
    RESULTS.append(line)
    print(line)
    return line


def load(name):
    with open(DATA / name) as fh:
        return list(csv.DictReader(fh))


def diag_design(gx, gy, rho0, phi, n):
    return design_from_cv(gx, gy, rho0, np.diag([phi, phi]), n, alpha=ALPHA)


# ---------------------------------------------------------------- criterion 1

def limits_worst_error(phi):
    worst, cell = 0.0, None
    for r in load("reference_limits.csv"):
        d = diag_design(float(r["gamma_x"]), float(r["gamma_y"]), float(r["rho0"]), phi, int(r["n"]))
        err = max(abs(d.lcl - float(r["lcl"])), abs(d.ucl - float(r["ucl"])))
        if err > worst:
            worst, cell = err, (r["gamma_x"], r["gamma_y"], r["rho0"], r["n"], d.lcl, d.ucl, r["lcl"], r["ucl"])
    return worst, cell


def check_1():
    worst, cell = limits_worst_error(0.1)
    ok = worst <= 5e-4
    return ok, (f"limits grid at Phi=diag(0.1,0.1), 100 cells, first column n=2: worst |error| {worst:.2e} "
                f"vs tol 5e-4 (worst cell gx,gy,rho0,n={cell[:4]} computed ({cell[4]:.5f}, {cell[5]:.5f}) "
                f"reference ({cell[6]}, {cell[7]}))")


def check_1_companion():
    worst, _ = limits_worst_error(0.2)
    return worst <= 5e-5 + 1e-12, f"same grid at Phi=diag(0.2,0.2): worst |error| {worst:.2e} vs tol 5e-5"


# ---------------------------------------------------------------- criterion 2

def check_2():
    d = design_chart(food_model(), FOOD_N, alpha=FOOD_ALPHA)
    ok = abs(d.lcl - 0.9723582) <= 1e-4 and abs(d.ucl - 1.0284276) <= 1e-4
    return ok, f"food limits ({d.lcl:.7f}, {d.ucl:.7f}) vs (0.9723582, 1.0284276) tol 1e-4"


# ---------------------------------------------------------------- criterion 3

SPOT_SEED = 20240517
SPOT_GRIDS = ("arl-equal-gamma", "arl-unequal-gamma")


def spot_cells():
    """20 cells drawn with a fixed seed among reference cells whose value is >= 20.

    The reference values carry one decimal, so below 20 the printed rounding
    alone can exceed 0.5% relative.
    """
    pool = [r for r in load("reference_arl.csv") if r["grid"] in SPOT_GRIDS and float(r["arl"]) >= 20.0]
    idx = np.random.default_rng(SPOT_SEED).choice(len(pool), size=20, replace=False)
    return [pool[i] for i in sorted(idx)]


def check_3():
    notes, ok = [], True
    for phi, expected in ((0.1, 23.1), (0.7, 59.7)):
        v = arl(diag_design(0.01, 0.01, -0.8, phi, 5), ShiftSpec(0.99, -0.8)).arl
        ok &= abs(v - expected) <= 0.2
        notes.append(f"Phi={phi}: {v:.3f} vs {expected}")
    worst = 0.0
    for r in spot_cells():
        d = design_from_cv(float(r["gamma_x"]), float(r["gamma_y"]), float(r["rho0"]),
                           np.diag([float(r["phi11"]), float(r["phi22"])]), int(r["n"]), alpha=ALPHA)
        v = arl(d, ShiftSpec(float(r["tau"]), float(r["rho1"]))).arl
        worst = max(worst, abs(v - float(r["arl"])) / float(r["arl"]))
    ok &= worst <= 0.005
    return ok, "; ".join(notes) + f" (tol 0.2); 20 random cells worst rel error {worst:.2e} (tol 5e-3)"


# ---------------------------------------------------------------- criterion 4

def check_4():
    notes, ok = [], True
    for phi, expected in ((0.1, 1.49), (0.5, 2.79), (0.7, 4.57)):
        v = earl(diag_design(0.01, 0.01, -0.8, phi, 15), (0.9, 1.0), closed=(True, False), method="grid")
        ok &= abs(v - expected) <= 0.03
        notes.append(f"Phi={phi}: {v:.4f} vs {expected}")
    return ok, "EARL on [0.9,1) " + "; ".join(notes) + " (tol 0.03)"


# ---------------------------------------------------------------- criterion 5

PUBLISHED_SWBAR = np.array([[4.724, 1.458], [1.458, 0.542]])
PUBLISHED_DERIVED = dict(gamma_xbar=0.209, gamma_ybar=0.036, rho_bar=0.911, omega_bar=2.996)


def check_5():
    m = furnace_model()
    sw = stationary_covariance(m).sigma_w
    ok = np.max(np.abs(sw - [[5.887, 1.500], [1.500, 2.002]])) <= 0.01
    stats = subgroup_covariance(m, n=5)
    oracle_sw = oracles.stein_by_iteration(m.phi, m.sigma_eps)
    oracle_swbar = oracles.subgroup_cov_double_sum(m.phi, oracle_sw, 5)
    ok &= np.max(np.abs(stats.sigma_wbar - oracle_swbar)) < 1e-10
    swbar_confirmed = np.max(np.abs(oracle_swbar - PUBLISHED_SWBAR)) <= 5e-4
    ok &= swbar_confirmed
    gx = math.sqrt(oracle_swbar[0, 0]) / m.mu[0]
    gy = math.sqrt(oracle_swbar[1, 1]) / m.mu[1]
    rho = oracle_swbar[0, 1] / math.sqrt(oracle_swbar[0, 0] * oracle_swbar[1, 1])
    omega = gx / gy * m.z
    for name, value in (("gamma_xbar", gx), ("gamma_ybar", gy), ("rho_bar", rho)):
        ok &= abs(getattr(stats, name) - value) < 1e-12
        ok &= abs(value - PUBLISHED_DERIVED[name]) <= 5e-4
    ok &= abs(stats.omega_bar - omega) < 1e-12
    # the published omega_bar is the formula evaluated on the 3-dp rounded CVs
    rounded = 0.209 / 0.036 * m.z
    omega_verdict = abs(omega - 2.996) > 5e-4 and abs(rounded - 2.996) < 1e-3
    ok &= omega_verdict
    return ok, (f"Sigma_W {np.round(sw, 4).tolist()} (tol 0.01); oracle confirms published Sigma_Wbar "
                f"{np.round(oracle_swbar, 4).tolist()}, gamma_xbar={gx:.4f}, gamma_ybar={gy:.5f}, rho_bar={rho:.4f}; "
                f"oracle corrects omega_bar 2.996 -> {omega:.4f} (2.996 comes from rounded CVs: {rounded:.4f})")


# ---------------------------------------------------------------- criterion 6

MC_REPLICATIONS = 20_000
MC_SEED = 6


def mc_cases():
    for gamma in (0.01, 0.2):
        for phi in (0.0, 0.1, 0.7):
            for tau in (1.0, 0.99):
                yield gamma, phi, tau


def mc_compare(gamma, phi, tau, seed):
    d = diag_design(gamma, gamma, -0.8, phi, 5)
    model = Var1Model.from_cv(gamma, gamma, -0.8, np.diag([phi, phi]))
    rep = empirical_run_length(d, SimConfig(shifted_model(model, ShiftSpec(tau, -0.8)), 5, seed,
                                            MC_REPLICATIONS))
    return arl(d, ShiftSpec(tau, -0.8)).arl, rep


def check_6():
    ok, notes = True, []
    for k, (gamma, phi, tau) in enumerate(mc_cases()):
        analytic, rep = mc_compare(gamma, phi, tau, MC_SEED + k)
        z = (rep.arl - analytic) / rep.stderr
        gap = (rep.arl - analytic) / analytic
        if gamma == 0.01:
            ok &= abs(z) <= 3.0
            notes.append(f"g={gamma} Phi={phi} tau={tau}: {rep.arl:.2f}+-{rep.stderr:.2f} vs {analytic:.2f} "
                         f"({z:+.2f} se)")
        else:
            ok &= abs(gap) <= 0.05
            notes.append(f"g={gamma} Phi={phi} tau={tau}: gap {100 * gap:+.2f}% ({z:+.2f} se)")
        ok &= rep.censored == 0
    return ok, f"{MC_REPLICATIONS} replications each; " + "; ".join(notes)


# ---------------------------------------------------------------- criterion 7

def random_models(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        phi = rng.uniform(-0.95, 0.95, (2, 2))
        if spectral_radius(phi) >= 0.95:
            continue
        low = np.array([[rng.uniform(0.05, 3), 0.0], [rng.uniform(-2, 2), rng.uniform(0.05, 3)]])
        out.append(Var1Model(rng.uniform(0.5, 50, 2), phi, low @ low.T))
    return out


def check_7():
    rng = np.random.default_rng(77)
    failures = []
    models = random_models(300, 7)
    stein = closed = lam_pi = 0.0
    for m in models:
        sw = stationary_covariance(m).sigma_w
        scale = max(1.0, np.max(np.abs(sw)))
        stein = max(stein, np.max(np.abs(sw - m.phi @ sw @ m.phi.T - m.sigma_eps)) / scale)
        closed = max(closed, np.max(np.abs(sw - stationary_covariance(m, method="closed_form").sigma_w)) / scale)
        n = int(rng.integers(2, 30))
        cf = matrix_power_sums_closed_form(m.phi, n)
        if cf is not None:
            lam, pi = matrix_power_sums(m.phi, n)
            lam_pi = max(lam_pi, np.max(np.abs(np.array(cf) - np.array([lam, pi]))) / max(1.0, np.max(np.abs(pi))))
    if stein >= 1e-10:
        failures.append(f"Stein residual {stein:.1e}")
    if closed >= 1e-10:
        failures.append(f"closed form {closed:.1e}")
    if lam_pi >= 1e-8:
        failures.append(f"Lambda/Pi closed forms {lam_pi:.1e}")
    xi = 0.0
    for _ in range(300):
        p11, p22 = rng.uniform(-0.9, 0.9, 2)
        low = np.array([[rng.uniform(0.05, 3), 0.0], [rng.uniform(-2, 2), rng.uniform(0.05, 3)]])
        sw = stationary_covariance(Var1Model([1, 1], np.diag([p11, p22]), low @ low.T)).sigma_w
        n = int(rng.integers(1, 30))
        diff = subgroup_mean_covariance(np.diag([p11, p22]), sw, n) - diagonal_subgroup_covariance(sw, p11, p22, n)
        xi = max(xi, np.max(np.abs(diff)) / max(1.0, np.max(np.abs(sw))))
    if xi >= 1e-12:
        failures.append(f"diagonal xi form {xi:.1e}")
    trip = beta_err = 0.0
    monotone = True
    for _ in range(500):
        params = RatioParams(rng.uniform(0.002, 0.2), rng.uniform(0.002, 0.2), rng.uniform(0.2, 5),
                             rng.uniform(-0.95, 0.95))
        ps = np.sort(rng.uniform(1e-4, 1 - 1e-4, 5))
        qs = [ratio_quantile(p, params) for p in ps]
        monotone &= all(a <= b for a, b in zip(qs, qs[1:]))
        trip = max(trip, max(abs(ratio_cdf(q, params) - p) for p, q in zip(ps, qs)))
    designs = 0
    while designs < 200:
        g = rng.uniform(0.001, 0.2)
        alpha = rng.uniform(0.001, 0.05)
        try:
            d = design_from_cv(g, g, rng.uniform(-0.9, 0.9), np.diag(rng.uniform(0, 0.8, 2)),
                               int(rng.integers(1, 16)), alpha=alpha)
        except DomainError:
            # unequal diagonal Phi with strong correlation has no valid innovation covariance
            continue
        designs += 1
        beta_err = max(beta_err, abs(non_detection_probability(d, null_shift(d)) - (1 - alpha)))
    if trip >= 1e-10:
        failures.append(f"CDF/quantile round trip {trip:.1e}")
    if beta_err >= 1e-9:
        failures.append(f"null-shift beta {beta_err:.1e}")
    if not monotone:
        failures.append("quantile not monotone")
    d = design_chart(food_model(), 5, alpha=ALPHA)
    cfg = SimConfig(shifted_model(food_model(), ShiftSpec(1.02, d.rho0)), 5, 123, 200)
    a, b = simulate_run_lengths(d, cfg), simulate_run_lengths(d, cfg, workers=2)
    if not (np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])):
        failures.append("simulator not deterministic")
    detail = (f"Stein {stein:.1e}, closed form {closed:.1e}, xi {xi:.1e}, Lambda/Pi {lam_pi:.1e}, "
              f"round trip {trip:.1e}, null beta {beta_err:.1e}, monotone {monotone}, simulator determinism "
              f"{'ok' if 'simulator not deterministic' not in failures else 'FAILED'}")
    return not failures, detail


# ---------------------------------------------------------------- criterion 8

def printed_match(value: float, printed: str) -> bool:
    """True if ``printed`` is ``value`` rounded or truncated to the printed decimals."""
    places = Decimal(printed)
    exp = places.as_tuple().exponent
    v = Decimal(repr(value))
    return places in (v.quantize(Decimal(1).scaleb(exp), ROUND_HALF_UP),
                      v.quantize(Decimal(1).scaleb(exp), ROUND_DOWN))


def check_8():
    rows = replay_example()
    mismatched = [r.sample for r in rows if not printed_match(r.zbar, r.published_zbar)]
    flagged = [r.sample for r in rows if r.verdict is Verdict.OUT_OF_CONTROL]
    truncated = [r.sample for r in rows
                 if printed_match(r.zbar, r.published_zbar)
                 and Decimal(repr(r.zbar)).quantize(Decimal(r.published_zbar), ROUND_HALF_UP)
                 != Decimal(r.published_zbar)]
    ok = not mismatched and flagged == [14, 15]
    return ok, (f"15 samples, Zbar matches the printed column for all but {mismatched or 'none'} "
                f"(rounded, or truncated for samples {truncated}); flagged {flagged}")


CRITERIA = [
    ("criterion 1 (limits grid, Phi=0.1)", check_1),
    ("criterion 1 companion (limits grid, Phi=0.2)", check_1_companion),
    ("criterion 2 (food limits)", check_2),
    ("criterion 3 (ARL spot checks)", check_3),
    ("criterion 4 (EARL spot checks)", check_4),
    ("criterion 5 (furnace example)", check_5),
    ("criterion 6 (Monte Carlo vs analytic)", check_6),
    ("criterion 7 (property suites)", check_7),
    ("criterion 8 (food replay)", check_8),
]


def run_check(label, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    record(label, ok, detail, time.perf_counter() - t0)
    return ok, detail


@pytest.mark.parametrize("label,fn", CRITERIA, ids=[f"c{i}" for i in ("1", "1-companion", "2", "3", "4", "5", "6",
                                                                      "7", "8")])
def test_acceptance(label, fn):
    ok, detail = run_check(label, fn)
    assert ok, detail


if __name__ == "__main__":
    results = [run_check(label, fn)[0] for label, fn in CRITERIA]
    sys.exit(0 if all(results[:1] + results[2:]) else 1)
