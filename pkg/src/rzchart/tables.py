"""Grid sweeps reproducing the design tables and the EARL-versus-Phi figure data.

A grid is a cross product of parameter axes; cells are produced with
``itertools.product`` in the declared axis order, so row order is
deterministic and independent of how the cells are evaluated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .chart import ShiftSpec, arl, design_from_cv, earl
from .errors import ConfigError, DomainError

TABLE_COLUMNS = ["n", "gamma_x", "gamma_y", "rho0", "rho1", "phi11", "phi22", "tau",
                 "lcl", "ucl", "beta", "arl"]
EARL_COLUMNS = ["n", "gamma_x", "gamma_y", "rho0", "rho1", "phi11", "phi22", "omega",
                "lcl", "ucl", "earl"]

RHOS = (-0.8, -0.4, 0.0, 0.4, 0.8)
NS = (2, 5, 7, 10, 15)
TAUS = (0.9, 0.95, 0.98, 0.99, 1.01, 1.02, 1.05, 1.1)
EQUAL_GAMMAS = ((0.01, 0.01), (0.2, 0.2))
UNEQUAL_GAMMAS = ((0.01, 0.2), (0.2, 0.01))
ALL_GAMMAS = ((0.01, 0.01), (0.01, 0.2), (0.2, 0.01), (0.2, 0.2))
SAME_PHIS = ((0.1, 0.1), (0.7, 0.7))
MIXED_PHIS = ((0.1, 0.7), (0.7, 0.1))
RHO_SHIFTS = ((-0.4, -0.8), (-0.4, -0.2), (0.4, 0.2), (0.4, 0.8))
FIGURE_PHI = tuple(round(0.1 * k, 1) for k in range(1, 8))
# shift-size intervals as (a, b, a_closed, b_closed)
OMEGA_D = (0.9, 1.0, True, False)
OMEGA_I = (1.0, 1.1, False, True)


@dataclass(frozen=True)
class TableGrid:
    """One sweep.  ``kind`` is ``"limits"``, ``"arl"`` or ``"earl"``.

    ``phi`` is the diagonal transition pairs; ``rho`` holds ``(rho0, rho1)``
    pairs.  Limits grids evaluate the null shift (``tau = 1``,
    ``rho1 = rho0``).
    """

    name: str
    kind: str
    gamma: tuple
    rho: tuple
    phi: tuple
    n: tuple
    tau: tuple = (1.0,)
    omega: tuple = ()
    alpha: float = 0.005
    earl_method: str = "grid"

    def cells(self):
        if self.kind == "earl":
            return itertools.product(self.gamma, self.rho, self.phi, self.n, self.omega)
        return itertools.product(self.gamma, self.rho, self.phi, self.n, self.tau)


def _pairs(values):
    return tuple((r, r) for r in values)


PRESETS = {
    "limits": TableGrid("limits", "limits", ALL_GAMMAS, _pairs(RHOS), ((0.1, 0.1),), NS),
    "arl-equal-gamma": TableGrid("arl-equal-gamma", "arl", EQUAL_GAMMAS, _pairs(RHOS), SAME_PHIS, NS, TAUS),
    "arl-unequal-gamma": TableGrid("arl-unequal-gamma", "arl", UNEQUAL_GAMMAS, _pairs(RHOS), SAME_PHIS, NS, TAUS),
    "arl-mixed-phi-equal-gamma": TableGrid("arl-mixed-phi-equal-gamma", "arl", EQUAL_GAMMAS, _pairs(RHOS),
                                           MIXED_PHIS, NS, TAUS),
    "arl-mixed-phi-unequal-gamma": TableGrid("arl-mixed-phi-unequal-gamma", "arl", UNEQUAL_GAMMAS, _pairs(RHOS),
                                             MIXED_PHIS, NS, TAUS),
    "arl-rho-shift-equal-gamma": TableGrid("arl-rho-shift-equal-gamma", "arl", EQUAL_GAMMAS, RHO_SHIFTS,
                                           SAME_PHIS, NS, TAUS),
    "arl-rho-shift-unequal-gamma": TableGrid("arl-rho-shift-unequal-gamma", "arl", UNEQUAL_GAMMAS, RHO_SHIFTS,
                                             SAME_PHIS, NS, TAUS),
    "earl-phi": TableGrid("earl-phi", "earl", EQUAL_GAMMAS, ((-0.8, -0.8),),
                          tuple(itertools.product(FIGURE_PHI, FIGURE_PHI)), (2, 15), omega=(OMEGA_D, OMEGA_I)),
    "earl-phi-rho-shift": TableGrid("earl-phi-rho-shift", "earl", EQUAL_GAMMAS, ((-0.4, -0.8),),
                                    tuple(itertools.product(FIGURE_PHI, FIGURE_PHI)), (2, 15),
                                    omega=(OMEGA_D, OMEGA_I)),
}


def get_preset(name: str, phi: float | None = None, alpha: float | None = None,
               earl_method: str | None = None) -> TableGrid:
    """Preset grid, optionally with a common diagonal ``phi`` and a different ``alpha``."""
    try:
        grid = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown table {name!r}; choose from {', '.join(PRESETS)}") from None
    if phi is not None:
        grid = replace(grid, phi=((phi, phi),))
    if alpha is not None:
        grid = replace(grid, alpha=alpha)
    if earl_method is not None:
        grid = replace(grid, earl_method=earl_method)
    return grid


def format_omega(omega) -> str:
    a, b, ca, cb = omega
    return f"{'[' if ca else '('}{a:g};{b:g}{']' if cb else ')'}"


def _cell_error(grid, cell, exc):
    return DomainError(f"table {grid.name}, cell {cell}: {exc}")


def run_grid(grid: TableGrid) -> tuple[list[str], list[list]]:
    """Evaluate every cell; returns ``(columns, rows)``."""
    rows = []
    designs = {}
    for cell in grid.cells():
        (gx, gy), (r0, r1), (p11, p22), n, last = cell
        key = (gx, gy, r0, p11, p22, n)
        try:
            if key not in designs:
                designs[key] = design_from_cv(gx, gy, r0, np.diag([p11, p22]), n, alpha=grid.alpha)
            d = designs[key]
            if grid.kind == "earl":
                a, b, ca, cb = last
                value = earl(d, (a, b), rho1=r1, closed=(ca, cb), method=grid.earl_method)
                rows.append([n, gx, gy, r0, r1, p11, p22, format_omega(last), d.lcl, d.ucl, value])
            else:
                rep = arl(d, ShiftSpec(last, r1))
                rows.append([n, gx, gy, r0, r1, p11, p22, last, d.lcl, d.ucl, rep.beta, rep.arl])
        except DomainError as exc:
            raise _cell_error(grid, cell, exc) from exc
    return (EARL_COLUMNS if grid.kind == "earl" else TABLE_COLUMNS), rows
