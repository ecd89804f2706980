"""Regenerate the limits and ARL tables and compare them with the stored references.

Usage::

    python3 scripts/reproduce_tables.py --outdir results/
    python3 scripts/reproduce_tables.py --phi 0.1     # limits grid at a different diagonal Phi
"""
import argparse
import csv
from pathlib import Path

from rzchart.io import write_table
from rzchart.tables import PRESETS, get_preset, run_grid

REFERENCE = Path(__file__).resolve().parents[1] / "tests" / "data"
ARL_GRIDS = [name for name in PRESETS if name.startswith("arl-")]


def load_reference(name):
    with open(REFERENCE / name) as fh:
        return list(csv.DictReader(fh))


def compare_limits(rows, columns):
    ref = {(r["n"], float(r["gamma_x"]), float(r["gamma_y"]), float(r["rho0"])): r
           for r in load_reference("reference_limits.csv")}
    worst = 0.0
    for row in rows:
        rec = dict(zip(columns, row))
        r = ref.get((str(rec["n"]), rec["gamma_x"], rec["gamma_y"], rec["rho0"]))
        if r is not None:
            worst = max(worst, abs(rec["lcl"] - float(r["lcl"])), abs(rec["ucl"] - float(r["ucl"])))
    return worst


def compare_arl(name, rows, columns):
    keys = ("n", "gamma_x", "gamma_y", "rho0", "rho1", "phi11", "phi22", "tau")
    ref = {tuple(float(r[k]) for k in keys): float(r["arl"])
           for r in load_reference("reference_arl.csv") if r["grid"] == name}
    worst = 0.0
    for row in rows:
        rec = dict(zip(columns, row))
        published = ref.get(tuple(float(rec[k]) for k in keys))
        if published is not None:
            worst = max(worst, abs(rec["arl"] - published))
    return worst


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    parser.add_argument("--phi", type=float, default=0.2,
                        help="common diagonal Phi for the limits grid (default 0.2, which matches the reference)")
    args = parser.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)

    grid = get_preset("limits", phi=args.phi)
    columns, rows = run_grid(grid)
    write_table(args.outdir / "limits.csv", columns, rows, {"preset": "limits", "phi": args.phi})
    print(f"limits (Phi={args.phi}): worst |error| vs reference {compare_limits(rows, columns):.2e}")

    for name in ARL_GRIDS:
        columns, rows = run_grid(get_preset(name))
        write_table(args.outdir / f"{name}.csv", columns, rows, {"preset": name})
        print(f"{name}: {len(rows)} cells, worst |error| vs reference {compare_arl(name, rows, columns):.3f}")


if __name__ == "__main__":
    main()
