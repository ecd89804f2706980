"""Compute the EARL surfaces over a 7x7 grid of diagonal Phi values.

Writes one CSV per preset (``earl-phi`` and ``earl-phi-rho-shift``) that can be
plotted as heat maps of EARL against (phi11, phi22).
"""
import argparse
from pathlib import Path

from rzchart.io import write_table
from rzchart.tables import get_preset, run_grid


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    parser.add_argument("--method", choices=("grid", "quadrature"), default="grid")
    args = parser.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name in ("earl-phi", "earl-phi-rho-shift"):
        columns, rows = run_grid(get_preset(name, earl_method=args.method))
        path = args.outdir / f"{name}.csv"
        write_table(path, columns, rows, {"preset": name, "earl_method": args.method})
        values = [row[-1] for row in rows]
        print(f"{name}: {len(rows)} cells -> {path} (EARL range {min(values):.3f} .. {max(values):.3f})")


if __name__ == "__main__":
    main()
