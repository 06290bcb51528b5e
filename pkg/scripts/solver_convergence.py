"""Oracle error of the spectral solver for the radial stretch k = 2 as the grid is refined.

Writes ``solver_convergence.csv`` (n, spacing, sup_error, residual, iterations, seconds) and
prints the observed error ratio between consecutive resolutions.
"""
import argparse
import csv
import time
from pathlib import Path

import numpy as np

from beltrami_lab.core import GridSpec, field_from_key
from beltrami_lab.solver import solve_qc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="64,128,256,512,1024")
    ap.add_argument("--k", type=float, default=2.0)
    ap.add_argument("--half-width", type=float, default=4.0)
    ap.add_argument("--out", default="results/scripts")
    args = ap.parse_args()

    field = field_from_key(f"radial-stretch:k={args.k}")
    rows = []
    for n in map(int, args.sizes.split(",")):
        g = GridSpec(0j, args.half_width, n)
        t0 = time.perf_counter()
        m = solve_qc(field, g, tol=1e-8)
        dt = time.perf_counter() - t0
        Z = g.points()
        oracle = np.where(np.abs(Z) <= 1, Z * np.abs(Z) ** (args.k - 1), Z)
        err = float(np.max(np.abs(m.values - oracle)))
        rows.append((n, g.spacing, err, m.residual, m.iterations, dt))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "solver_convergence.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "spacing", "sup_error", "residual", "iterations", "seconds"])
        w.writerows(rows)
    prev = None
    for n, h, err, res, it, dt in rows:
        ratio = f"{prev / err:5.2f}" if prev else "    -"
        print(f"n={n:5d}  h={h:.4f}  error={err:.3e}  ratio={ratio}  residual={res:.1e}  "
              f"iters={it}  {dt:.2f}s")
        prev = err


if __name__ == "__main__":
    main()
