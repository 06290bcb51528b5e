"""Cauchy distances of the truncation scheme for several degenerate coefficients.

For each field the truncated equations are solved on a common grid and the sup distance
between consecutive levels is recorded on the sub-grid ``|x|, |y| <= 1``.
"""
import argparse
import csv
from pathlib import Path

from beltrami_lab.core import GridSpec, field_from_key
from beltrami_lab.solver import solve_degenerate

FIELDS = {
    "radial-profile:profile=log": 4.0,
    "radial-profile:profile=log2": 4.0,
    "radial-profile:profile=log2,sign=-1": 4.0,
    "radial-profile:profile=ring": 12.0,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--schedule", default="2,4,8,16,32,64")
    ap.add_argument("--out", default="results/scripts")
    args = ap.parse_args()
    schedule = [int(s) for s in args.schedule.split(",")]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "degenerate_scheme.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["field", "from_level", "to_level", "distance", "converged"])
        for key, hw in FIELDS.items():
            run = solve_degenerate(field_from_key(key), schedule, GridSpec(0j, hw, args.n))
            for (a, b), d in zip(zip(schedule, schedule[1:]), run.distances):
                w.writerow([key, a, b, d, run.converged])
            dist = ", ".join(f"{d:.3g}" for d in run.distances)
            jac = run.mappings[-1].positive_fraction if run.mappings else float("nan")
            print(f"{key:40s} converged={run.converged!s:5s}  J>0 on {jac:.3f}  "
                  f"distances [{dist}]")
            for f in run.failures:
                print(f"    level {f['truncation']}: {f['error']}: {f['message']}")


if __name__ == "__main__":
    main()
