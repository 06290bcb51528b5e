"""Verdict table of the conformality profiles for the closed-form mappings.

Rows are mappings, columns are the five equivalent forms plus the Lavrent'iev ratio and the
logarithmic property; the last column says whether the five forms agree.
"""
import argparse

from beltrami_lab.asymptotics import (lavrentiev_ratio, log_ratio_profile, mapping_from_key,
                                      theorem1_suite)

MAPPINGS = ["identity", "shabat", "log-spiral", "radial-stretch:k=2.0",
            "radial-stretch:k=0.5", "radial-stretch:k=4.0"]
SHORT = {"holds-like": "holds", "fails-like": "fails", "inconclusive": "?"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mappings", default=",".join(MAPPINGS))
    args = ap.parse_args()
    cols = ["belinskij", "ray", "two_point", "pointwise", "uniform"]
    print(f"{'mapping':24s}" + "".join(f"{c:>11s}" for c in cols + ["lavrentiev", "log"]) +
          "  consistent")
    for key in args.mappings.split(","):
        f = mapping_from_key(key)
        rep = theorem1_suite(f)
        row = [SHORT[rep.verdicts[c].verdict] for c in cols]
        row.append(SHORT[lavrentiev_ratio(f).verdict.verdict])
        row.append(SHORT[log_ratio_profile(f).verdict.verdict])
        print(f"{key:24s}" + "".join(f"{v:>11s}" for v in row) + f"  {rep.consistent}")


if __name__ == "__main__":
    main()
