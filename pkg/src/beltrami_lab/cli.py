"""Command-line front end.

``beltrami-lab run CONFIG`` executes a whole configuration. The ``solve``, ``diagnose``,
``criteria`` and ``asymptotics`` subcommands build a one-operation configuration from flags
(the flag names mirror the configuration keys) and run it the same way. ``report`` prints a
summary of an existing ``report.json``.

Exit codes: 0 success, 1 an operation failed, 2 configuration error.
The output directory can be overridden with the ``BELTRAMI_LAB_OUTPUT`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import (ASYMPTOTIC_PROFILES, CRITERIA_CHECKS, DIAGNOSE_CHECKS, load_config,
                     parse_config)
from .errors import ConfigError
from .pipeline import REPORT_NAME, run, summarize

OUTPUT_ENV = "BELTRAMI_LAB_OUTPUT"
EXIT_OK, EXIT_OP_FAILED, EXIT_CONFIG = 0, 1, 2


def _common(p: argparse.ArgumentParser):
    p.add_argument("--field", help="built-in coefficient key, e.g. radial-stretch:k=2")
    p.add_argument("--field-file", help="coefficient grid file (.csv or binary)")
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--half-width", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", default="results")
    p.add_argument("--workers", type=int, default=1, help="FFT threads")


def _z(text):
    return [float(x) for x in text.split(",")] if "," in text else [float(text), 0.0]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="beltrami-lab",
                                 description="Degenerate Beltrami equation laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a TOML/JSON configuration")
    r.add_argument("config")
    r.add_argument("--output-dir")
    r.add_argument("--workers", type=int)

    s = sub.add_parser("solve", help="solve the Beltrami equation on a grid")
    _common(s)
    s.add_argument("--mode", choices=["qc", "degenerate"], default="qc")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=5000)
    s.add_argument("--schedule", default="2,4,8,16", help="comma-separated truncation levels")
    s.add_argument("--subgrid-radius", type=float, default=1.0)
    s.add_argument("--oracle", help="closed-form mapping to compare with ('closed-form' or a key)")
    s.add_argument("--formats", default="csv,bin")

    d = sub.add_parser("diagnose", help="oscillation diagnostics of a scalar function")
    _common(d)
    d.add_argument("--function", default="k-mu", help="k-mu, k-tangent or a scalar key (log, inv, ...)")
    d.add_argument("--z0", type=_z, default=[0.0, 0.0], help="re,im")
    d.add_argument("--r0", type=float, default=0.5)
    d.add_argument("--checks", default="bmo,fmo,lebesgue,dispersion",
                   help=f"subset of {','.join(DIAGNOSE_CHECKS)}")
    d.add_argument("--levels", type=int, default=8)

    c = sub.add_parser("criteria", help="integral existence criteria")
    _common(c)
    c.add_argument("--checks", default="lehto,log_scale", help=f"subset of {','.join(CRITERIA_CHECKS)}")
    c.add_argument("--z0", type=_z, default=[0.0, 0.0])
    c.add_argument("--eps0", type=float, default=0.5)
    c.add_argument("--phi", default="exp")
    c.add_argument("--psi", default="inv:mirrored=true")
    c.add_argument("--R0", type=float, default=1.0)
    c.add_argument("--normalization", choices=["unit", "paper-4"], default="unit")
    c.add_argument("--Q", default="k-mu")

    a = sub.add_parser("asymptotics", help="scale profiles at the origin or at infinity")
    _common(a)
    a.add_argument("--mapping", default="closed-form",
                   help="closed-form, solved (solve first), file:<path> or a mapping key")
    a.add_argument("--profiles", default="homogeneity,lavrentiev",
                   help=f"subset of {','.join(ASYMPTOTIC_PROFILES)}")
    a.add_argument("--direction", choices=["to-zero", "to-infinity"], default="to-zero")
    a.add_argument("--rungs", type=int, default=19)
    a.add_argument("--start", type=int, default=2)
    a.add_argument("--mu0", type=_z, default=[0.0, 0.0])
    a.add_argument("--Q", default="one")
    a.add_argument("--delta", type=float, default=1.0)
    a.add_argument("--sparse-set", choices=["dyadic", "squares", "ray"], default="dyadic")
    a.add_argument("--solve-first", action="store_true",
                   help="solve the field on the grid and use the solution")

    rp = sub.add_parser("report", help="summarise a report.json")
    rp.add_argument("path", help="report.json or the directory holding it")
    rp.add_argument("--json", action="store_true", help="print the raw report")
    return ap


def _config_from_flags(ns) -> dict:
    if ns.field and ns.field_file:
        raise ConfigError("give --field or --field-file, not both", key="field")
    fld = {"file": ns.field_file} if ns.field_file else {"key": ns.field or "zero"}
    cfg = {"seed": ns.seed, "output_dir": ns.output_dir, "workers": ns.workers, "field": fld,
           "grid": {"n": ns.grid_n, "half_width": ns.half_width}}
    cmd = ns.command
    if cmd == "solve":
        op = {"op": "solve", "mode": ns.mode, "tol": ns.tol, "max_iter": ns.max_iter,
              "schedule": [int(x) for x in ns.schedule.split(",")],
              "subgrid_radius": ns.subgrid_radius, "formats": ns.formats.split(",")}
        if ns.oracle:
            op["oracle"] = ns.oracle
        ops = [op]
    elif cmd == "diagnose":
        ops = [{"op": "diagnose", "function": ns.function, "z0": ns.z0, "r0": ns.r0,
                "checks": ns.checks.split(","), "levels": ns.levels}]
    elif cmd == "criteria":
        ops = [{"op": "criteria", "checks": ns.checks.split(","), "z0": ns.z0, "eps0": ns.eps0,
                "phi": ns.phi, "psi": ns.psi, "R0": ns.R0, "normalization": ns.normalization,
                "Q": ns.Q}]
    else:
        ops = []
        mapping = ns.mapping
        if ns.solve_first:
            ops.append({"op": "solve"})
            mapping = "solved"
        ops.append({"op": "asymptotics", "mapping": mapping, "profiles": ns.profiles.split(","),
                    "direction": ns.direction, "rungs": ns.rungs, "start": ns.start,
                    "mu0": ns.mu0, "Q": ns.Q, "delta": ns.delta, "sparse_set": ns.sparse_set})
    cfg["ops"] = ops
    return cfg


def _report(ns) -> int:
    path = Path(ns.path)
    if path.is_dir():
        path = path / REPORT_NAME
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(data, indent=2) if ns.json else summarize(data))
    return EXIT_OK if data.get("ok") else EXIT_OP_FAILED


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command == "report":
        return _report(ns)
    try:
        if ns.command == "run":
            config = load_config(ns.config)
        else:
            config = parse_config(json.dumps(_config_from_flags(ns)), "json")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = os.environ.get(OUTPUT_ENV) or getattr(ns, "output_dir", None) or config.output_dir
    workers = getattr(ns, "workers", None) or config.workers
    report = run(config, output_dir=out, workers=workers)
    print(summarize(report_dict(report)))
    print(f"report: {Path(out) / REPORT_NAME}")
    return report.exit_code


def report_dict(report) -> dict:
    from ._json import jsonable
    return jsonable(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
