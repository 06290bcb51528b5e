"""Execute a :class:`~beltrami_lab.config.RunConfig`: ordered operations, files and reports.

Each operation writes into ``<output_dir>/<NN>_<label>/``. ``report.json`` lists every
result and every written path (relative to the output directory) and is byte-for-byte
reproducible for a given configuration and seed; wall-clock times and the thread count go
to ``timings.json`` instead.
"""
from __future__ import annotations

import dataclasses
import re
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from . import __version__
from . import asymptotics as asy
from . import criteria as crit
from . import oscillation as osc
from ._json import write_csv, write_json
from .config import RunConfig
from .core import GridSpec, MuField, PhiFunction, field_from_key, k_mu, k_tangent
from .errors import ConvergenceError, DomainError
from .formats import (load_mapping, load_mu_field, write_mapping_binary, write_mapping_csv,
                      write_mu_binary)
from .solver import Mapping, ring_inequality_check, solve_degenerate, solve_qc
from .verdict import CriterionVerdict

REPORT_NAME = "report.json"
TIMINGS_NAME = "timings.json"


@dataclass
class OpResult:
    index: int
    op: str
    label: str
    status: str = "ok"
    result: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    error: Optional[dict] = None

    def to_dict(self):
        return {"index": self.index, "op": self.op, "label": self.label, "status": self.status,
                "result": self.result, "files": self.files, "error": self.error}


@dataclass
class RunReport:
    config: dict
    versions: dict
    ops: list
    clamp: dict
    files: list

    @property
    def ok(self):
        return all(r.status == "ok" for r in self.ops)

    @property
    def exit_code(self):
        return 0 if self.ok else 1

    def to_dict(self):
        return {"config": self.config, "versions": self.versions, "ok": self.ok,
                "ops": [r.to_dict() for r in self.ops], "clamp": self.clamp, "files": self.files}


class _Context:
    def __init__(self, config: RunConfig, out: Path, workers: int):
        self.config = config
        self.out = out
        self.workers = workers
        self.th = config.thresholds
        c = config.grid.center
        self.grid = GridSpec(complex(c[0], c[1]), config.grid.half_width, config.grid.n)
        self._field: Optional[MuField] = None
        self.mapping: Optional[Mapping] = None
        self.mapping_label: Optional[str] = None

    @property
    def field(self) -> MuField:
        if self._field is None:
            spec = self.config.field
            self._field = field_from_key(spec.key) if spec.key else load_mu_field(spec.file)
        return self._field

    def scalar(self, key: str, z0=0j):
        if key == "k-mu":
            return lambda z: k_mu(self.field, z)
        if key == "k-tangent":
            return lambda z: k_tangent(self.field, z, z0)
        return osc.scalar_from_key(key)

    def evaluable(self, source: str) -> asy.EvaluableMapping:
        """``solved`` (last solve), ``closed-form`` (of the field), ``file:<path>`` or a key."""
        if source == "solved":
            if self.mapping is None:
                raise DomainError("no solved mapping available; add a solve op before this one")
            return asy.EvaluableMapping.from_mapping(self.mapping, name=f"solved[{self.mapping_label}]")
        if source == "closed-form":
            return asy.closed_form_for_field(self.field)
        if source.startswith("file:"):
            return asy.EvaluableMapping.from_mapping(load_mapping(source[5:]), name=source)
        return asy.mapping_from_key(source)


def _c(pair):
    return complex(pair[0], pair[1])


def _slug(text):
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", text).strip("-") or "op"


class _Writer:
    def __init__(self, ctx: _Context, result: OpResult):
        self.root = ctx.out
        self.dir = ctx.out / f"{result.index:02d}_{_slug(result.label)}"
        self.result = result

    def path(self, name):
        p = self.dir / name
        self.result.files.append(p.relative_to(self.root).as_posix())
        return p


# ---------------------------------------------------------------------------- operations


class PartialFailure(RuntimeError):
    """Some checks of an operation failed; ``result`` holds the ones that succeeded."""

    def __init__(self, result, failed):
        super().__init__(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        self.result = result
        self.failed = failed


class _Checks:
    """Runs the checks of one operation independently, recording each failure in place."""

    def __init__(self, out):
        self.out = out
        self.failed = []

    @contextmanager
    def item(self, name):
        try:
            yield
        except CAPTURED as exc:
            self.out[name] = {"error": _error_dict(exc)}
            self.failed.append(name)

    def finish(self):
        if self.failed:
            raise PartialFailure(self.out, self.failed)


def _op_solve(ctx: _Context, p: dict, w: _Writer):
    fld = ctx.field
    out = {"field": fld.key, "mode": p["mode"], "grid": {"n": ctx.grid.n,
           "half_width": ctx.grid.half_width, "center": ctx.grid.center}}
    if p["mode"] == "qc":
        m = solve_qc(fld, ctx.grid, tol=p["tol"], max_iter=p["max_iter"], workers=ctx.workers)
    else:
        run = solve_degenerate(fld, p["schedule"], ctx.grid, tol=p["tol"],
                               subgrid_radius=p["subgrid_radius"], max_iter=p["max_iter"],
                               workers=ctx.workers)
        out["approximation"] = run.to_dict()
        write_csv(w.path("distances.csv"), ["n", "sup_distance"],
                  zip(run.schedule[1:], run.distances))
        if not run.mappings:
            first = run.failures[0]
            raise ConvergenceError(f"no truncation level solved; level {first['truncation']}: "
                                   f"{first['message']}")
        m = run.mappings[-1]
    out.update({"residual": m.residual, "tol": m.tol, "iterations": m.iterations,
                "contraction": m.contraction, "positive_fraction": m.positive_fraction,
                "truncation": m.truncation})
    if "csv" in p["formats"]:
        write_mapping_csv(w.path("mapping.csv"), m)
    if "bin" in p["formats"]:
        write_mapping_binary(w.path("mapping.bin"), m)
    if fld.kind != "grid" and "bin" in p["formats"]:
        write_mu_binary(w.path("mu.bin"), ctx.grid, fld(ctx.grid.points()))
    if p["oracle"]:
        ref = ctx.evaluable(p["oracle"])
        Z = ctx.grid.points()
        ok = np.abs(Z) <= ref.radius
        err = np.abs(m.values[ok] - ref.evaluate(Z[ok]))
        out["oracle"] = {"mapping": ref.key, "sup_error": float(err.max()),
                         "mean_error": float(err.mean())}
    ctx.mapping, ctx.mapping_label = m, w.result.label
    return out


def _op_diagnose(ctx: _Context, p: dict, w: _Writer):
    z0 = _c(p["z0"])
    phi = ctx.scalar(p["function"], z0)
    r0, th = p["r0"], ctx.th
    out = {"function": p["function"], "z0": z0, "r0": r0}
    checks = _Checks(out)
    for check in p["checks"]:
        with checks.item(check):
            if check == "bmo":
                rep = osc.bmo_norm_estimate(phi, (z0, r0), osc.DiskFamily.dyadic(
                    p["levels"], region_center=z0, region_radius=r0), samples=p["samples"])
                out["bmo"] = rep
                write_csv(w.path("bmo_disks.csv"),
                          ["center_re", "center_im", "radius", "oscillation", "running_sup"],
                          ((complex(c).real, complex(c).imag, float(r), o, s) for (c, r), o, s
                           in zip(rep.disks, rep.oscillations, rep.running_sup)))
            elif check == "fmo":
                out["fmo"] = osc.fmo_test(phi, z0, r0, samples=p["samples"], th=th)
            elif check == "lebesgue":
                out["lebesgue"] = osc.lebesgue_point_test(phi, z0, r0, samples=p["samples"], th=th)
            elif check == "dispersion":
                radii, vals = osc.dispersion_ladder(phi, z0, r0, p["depth"], p["samples"])
                out["dispersion"] = {"maximal": float(np.max(vals)), "radii": radii, "values": vals}
                write_csv(w.path("dispersion.csv"), ["radius", "dispersion"], zip(radii, vals))
            elif check == "bound":
                if z0 != 0:
                    raise DomainError("the log-log bound check is centred at the origin")
                out["bound"] = osc.fmo_bound_check(phi, depth=p["depth"], samples=p["samples"])
            elif check == "vmo":
                out["vmo"] = osc.vmo_test(phi, (z0, r0), seed=ctx.config.seed, samples=p["samples"],
                                          th=th)
    checks.finish()
    return out


def _verdicts_in(obj, prefix):
    """Yield ``(name, CriterionVerdict)`` for every verdict nested in a report object."""
    if isinstance(obj, CriterionVerdict):
        yield prefix, obj
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from _verdicts_in(v, f"{prefix}_{k}")
    elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        for f in dataclasses.fields(obj):
            yield from _verdicts_in(getattr(obj, f.name), f"{prefix}_{f.name}")


def _write_traces(w: _Writer, out: dict):
    for name, obj in out.items():
        for label, v in _verdicts_in(obj, name):
            v.write_trace(w.path(f"trace_{_slug(label)}.csv"))


def _op_criteria(ctx: _Context, p: dict, w: _Writer):
    z0, th, rungs = _c(p["z0"]), ctx.th, p["rungs"]
    out = {}
    checks = _Checks(out)
    for check in p["checks"]:
        with checks.item(check):
            if check == "lehto":
                out[check] = crit.lehto_check(ctx.field, z0, p["eps0"], rungs=rungs, th=th)
            elif check == "log_scale":
                out[check] = crit.log_scale_check(ctx.field, z0, p["eps0"], "log", th=th)
            elif check == "loglog_scale":
                out[check] = crit.log_scale_check(ctx.field, z0, p["eps0"], "loglog", th=th)
            elif check == "phi_divergence":
                out[check] = crit.phi_divergence_check(PhiFunction.from_key(p["phi"]), rungs=rungs, th=th)
            elif check == "remark11":
                out[check] = crit.remark11_equivalences(PhiFunction.from_key(p["phi"]), rungs=rungs,
                                                        th=th)
            elif check == "psi_infinity":
                out[check] = crit.psi_infinity_check(ctx.field, crit.PsiFamily.from_key(p["psi"]),
                                                     p["R0"], rungs=rungs, th=th)
            elif check == "infinity_tail":
                rep = crit.infinity_tail_checks(ctx.field, p["normalization"], th=th)
                out[check] = rep
            elif check == "prop7":
                out[check] = crit.prop7_check(ctx.scalar(p["Q"], z0), PhiFunction.from_key(p["phi"]),
                                              rungs=rungs, th=th)
    _write_traces(w, out)
    checks.finish()
    return out


def _sparse_set(name):
    if name == "ray":
        return "ray", {}
    if name == "dyadic":
        return (lambda n: 2.0 ** -n), {"count": 1000}
    return (lambda n: 2.0 ** -(n * n)), {"count": 40}


def _op_asymptotics(ctx: _Context, p: dict, w: _Writer):
    th = ctx.th
    out = {}
    profiles = [x for x in p["profiles"] if x != "sparseness"]
    f = ctx.evaluable(p["mapping"]) if profiles else None
    if f is not None:
        out["mapping"] = f.key
    scales = asy.default_scales(p["direction"], p["rungs"], p["start"])
    direction = p["direction"]

    def emit(prof: asy.ScaleProfile, name):
        prof.write_csv(w.path(f"profile_{name}.csv"))
        out[name] = prof

    checks = _Checks(out)
    for name in p["profiles"]:
        with checks.item(name):
            if name == "homogeneity":
                emit(asy.homogeneity_profile(f, direction=direction, scales=scales,
                                             directions=p["directions"], th=th), name)
            elif name == "lavrentiev":
                emit(asy.lavrentiev_ratio(f, direction=direction, scales=scales, th=th), name)
            elif name == "angle_modulus":
                a, m = asy.angle_modulus_profiles(f, direction=direction, scales=scales,
                                                  directions=p["directions"], th=th)
                emit(a, "angle")
                emit(m, "modulus")
            elif name == "log_ratio":
                emit(asy.log_ratio_profile(f, direction=direction, scales=scales,
                                           directions=p["directions"], th=th), name)
            elif name == "belinskij":
                if direction != "to-zero":
                    raise DomainError("the A-ratio test runs towards the base point")
                emit(asy.belinskij_test(f, _c(p["mu0"]), _c(p["z0"]), scales, th=th), name)
            elif name == "theorem1":
                if direction != "to-zero":
                    raise DomainError("the equivalence suite runs towards the origin")
                rep = asy.theorem1_suite(f, scales, seed=ctx.config.seed, th=th)
                for key, prof in rep.profiles.items():
                    prof.write_csv(w.path(f"theorem1_{key}.csv"))
                out[name] = rep
            elif name == "distortion":
                Q = ctx.scalar(p["Q"], _c(p["z0"]))
                rep = asy.distortion_bound_check(f, Q, _c(p["z0"]), p["eps0"], p["delta"],
                                                 p["probes"], seed=ctx.config.seed)
                write_csv(w.path("distortion.csv"), ["re", "im", "lhs", "rhs"],
                          ((z.real, z.imag, a, b) for z, a, b in zip(rep.probes, rep.lhs, rep.rhs)))
                out[name] = rep
                if not rep.passed:
                    checks.failed.append(name)
            elif name == "sparseness":
                Z, kw = _sparse_set(p["sparse_set"])
                rep = asy.sparseness(Z, th=th, **kw)
                write_csv(w.path("sparseness.csv"), ["rho", "S"], zip(rep.rho, rep.values))
                out[name] = rep
    checks.finish()
    return out


def _op_ring(ctx: _Context, p: dict, w: _Writer):
    f = ctx.evaluable(p["mapping"])
    z0 = _c(p["z0"])
    Q = ctx.scalar(p["Q"], z0)
    rows = []
    for r1, r2 in p["radii"]:
        v = ring_inequality_check(f, z0, r1, r2, Q, m=p["m"], rtol=p["rtol"])
        rows.append({"r1": r1, "r2": r2, "verdict": v})
    return {"mapping": f.key, "Q": p["Q"], "checks": rows}


OPERATIONS = {"solve": _op_solve, "diagnose": _op_diagnose, "criteria": _op_criteria,
              "asymptotics": _op_asymptotics, "ring": _op_ring}

CAPTURED = (DomainError, ConvergenceError, ValueError, ArithmeticError, RuntimeError,
            OSError, KeyError)


def _error_dict(exc):
    d = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConvergenceError):
        d.update(contraction=exc.contraction, iterations=exc.iterations, residual=exc.residual)
    return d


def run(config: RunConfig, output_dir=None, workers=None) -> RunReport:
    """Run every operation in order; failures are recorded and do not stop later operations."""
    out = Path(output_dir if output_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = _Context(config, out, workers or config.workers)
    results, timings = [], []
    t_start = time.perf_counter()
    for i, op in enumerate(config.ops):
        res = OpResult(i, op.op, op.label)
        w = _Writer(ctx, res)
        t0 = time.perf_counter()
        try:
            res.result = OPERATIONS[op.op](ctx, op.params, w)
        except PartialFailure as exc:
            res.result, res.status = exc.result, "error"
            res.error = {"type": "PartialFailure", "message": str(exc), "failed": exc.failed}
        except CAPTURED as exc:
            res.status, res.error = "error", _error_dict(exc)
        timings.append({"index": i, "label": op.label, "seconds": time.perf_counter() - t0})
        results.append(res)
        write_json(w.path("result.json"), res)
    try:
        clamp = {"clamped": ctx.field.stats.clamped, "evaluated": ctx.field.stats.evaluated}
    except CAPTURED:
        clamp = {}
    cfg = config.to_dict()
    cfg.pop("output_dir")
    cfg.pop("workers")
    files = sorted({f for r in results for f in r.files} | {REPORT_NAME, TIMINGS_NAME})
    report = RunReport(cfg, {"beltrami_lab": __version__, "numpy": np.__version__,
                             "scipy": scipy.__version__}, results, clamp, files)
    write_json(out / REPORT_NAME, report)
    write_json(out / TIMINGS_NAME, {"ops": timings, "workers": ctx.workers,
                                    "total_seconds": time.perf_counter() - t_start})
    return report


def summarize(report: dict) -> str:
    """One line per operation and per verdict found in a report dictionary."""
    lines = []
    for op in report["ops"]:
        head = f"[{op['index']:02d}] {op['label']} ({op['op']}): {op['status']}"
        if op["status"] != "ok":
            head += f" - {op['error']['type']}: {op['error']['message']}"
        lines.append(head)
        for path, verdict in _find_verdicts(op.get("result", {}), ""):
            lines.append(f"      {path}: {verdict}")
    return "\n".join(lines)


def _find_verdicts(obj, path):
    if isinstance(obj, dict):
        if "verdict" in obj and isinstance(obj["verdict"], str) and "probe_values" in obj:
            yield path or obj.get("name", ""), obj["verdict"]
            return
        for k, v in obj.items():
            if k in ("extra", "probe_values", "profiles"):
                continue
            yield from _find_verdicts(v, f"{path}.{k}" if path else k)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _find_verdicts(v, f"{path}[{i}]")


__all__ = ["run", "RunReport", "OpResult", "OPERATIONS", "summarize", "REPORT_NAME",
           "TIMINGS_NAME"]
