"""Run configuration: a TOML document (or the same schema as JSON) validated into dataclasses.

Example::

    seed = 0
    output_dir = "results/shabat"

    [field]
    key = "shabat"

    [grid]
    n = 256
    half_width = 4.0

    [[ops]]
    op = "asymptotics"
    mapping = "closed-form"
    profiles = ["homogeneity", "log_ratio"]

Unknown keys, wrong types and invalid values raise :class:`ConfigError` naming the key and,
where it can be located in the text, the line.
"""
from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import tomli

from ._json import dumps
from .errors import ConfigError
from .verdict import Thresholds

OP_PARAMS = {
    "solve": {
        "mode": ("qc", str), "tol": (1e-8, float), "max_iter": (5000, int),
        "schedule": ([2, 4, 8, 16], list), "subgrid_radius": (1.0, float),
        "oracle": (None, str), "formats": (["csv", "bin"], list), "label": (None, str),
    },
    "diagnose": {
        "function": ("k-mu", str), "z0": ([0.0, 0.0], list), "r0": (0.5, float),
        "checks": (["bmo", "fmo", "lebesgue", "dispersion"], list), "levels": (8, int),
        "samples": (128, int), "depth": (12, int), "label": (None, str),
    },
    "criteria": {
        "checks": (["lehto", "log_scale"], list), "z0": ([0.0, 0.0], list), "eps0": (0.5, float),
        "phi": ("exp", str), "psi": ("inv:mirrored=true", str), "R0": (1.0, float),
        "normalization": ("unit", str), "Q": ("k-mu", str), "rungs": (20, int),
        "label": (None, str),
    },
    "asymptotics": {
        "mapping": ("solved", str), "profiles": (["homogeneity", "lavrentiev"], list),
        "direction": ("to-zero", str), "rungs": (19, int), "start": (2, int),
        "directions": (16, int), "mu0": ([0.0, 0.0], list), "z0": ([0.0, 0.0], list),
        "Q": ("one", str), "eps0": (0.5, float), "delta": (1.0, float), "probes": (100, int),
        "sparse_set": ("dyadic", str), "label": (None, str),
    },
    "ring": {
        "mapping": ("solved", str), "Q": ("one", str), "z0": ([0.0, 0.0], list),
        "radii": ([[0.1, 0.5], [0.2, 0.8], [0.25, 1.0]], list), "m": (1024, int),
        "rtol": (1e-3, float), "label": (None, str),
    },
}

ASYMPTOTIC_PROFILES = ("homogeneity", "lavrentiev", "angle_modulus", "log_ratio", "belinskij",
                       "theorem1", "distortion", "sparseness")
CRITERIA_CHECKS = ("lehto", "log_scale", "loglog_scale", "phi_divergence", "remark11",
                   "psi_infinity", "infinity_tail", "prop7")
DIAGNOSE_CHECKS = ("bmo", "fmo", "lebesgue", "dispersion", "bound", "vmo")
SPARSE_SETS = ("dyadic", "squares", "ray")


@dataclass
class FieldSpec:
    key: Optional[str] = "zero"
    file: Optional[str] = None

    def __post_init__(self):
        if (self.key is None) == (self.file is None):
            raise ConfigError("field needs exactly one of 'key' or 'file'", key="field")


@dataclass
class GridConfig:
    n: int = 256
    half_width: float = 4.0
    center: list = field(default_factory=lambda: [0.0, 0.0])

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ConfigError(f"grid n must be a power of two >= 16, got {self.n}", key="n")
        if not self.half_width > 0:
            raise ConfigError("grid half_width must be positive", key="half_width")
        if len(self.center) != 2:
            raise ConfigError("grid center is [re, im]", key="center")


@dataclass
class OpConfig:
    op: str
    params: dict

    @property
    def label(self):
        return self.params.get("label") or self.op

    def to_dict(self):
        return {"op": self.op, **self.params}


@dataclass
class RunConfig:
    field: FieldSpec = dataclasses.field(default_factory=FieldSpec)
    grid: GridConfig = dataclasses.field(default_factory=GridConfig)
    ops: list = dataclasses.field(default_factory=list)
    thresholds: Thresholds = dataclasses.field(default_factory=Thresholds)
    output_dir: str = "results"
    seed: int = 0
    workers: int = 1

    def to_dict(self):
        return {
            "seed": self.seed, "output_dir": self.output_dir, "workers": self.workers,
            "field": {k: v for k, v in dataclasses.asdict(self.field).items() if v is not None},
            "grid": dataclasses.asdict(self.grid),
            "thresholds": self.thresholds.to_dict(),
            "ops": [op.to_dict() for op in self.ops],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_toml(self) -> str:
        d = self.to_dict()
        lines = [f"{k} = {_toml_value(d[k])}" for k in ("seed", "output_dir", "workers")]
        for table in ("field", "grid", "thresholds"):
            lines += ["", f"[{table}]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in d[table].items()]
        for op in d["ops"]:
            lines += ["", "[[ops]]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in op.items() if v is not None]
        return "\n".join(lines) + "\n"


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot write {type(v).__name__} to TOML")


# ---------------------------------------------------------------------------- parsing


class _Locator:
    """Finds the line of a key in the source text (best effort, 1-based)."""

    def __init__(self, text, is_json):
        self.lines = text.splitlines()
        self.is_json = is_json

    def _section_start(self, section, index):
        if section is None:
            return 0
        pat = re.compile(r"^\s*\[\[\s*ops\s*\]\]" if section == "ops"
                         else rf"^\s*\[\s*{re.escape(section)}\s*\]")
        if self.is_json:
            pat = re.compile(rf'"{re.escape(section)}"\s*:')
        hits = [i for i, ln in enumerate(self.lines) if pat.search(ln)]
        if section == "ops" and not self.is_json:
            return hits[index] if index is not None and index < len(hits) else (hits[0] if hits else 0)
        if section == "ops" and self.is_json and index is not None and hits:
            # the index-th object after "ops":
            count = -1
            for i in range(hits[0], len(self.lines)):
                if "{" in self.lines[i]:
                    count += 1
                    if count == index:
                        return i
        return hits[0] if hits else 0

    def line(self, key, section=None, index=None):
        start = self._section_start(section, index)
        pat = re.compile(rf'^\s*"?{re.escape(key)}"?\s*[=:]') if not self.is_json \
            else re.compile(rf'"{re.escape(key)}"\s*:')
        for i in range(start, len(self.lines)):
            if pat.search(self.lines[i]):
                return i + 1
        return None


def _coerce(value, kind, key, loc: _Locator, section=None, index=None):
    if value is None:
        return None
    ok = {
        str: isinstance(value, str),
        int: isinstance(value, int) and not isinstance(value, bool),
        float: isinstance(value, (int, float)) and not isinstance(value, bool),
        list: isinstance(value, list),
        bool: isinstance(value, bool),
    }[kind]
    if not ok:
        raise ConfigError(f"expected {kind.__name__}, got {type(value).__name__}", key=key,
                          line=loc.line(key, section, index))
    return float(value) if kind is float else value


def _check_keys(table: dict, allowed, section, loc: _Locator, index=None):
    for k in table:
        if k not in allowed:
            raise ConfigError(f"unknown key in [{section or 'top level'}]", key=k,
                              line=loc.line(k, section, index))


def _validate_choice(values, allowed, key, loc, index):
    for v in values if isinstance(values, list) else [values]:
        if v not in allowed:
            raise ConfigError(f"'{v}' is not one of {list(allowed)}", key=key,
                              line=loc.line(key, "ops", index))


def _parse_op(raw: dict, index, loc: _Locator) -> OpConfig:
    if "op" not in raw:
        raise ConfigError("every [[ops]] entry needs 'op'", key="op", line=loc.line("op", "ops", index))
    name = raw["op"]
    if name not in OP_PARAMS:
        raise ConfigError(f"unknown op '{name}'; known: {sorted(OP_PARAMS)}", key="op",
                          line=loc.line("op", "ops", index))
    schema = OP_PARAMS[name]
    _check_keys({k: v for k, v in raw.items() if k != "op"}, schema, "ops", loc, index)
    params = {}
    for k, (default, kind) in schema.items():
        params[k] = _coerce(raw[k], kind, k, loc, "ops", index) if k in raw else \
            (list(default) if isinstance(default, list) else default)
    if name == "solve":
        _validate_choice(params["mode"], ("qc", "degenerate"), "mode", loc, index)
        _validate_choice(params["formats"], ("csv", "bin"), "formats", loc, index)
        sched = params["schedule"]
        if params["mode"] == "degenerate" and (len(sched) < 3 or any(
                not isinstance(s, int) or s < 2 for s in sched) or sorted(set(sched)) != sched):
            raise ConfigError("schedule must be >= 3 strictly increasing integers >= 2",
                              key="schedule", line=loc.line("schedule", "ops", index))
        if not params["tol"] > 0:
            raise ConfigError("tol must be positive", key="tol", line=loc.line("tol", "ops", index))
    elif name == "diagnose":
        _validate_choice(params["checks"], DIAGNOSE_CHECKS, "checks", loc, index)
    elif name == "criteria":
        _validate_choice(params["checks"], CRITERIA_CHECKS, "checks", loc, index)
        _validate_choice(params["normalization"], ("unit", "paper-4"), "normalization", loc, index)
    elif name == "asymptotics":
        _validate_choice(params["profiles"], ASYMPTOTIC_PROFILES, "profiles", loc, index)
        _validate_choice(params["direction"], ("to-zero", "to-infinity"), "direction", loc, index)
        _validate_choice(params["sparse_set"], SPARSE_SETS, "sparse_set", loc, index)
        if params["rungs"] < 4:
            raise ConfigError("rungs must be >= 4", key="rungs", line=loc.line("rungs", "ops", index))
    for k in ("z0", "mu0"):
        if k in params and len(params[k]) != 2:
            raise ConfigError(f"{k} is [re, im]", key=k, line=loc.line(k, "ops", index))
    return OpConfig(name, params)


_TOP = {"field", "grid", "ops", "thresholds", "output_dir", "seed", "workers"}


def parse_config(text: str, fmt: Optional[str] = None) -> RunConfig:
    """Validate a TOML (default) or JSON configuration into a :class:`RunConfig`.

    ``fmt`` is ``"toml"`` or ``"json"``; when omitted, text starting with ``{`` is JSON.
    """
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    loc = _Locator(text, fmt == "json")
    try:
        raw: dict[str, Any] = json.loads(text) if fmt == "json" else tomli.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ConfigError(f"syntax error: {exc}", line=line) from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table/object")
    _check_keys(raw, _TOP, None, loc)

    fld = raw.get("field", {})
    _check_keys(fld, {"key", "file"}, "field", loc)
    if "file" in fld and "key" not in fld:
        field_spec = FieldSpec(key=None, file=_coerce(fld["file"], str, "file", loc, "field"))
    else:
        field_spec = FieldSpec(key=_coerce(fld.get("key", "zero"), str, "key", loc, "field"),
                               file=_coerce(fld.get("file"), str, "file", loc, "field"))

    g = raw.get("grid", {})
    _check_keys(g, {"n", "half_width", "center"}, "grid", loc)
    try:
        grid = GridConfig(n=_coerce(g.get("n", 256), int, "n", loc, "grid"),
                          half_width=_coerce(g.get("half_width", 4.0), float, "half_width", loc, "grid"),
                          center=[float(x) for x in _coerce(g.get("center", [0.0, 0.0]), list,
                                                            "center", loc, "grid")])
    except ConfigError as exc:
        raise ConfigError(str(exc).split(" (")[0], key=exc.key,
                          line=loc.line(exc.key, "grid")) from None

    th_raw = raw.get("thresholds", {})
    th_fields = {f.name: f.type for f in dataclasses.fields(Thresholds)}
    _check_keys(th_raw, th_fields, "thresholds", loc)
    th_vals = {}
    for k, v in th_raw.items():
        th_vals[k] = _coerce(v, int if k == "block" else float, k, loc, "thresholds")
    thresholds = Thresholds(**th_vals)

    ops_raw = raw.get("ops", [])
    if not isinstance(ops_raw, list):
        raise ConfigError("ops must be an array of tables", key="ops", line=loc.line("ops"))
    ops = [_parse_op(o, i, loc) for i, o in enumerate(ops_raw)]

    seed = _coerce(raw.get("seed", 0), int, "seed", loc)
    workers = _coerce(raw.get("workers", 1), int, "workers", loc)
    if workers < 1:
        raise ConfigError("workers must be >= 1", key="workers", line=loc.line("workers"))
    return RunConfig(field=field_spec, grid=grid, ops=ops, thresholds=thresholds,
                     output_dir=_coerce(raw.get("output_dir", "results"), str, "output_dir", loc),
                     seed=seed, workers=workers)


def load_config(path) -> RunConfig:
    from pathlib import Path
    path = Path(path)
    return parse_config(path.read_text(), "json" if path.suffix == ".json" else "toml")


__all__ = ["RunConfig", "OpConfig", "FieldSpec", "GridConfig", "parse_config", "load_config",
           "OP_PARAMS", "ASYMPTOTIC_PROFILES", "CRITERIA_CHECKS", "DIAGNOSE_CHECKS"]
