"""Three-valued verdicts for numerical limit probes.

A probe cannot certify a limit, so every check returns a :class:`CriterionVerdict`
carrying the trace it was decided on. The decision rules live here so that all
modules share one set of (configurable) thresholds.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ._json import write_csv

HOLDS = "holds-like"
FAILS = "fails-like"
INCONCLUSIVE = "inconclusive"
VERDICTS = (HOLDS, FAILS, INCONCLUSIVE)


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds. Defaults are the documented ones; all are reported with results."""

    block: int = 6
    plateau: float = 1.05
    growth_per_decade: float = 2.0
    divergent_exponent: float = 1.3
    convergent_exponent: float = 1.7
    decade_factor: float = 1.5
    decay_slope: float = -0.3
    plateau_slope: float = -0.1
    zero_tol: float = 1e-12
    limit_tol: float = 1e-2

    def to_dict(self):
        return asdict(self)


DEFAULT_THRESHOLDS = Thresholds()


@dataclass
class CriterionVerdict:
    name: str
    verdict: str
    probe_values: list
    fitted_slope: Optional[float] = None
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if len(self.probe_values) == 0:
            raise ValueError("a verdict needs at least one probe value")
        self.probe_values = [(float(p), float(v)) for p, v in self.probe_values]

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def to_dict(self):
        return {
            "name": self.name,
            "verdict": self.verdict,
            "probe_values": [list(pv) for pv in self.probe_values],
            "fitted_slope": self.fitted_slope,
            "notes": list(self.notes),
            "extra": self.extra,
        }

    def write_trace(self, path):
        return write_csv(path, ["parameter", "value"], self.probe_values)


def _fit_slope(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 2 or np.ptp(x) == 0:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def _tail(n, th):
    return max(2, min(th.block, n // 2))


def bounded_verdict(name, params, values, scale, th=DEFAULT_THRESHOLDS, notes=()):
    """Is ``limsup values`` finite along a ladder?

    ``scale`` is the logarithmic scale variable of each rung (``log(1/eps)`` or ``log R``).
    Holds-like when the max over the last block is within ``plateau`` of the max over the
    previous block; fails-like when values are non-decreasing, break the plateau and grow
    faster than ``growth_per_decade`` per decade of scale.
    """
    values = np.asarray(values, float)
    scale = np.asarray(scale, float)
    notes = list(notes)
    if not np.all(np.isfinite(values)):
        return CriterionVerdict(name, FAILS, list(zip(params, values)), None,
                                notes + ["non-finite probe value"])
    b = _tail(len(values), th)
    last, prev = values[-b:], values[-2 * b:-b]
    rate = _fit_slope(scale[-2 * b:], np.log(np.maximum(values[-2 * b:], 1e-300)))
    per_decade = math.exp(rate * math.log(10.0)) if math.isfinite(rate) else float("nan")
    if last.max() <= th.zero_tol or last.max() <= th.plateau * prev.max():
        v = HOLDS
    elif np.all(np.diff(values[-2 * b:]) >= 0) and per_decade > th.growth_per_decade:
        # non-decreasing (step-like growth allowed) and clearly growing
        v = FAILS
    else:
        v = INCONCLUSIVE
    notes.append(f"growth factor per decade {per_decade:.4g}")
    return CriterionVerdict(name, v, list(zip(params, values)), rate, notes)


def decay_verdict(name, params, values, scale, th=DEFAULT_THRESHOLDS, floors=None, notes=()):
    """Do ``values`` tend to zero along the ladder?

    ``scale`` must be positive and increasing (e.g. ``log(1/|z|)``). A power-law decay
    in the original variable shows up as a factor ``>= decade_factor`` per decade;
    logarithmic decay as a negative slope of ``log value`` against ``log scale``.
    When closed-form ``floors`` are known the verdict compares against them instead.
    """
    values = np.asarray(values, float)
    scale = np.asarray(scale, float)
    notes = list(notes)
    pv = list(zip(params, values))
    if not np.all(np.isfinite(values)):
        return CriterionVerdict(name, FAILS, pv, None, notes + ["non-finite probe value"])
    b = _tail(len(values), th)
    tail_v, tail_s = values[-2 * b:], scale[-2 * b:]
    if np.all(values[-b:] <= th.zero_tol):
        return CriterionVerdict(name, HOLDS, pv, None, notes + ["identically zero at tolerance"])
    if floors is not None:
        floors = np.asarray(floors, float)
        fv = decay_verdict(name, params, floors, scale, th)
        ok = values[-1] <= 10 * floors[-1] + th.zero_tol
        v = HOLDS if (fv.holds and ok) else (FAILS if fv.fails else INCONCLUSIVE)
        notes.append(f"compared against closed-form floor {floors[-1]:.6g}")
        return CriterionVerdict(name, v, pv, fv.fitted_slope, notes, {"floors": floors.tolist()})
    pos = tail_v > 0
    logv = np.log(np.where(pos, tail_v, th.zero_tol))
    rate = _fit_slope(tail_s, logv)
    per_decade = math.exp(-rate * math.log(10.0)) if math.isfinite(rate) else float("nan")
    slope = _fit_slope(np.log(tail_s), logv)
    if per_decade >= th.decade_factor and values[-1] < values[-2 * b]:
        v = HOLDS
    elif slope <= th.decay_slope and values[-1] < values[-2 * b]:
        v = HOLDS
    elif slope >= th.plateau_slope:
        v = FAILS
    else:
        v = INCONCLUSIVE
    notes.append(f"decay factor per decade {per_decade:.4g}, log-log slope {slope:.4g}")
    return CriterionVerdict(name, v, pv, slope, notes)


def divergence_verdict(name, params, values, scale, th=DEFAULT_THRESHOLDS, notes=()):
    """Does the monotone quantity ``values`` diverge to +infinity along the ladder?

    Increments ``dF`` per unit of the log-scale ``t`` are fitted as ``t**(-p)`` over the
    last half of the ladder. ``p <= 1`` is the divergent (harmonic or slower) regime,
    ``p > 1`` and geometric decay are convergent.
    """
    values = np.asarray(values, float)
    scale = np.asarray(scale, float)
    notes = list(notes)
    pv = list(zip(params, values))
    if not np.all(np.isfinite(values)):
        return CriterionVerdict(name, FAILS, pv, None, notes + ["non-finite probe value"])
    half = max(3, len(values) // 2)
    v_t, s_t = values[-half - 1:], scale[-half - 1:]
    d = np.diff(v_t) / np.diff(s_t)
    mid = 0.5 * (s_t[1:] + s_t[:-1])
    # increments are compared with the local magnitude of the probe, per step
    tol = th.zero_tol * np.maximum(1.0, np.abs(v_t[1:])) / np.diff(s_t)
    if np.all(np.abs(d) <= tol):
        return CriterionVerdict(name, FAILS, pv, None, notes + ["probe is flat: converged"])
    if np.sum(d > tol) < len(d):
        v = FAILS if np.sum(d > tol) <= len(d) // 2 else INCONCLUSIVE
        return CriterionVerdict(name, v, pv, None, notes + ["probe not monotone increasing"])
    p = -_fit_slope(np.log(mid), np.log(d))
    if p <= th.divergent_exponent:
        v = HOLDS
    elif p >= th.convergent_exponent:
        v = FAILS
    else:
        v = INCONCLUSIVE
    notes.append(f"increment decay exponent {p:.4g}")
    return CriterionVerdict(name, v, pv, p, notes)


def limit_verdict(name, params, values, target, tol, notes=()):
    """Is the last probe value within ``tol`` of ``target``?"""
    values = np.asarray(values, float)
    pv = list(zip(params, values))
    dist = abs(values[-1] - target)
    v = HOLDS if np.isfinite(dist) and dist <= tol else FAILS
    return CriterionVerdict(name, v, pv, None,
                            list(notes) + [f"final distance to {target} is {dist:.3e} (tol {tol})"],
                            {"limit_estimate": float(values[-1]), "target": target})
