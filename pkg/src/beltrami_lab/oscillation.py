"""Mean-oscillation functionals of scalar fields: disk averages, BMO/FMO/VMO probes,
maximal dispersion and the explicit log-log integral bound for FMO functions at the origin.

Scalar fields are plain callables taking a complex ndarray and returning a real ndarray.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import quadrature as quad
from .errors import DomainError
from .verdict import (DEFAULT_THRESHOLDS, FAILS, CriterionVerdict, Thresholds, bounded_verdict,
                      decay_verdict)

DEFAULT_SAMPLES = 128
MIN_SAMPLES = 64
OVERFLOW = 1e300


@dataclass
class DiskQuadrature:
    """Midpoint-rule disk average with the share contributed by the cells touching the centre."""

    mean: float
    core_share: float
    cells: int
    flagged: bool = False


def _disk_values(phi, z0, eps, samples):
    if not eps > 0:
        raise DomainError("disk radius must be positive")
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples per side")
    pts, _ = quad.disk_midpoint(complex(z0), eps, samples)
    vals = np.asarray(phi(pts), float)
    return pts, vals


def disk_quadrature(phi: Callable, z0, eps, samples=DEFAULT_SAMPLES) -> DiskQuadrature:
    pts, vals = _disk_values(phi, z0, eps, samples)
    h = 2.0 * eps / (samples + samples % 2)
    core = np.abs(pts - z0) < h
    total = float(np.sum(vals))
    flagged = not math.isfinite(total) or abs(total) > OVERFLOW
    mean = total / vals.size
    share = float(np.sum(vals[core]) / total) if total else 0.0
    return DiskQuadrature(mean, share, int(vals.size), flagged)


def disk_mean(phi: Callable, z0, eps, samples=DEFAULT_SAMPLES) -> float:
    """Average of ``phi`` over the disk ``|z - z0| < eps``.

    Uses the midpoint rule on ``samples x samples`` cells of the bounding square masked to
    the disk and normalised by the masked area, so constants are reproduced exactly and
    ``z0`` itself is never a node.
    """
    return disk_quadrature(phi, z0, eps, samples).mean


def mean_oscillation(phi: Callable, z0, eps, samples=DEFAULT_SAMPLES) -> float:
    """Average of ``|phi - phi_avg|`` over the disk, ``phi_avg`` being the disk mean."""
    _, vals = _disk_values(phi, z0, eps, samples)
    return float(np.mean(np.abs(vals - np.mean(vals))))


# ---------------------------------------------------------------------------- disk families


_STENCIL = (0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j)


@dataclass(frozen=True)
class DiskFamily:
    """Disks ``(center, radius)`` inside a region disk ``|z - region_center| <= region_radius``."""

    disks: tuple
    policy: str
    region_center: complex = 0j
    region_radius: float = 1.0

    def __post_init__(self):
        if not self.disks:
            raise ValueError("disk family is empty")
        for c, r in self.disks:
            if r <= 0:
                raise ValueError("disk radii must be positive")
            if abs(c - self.region_center) + r > self.region_radius * (1 + 1e-12):
                raise ValueError(f"disk ({c}, {r}) leaves the region")

    def __len__(self):
        return len(self.disks)

    @classmethod
    def dyadic(cls, levels=8, region_center=0j, region_radius=1.0, focus=None):
        """Radii ``R 2^-j`` (j = 1..levels); at each level a 3x3 stencil of centres spaced
        by the radius around ``focus`` (default: the region centre), clipped to the region."""
        region_center = complex(region_center)
        focus = region_center if focus is None else complex(focus)
        disks = []
        for j in range(1, levels + 1):
            r = region_radius * 2.0 ** -j
            for s in _STENCIL:
                c = focus + r * s
                if abs(c - region_center) + r <= region_radius:
                    disks.append((c, r))
        return cls(tuple(disks), f"dyadic(levels={levels})", region_center, region_radius)

    @classmethod
    def random(cls, count=64, seed=0, region_center=0j, region_radius=1.0, min_radius=1e-4):
        """Log-uniform radii and uniform centres (reproducible from ``seed``)."""
        rng = np.random.default_rng(seed)
        region_center = complex(region_center)
        disks = []
        for _ in range(count):
            r = region_radius * math.exp(rng.uniform(math.log(min_radius), math.log(0.5)))
            rho = (region_radius - r) * math.sqrt(rng.uniform())
            c = region_center + rho * complex(math.cos(t := rng.uniform(0, 2 * math.pi)),
                                              math.sin(t))
            disks.append((c, r))
        return cls(tuple(disks), f"random(count={count}, seed={seed})", region_center,
                   region_radius)


@dataclass
class OscillationReport:
    """Per-disk statistics of a BMO estimate together with the running supremum."""

    family_policy: str
    disks: list
    means: list
    oscillations: list
    running_sup: list
    argmax: int
    dispersion: Optional[list] = None
    verdict: Optional[CriterionVerdict] = None
    thresholds: dict = field(default_factory=dict)

    @property
    def estimate(self) -> float:
        return self.running_sup[-1]

    def to_dict(self):
        return {
            "family_policy": self.family_policy,
            "estimate": self.estimate,
            "argmax_disk": {"center": self.disks[self.argmax][0],
                            "radius": self.disks[self.argmax][1]},
            "disks": [{"center": c, "radius": r, "mean": m, "oscillation": o, "running_sup": s}
                      for (c, r), m, o, s in zip(self.disks, self.means, self.oscillations,
                                                 self.running_sup)],
            "dispersion": self.dispersion,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "thresholds": self.thresholds,
        }


def bmo_norm_estimate(phi: Callable, region=(0j, 1.0), family: Optional[DiskFamily] = None,
                      samples=DEFAULT_SAMPLES) -> OscillationReport:
    """Supremum of the mean oscillation over a disk family; a lower bound for the BMO norm."""
    center, radius = complex(region[0]), float(region[1])
    if family is None:
        family = DiskFamily.dyadic(8, center, radius)
    if (abs(family.region_center - center) + family.region_radius > radius * (1 + 1e-12)):
        raise ValueError("disk family is not contained in the region")
    means, oscs = [], []
    for c, r in family.disks:
        _, vals = _disk_values(phi, c, r, samples)
        mu = float(np.mean(vals))
        means.append(mu)
        oscs.append(float(np.mean(np.abs(vals - mu))))
    running = np.maximum.accumulate(oscs).tolist()
    return OscillationReport(family.policy, list(family.disks), means, oscs, running,
                             int(np.argmax(oscs)))


def dispersion_ladder(phi: Callable, z0, r0, depth=12, samples=DEFAULT_SAMPLES):
    """Radii ``r0 2^-j`` (j = 0..depth-1) and the mean oscillation on each."""
    if not r0 > 0:
        raise DomainError("r0 must be positive")
    radii = r0 * 2.0 ** -np.arange(depth)
    return radii, np.array([mean_oscillation(phi, z0, r, samples) for r in radii])


def maximal_dispersion(phi: Callable, z0, r0, depth=12, samples=DEFAULT_SAMPLES) -> float:
    """Supremum of the mean oscillation over the geometric radius ladder below ``r0``."""
    return float(np.max(dispersion_ladder(phi, z0, r0, depth, samples)[1]))


def _eps_ladder(r0, rungs):
    eps = r0 * 2.0 ** -np.arange(rungs)
    return eps, np.log(1.0 / eps)


def fmo_test(phi: Callable, z0, r0=0.5, rungs=20, samples=DEFAULT_SAMPLES,
             th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Is the dyadic mean-oscillation sequence at ``z0`` bounded?"""
    coarse = disk_quadrature(phi, z0, r0, samples)
    if coarse.flagged or not math.isfinite(coarse.mean):
        return CriterionVerdict("fmo", FAILS, [(r0, math.inf)], None,
                                ["coarse disk mean is not finite: not integrable near the point"])
    eps, scale = _eps_ladder(r0, rungs)
    vals = [mean_oscillation(phi, z0, e, samples) for e in eps]
    return bounded_verdict("fmo", eps, vals, scale, th)


def lebesgue_point_test(phi: Callable, z0, r0=0.5, rungs=20, samples=DEFAULT_SAMPLES,
                        th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Does the disk average of ``|phi - phi(z0)|`` tend to zero?"""
    v0 = float(np.asarray(phi(np.asarray([complex(z0)])), float)[0])
    if not math.isfinite(v0):
        raise DomainError("phi(z0) is not finite")
    eps, scale = _eps_ladder(r0, rungs)
    vals = []
    for e in eps:
        _, v = _disk_values(phi, z0, e, samples)
        vals.append(float(np.mean(np.abs(v - v0))))
    return decay_verdict("lebesgue_point", eps, vals, scale + 1.0, th)


def vmo_test(phi: Callable, region=(0j, 1.0), levels=12, seed=0, per_level=8,
             samples=DEFAULT_SAMPLES, th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Does the supremum of mean oscillations over disks of radius ``r`` vanish as ``r -> 0``?

    At each dyadic radius the supremum runs over the stencil around the region centre plus
    ``per_level`` random centres. Thresholds are those of the decay probes.
    """
    center, R = complex(region[0]), float(region[1])
    rng = np.random.default_rng(seed)
    radii, sups = [], []
    for j in range(1, levels + 1):
        r = R * 2.0 ** -j
        centres = [center + r * s for s in _STENCIL]
        for _ in range(per_level):
            rho = (R - r) * math.sqrt(rng.uniform())
            t = rng.uniform(0, 2 * math.pi)
            centres.append(center + rho * complex(math.cos(t), math.sin(t)))
        centres = [c for c in centres if abs(c - center) + r <= R]
        radii.append(r)
        sups.append(max(mean_oscillation(phi, c, r, samples) for c in centres))
    radii = np.asarray(radii)
    return decay_verdict("vmo", radii, sups, np.log(1.0 / radii) + 1.0, th,
                         notes=["VMO probe: extrapolation from a sampled family"])


# ---------------------------------------------------------------------------- log-log bound


@dataclass
class FmoBoundReport:
    phi0: float
    d0: float
    C: float
    eps: list
    lhs: list
    rhs: list
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"phi0": self.phi0, "d0": self.d0, "C": self.C, "passed": self.passed,
                "rows": [{"eps": e, "lhs": l, "rhs": r} for e, l, r in
                         zip(self.eps, self.lhs, self.rhs)],
                "violations": self.violations}


def default_bound_ladder(count=10):
    """``eps = 2^-j / 4`` for ``j = 1..count``."""
    return 0.25 * 2.0 ** -np.arange(1, count + 1)


def fmo_bound_check(phi: Callable, eps_ladder=None, depth=12, samples=DEFAULT_SAMPLES,
                    m=256) -> FmoBoundReport:
    """Check ``int_{eps<|z|<1/2} phi / (|z| log2(1/|z|))^2 dm <= C log2 log2 (1/eps)``.

    ``C = 4 pi (phi0 + 6 d0)`` with ``phi0`` the mean of ``phi`` over ``|z| < 1/2`` and
    ``d0`` its maximal dispersion there. The annulus integral is computed once per panel
    and accumulated across the ladder.
    """
    eps = np.sort(np.asarray(default_bound_ladder() if eps_ladder is None else eps_ladder,
                             float))[::-1]
    if np.any(eps <= 0) or np.any(eps >= 0.25):
        raise DomainError("ladder values must lie in (0, 1/4)")
    phi0 = disk_mean(phi, 0j, 0.5, samples)
    d0 = maximal_dispersion(phi, 0j, 0.5, depth, samples)
    C = 4.0 * math.pi * (phi0 + 6.0 * d0)

    def weight(z):
        r = np.abs(z)
        return np.asarray(phi(z), float) / (r * np.log2(1.0 / r)) ** 2

    ladder = np.concatenate([[0.5], eps])
    r, w, idx = quad.ladder_panels(ladder)
    cm = quad.circle_means(weight, 0j, r, m)
    per_panel = np.bincount(idx, weights=2.0 * np.pi * r * cm * w, minlength=len(eps))
    lhs = np.cumsum(per_panel)
    rhs = C * np.log2(np.log2(1.0 / eps))
    viol = [{"eps": float(e), "lhs": float(a), "rhs": float(b)}
            for e, a, b in zip(eps, lhs, rhs) if not a <= b]
    return FmoBoundReport(phi0, d0, C, eps.tolist(), lhs.tolist(), rhs.tolist(), viol)


def _radius(z, p):
    return np.abs(np.asarray(z, complex) - complex(p.get("re", 0.0), p.get("im", 0.0)))


def _safe_log_inv(r):
    with np.errstate(divide="ignore"):
        return np.log(1.0 / r)


SCALAR_FUNCTIONS = {
    "one": lambda z, p: np.full(np.shape(z), float(p.get("c", 1.0))),
    "log": lambda z, p: np.maximum(_safe_log_inv(_radius(z, p)), 0.0)
    if p.get("plus") in ("true", 1.0) else _safe_log_inv(_radius(z, p)),
    "log2": lambda z, p: np.maximum(_safe_log_inv(_radius(z, p)), 0.0) ** 2,
    "inv": lambda z, p: 1.0 / _radius(z, p),
    "half-plane": lambda z, p: (np.real(z) > 0).astype(float),
    "re": lambda z, p: np.real(np.asarray(z, complex)),
}


def scalar_from_key(key: str) -> Callable:
    """Scalar test function from a key such as ``"log"`` or ``"one:c=2"``.

    ``log``, ``log2`` and ``inv`` are centred at ``re + i im`` (default 0); ``log`` takes
    ``plus=true`` for the positive part.
    """
    from .core import parse_key
    name, params = parse_key(key)
    if name not in SCALAR_FUNCTIONS:
        raise ValueError(f"unknown scalar function {name!r}; known: {sorted(SCALAR_FUNCTIONS)}")
    fn = SCALAR_FUNCTIONS[name]

    def phi(z):
        return np.asarray(fn(np.asarray(z, complex), params), float)

    phi.key = key
    return phi
