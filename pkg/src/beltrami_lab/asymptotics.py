"""Scale profiles of mappings near 0 or infinity: asymptotic homogeneity, circle distortion,
logarithmic ratio, Belinskij's A-ratio, sparseness of sets and the chordal distortion bound.

A profile evaluates an error quantity on a dyadic ladder of scales and decides with the
decay rule of :mod:`beltrami_lab.verdict`. Closed-form mappings also supply the exact error
at each scale (their "floor"), which the verdict uses instead of the generic rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._json import write_csv
from .core import RADIAL_PROFILES, is_infinity, parse_key, spherical_distance_array
from .errors import DomainError
from .oscillation import disk_mean, maximal_dispersion
from .solver import Mapping
from .verdict import (DEFAULT_THRESHOLDS, CriterionVerdict, Thresholds, bounded_verdict,
                      decay_verdict)

DIRECTIONS = 16
TRUST_CELLS = 4.0


# ---------------------------------------------------------------------------- mappings


class EvaluableMapping:
    """A mapping that can be evaluated at complex points.

    ``func`` is vectorised. ``radius`` bounds the disk on which a closed form is valid
    (queries beyond raise :class:`DomainError`). Grid-backed mappings carry the
    :class:`~beltrami_lab.solver.Mapping` and refuse queries outside the grid or inside the
    trust radius around the grid centre.
    """

    def __init__(self, name, func: Callable, params=None, radius=math.inf, mapping=None,
                 trust_radius=0.0, floors=None):
        self.name = name
        self.func = func
        self.params = dict(params or {})
        self.radius = radius
        self.mapping = mapping
        self.trust_radius = trust_radius
        self.floors = floors  # optional object with closed-form error rates

    @property
    def kind(self):
        return "grid" if self.mapping is not None else "closed-form"

    @property
    def key(self):
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    def __repr__(self):
        return f"EvaluableMapping({self.key!r})"

    def evaluate(self, z):
        z_in = z
        z = np.asarray(z, complex)
        if np.any(np.abs(z) > self.radius):
            raise DomainError(f"{self.key} is only defined for |z| <= {self.radius}")
        out = np.asarray(self.func(np.atleast_1d(z)), complex).reshape(z.shape)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"{self.key} is not finite at a query point")
        return out.item() if np.ndim(z_in) == 0 else out

    __call__ = evaluate

    def inverted(self) -> "EvaluableMapping":
        """``1 / f(1/z)``, which moves the behaviour at infinity to the origin."""
        inner = self

        def func(z):
            out = np.zeros_like(z)
            nz = z != 0
            out[nz] = 1.0 / inner.evaluate(1.0 / z[nz])
            return out

        if math.isfinite(self.radius):
            raise DomainError("only mappings defined near infinity can be inverted")
        return EvaluableMapping(f"inverted[{self.key}]", func)

    @classmethod
    def from_mapping(cls, m: Mapping, name="grid", trust_cells=TRUST_CELLS):
        return cls(name, m.evaluate, {}, math.inf, mapping=m,
                   trust_radius=trust_cells * m.grid.spacing)

    def usable(self, z) -> np.ndarray:
        """Mask of query points the mapping can answer reliably."""
        z = np.asarray(z, complex)
        ok = np.abs(z) <= self.radius
        if self.mapping is not None:
            ok &= self.mapping.grid.contains(z)
            ok &= (np.abs(z - self.mapping.grid.center) >= self.trust_radius) | (z == 0)
        return ok


def _log_abs(z):
    return np.log(np.abs(z))


def identity_mapping():
    return EvaluableMapping("identity", lambda z: z.copy(), floors=_Floors("identity"))


def radial_stretch_mapping(k=2.0, support=math.inf):
    def func(z):
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = np.where(r > 0, z * r ** (k - 1.0), 0.0)
        return np.where(r <= support, inside, z) if math.isfinite(support) else inside
    params = {"k": k} if math.isinf(support) else {"k": k, "support": support}
    return EvaluableMapping("radial-stretch", func, params,
                            floors=_Floors("radial-stretch", k=k) if math.isinf(support) else None)


def shabat_mapping():
    def func(z):
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = z * (1.0 - np.log(np.where(r > 0, r, 1.0)))
        return np.where(r > 0, out, 0.0)
    return EvaluableMapping("shabat", func, radius=1.0, floors=_Floors("shabat"))


def log_spiral_mapping():
    def func(z):
        r = np.abs(z)
        rr = np.where(r > 0, r, 1.0)
        return np.where(r > 0, z * np.exp(1j * np.sqrt(np.maximum(-np.log(rr), 0.0))), 0.0)
    return EvaluableMapping("log-spiral", func, radius=1.0, floors=_Floors("log-spiral"))


def affine_mapping(mu0):
    mu0 = complex(mu0)
    if abs(mu0) >= 1:
        raise DomainError("|mu0| must be < 1")
    return EvaluableMapping("affine", lambda z: z + mu0 * np.conj(z),
                            {"re": mu0.real, "im": mu0.imag})


def radial_profile_mapping(profile="log", sign=1.0, support=None, **extra):
    """``f(z) = (z/|z|) rho(|z|)`` whose Beltrami coefficient is the radial-profile field.

    ``d log rho / d log r`` equals ``K(r)`` (``sign = +1``) or ``1/K(r)`` (``sign = -1``),
    with ``K = 1`` outside ``support`` and ``rho(1) = 1``.
    """
    if profile not in RADIAL_PROFILES:
        raise ValueError(f"unknown radial profile {profile!r}")
    from .core import _default_profile_support
    p = dict(extra)
    s = _default_profile_support(profile, p) if support is None else float(support)
    K = RADIAL_PROFILES[profile]

    def G(r):
        k = float(K(np.asarray(r, float), p)) if r <= s else 1.0
        return k if sign > 0 else 1.0 / k

    @lru_cache(maxsize=None)
    def log_rho(r):
        if r == 1.0:
            return 0.0
        a, b = sorted((0.0, math.log(r)))
        pts = [math.log(s)] if math.isfinite(s) and a < math.log(s) < b else None
        val, _ = integrate.quad(lambda u: G(math.exp(u)), a, b, points=pts, limit=400,
                                epsabs=1e-13, epsrel=1e-13)
        return val if r > 1.0 else -val

    closed = _radial_closed_form(profile, sign, s)

    def func(z):
        r = np.abs(z)
        out = np.zeros_like(z)
        nz = r > 0
        rr = r[nz]
        if closed is not None:
            lr = closed(rr)
        else:
            uniq, inv = np.unique(rr, return_inverse=True)
            lr = np.array([log_rho(float(x)) for x in uniq])[inv]
        out[nz] = z[nz] / rr * np.exp(lr)
        return out

    params = dict(p, profile=profile, sign=float(sign))
    return EvaluableMapping("radial-profile", func, params)


def _radial_closed_form(profile, sign, s):
    """Exact ``log rho`` for the logarithmic profiles supported in the unit disk."""
    if s != 1.0 or profile not in ("log", "log2"):
        return None

    def lr(r):
        L = np.log(1.0 / r)
        inside = r < 1.0
        Lp = np.where(inside, L, 0.0)
        if profile == "log":
            g = Lp + Lp ** 2 / 2 if sign > 0 else np.log1p(Lp)
        else:
            g = Lp + Lp ** 3 / 3 if sign > 0 else np.arctan(Lp)
        return np.where(inside, -g, np.log(r))

    return lr


BUILTIN_MAPPINGS = {
    "identity": identity_mapping,
    "radial-stretch": radial_stretch_mapping,
    "shabat": shabat_mapping,
    "log-spiral": log_spiral_mapping,
    "affine": lambda re=0.0, im=0.0: affine_mapping(complex(re, im)),
    "radial-profile": radial_profile_mapping,
}


def _radially_extended(base: EvaluableMapping, support: float) -> EvaluableMapping:
    """Continue a radially structured map ``f(r e^{it}) = e^{it} f(r)`` conformally past
    ``|z| = support`` (as ``z f(support)/support``) and normalise so that ``f(1) = 1``."""
    if not math.isfinite(support):
        return base
    slope = complex(base.evaluate(support)) / support
    norm = complex(base.evaluate(1.0)) if support >= 1.0 else slope

    def func(z):
        r = np.abs(z)
        inside = r <= support
        out = z * slope
        if np.any(inside):
            out[inside] = base.evaluate(z[inside])
        return out / norm

    return EvaluableMapping(base.name, func, dict(base.params, support=support),
                            floors=base.floors)


def closed_form_for_field(field) -> EvaluableMapping:
    """Normalised (``f(0) = 0``, ``f(1) = 1``) closed-form solution for a built-in coefficient.

    Raises ``ValueError`` when the coefficient has no closed-form solution here.
    """
    name, p = field.name, field.params
    s = field.support_radius
    if name == "zero":
        return identity_mapping()
    if name == "radial-stretch":
        k = float(p.get("k", 2.0))
        m = _radially_extended(radial_stretch_mapping(k), s)
        m.floors = _Floors("radial-stretch", k=k)
        return m
    if name == "shabat":
        return _radially_extended(shabat_mapping(), s)
    if name == "log-spiral":
        return _radially_extended(log_spiral_mapping(), s)
    if name == "radial-profile":
        extra = {k: v for k, v in p.items() if k not in ("profile", "sign", "support")}
        return radial_profile_mapping(p.get("profile", "log"), float(p.get("sign", 1.0)), s, **extra)
    raise ValueError(f"no closed-form solution for coefficient {field.key!r}")


def mapping_from_key(key: str) -> EvaluableMapping:
    """Closed-form mapping from a key such as ``"radial-stretch:k=2"``."""
    name, params = parse_key(key)
    if name not in BUILTIN_MAPPINGS:
        raise ValueError(f"unknown built-in mapping {name!r}; known: {sorted(BUILTIN_MAPPINGS)}")
    return BUILTIN_MAPPINGS[name](**params)


# ---------------------------------------------------------------------------- closed-form rates


class _Floors:
    """Exact values of the profile errors of the closed-form built-ins."""

    def __init__(self, name, k=2.0):
        self.name = name
        self.k = k

    def homogeneity(self, zeta, r):
        a = np.abs(zeta)
        if self.name == "identity":
            return 0.0
        if self.name == "radial-stretch":
            return self._stretch(a)
        L = math.log(1.0 / r)
        nz = a > 0
        if self.name == "shabat":
            return float(np.max(a[nz] * np.abs(np.log(a[nz]))) / (1.0 + L)) if nz.any() else 0.0
        if self.name == "log-spiral":
            d = np.sqrt(L - np.log(a[nz])) - math.sqrt(L)
            return float(np.max(a[nz] * np.abs(np.exp(1j * d) - 1.0))) if nz.any() else 0.0
        return None

    def _stretch(self, a):
        # |zeta| * | |zeta|^(k-1) - 1 |, which tends to 0 at zeta = 0 for every k > 0
        nz = a > 0
        return float(np.max(a[nz] * np.abs(a[nz] ** (self.k - 1.0) - 1.0))) if nz.any() else 0.0

    def angle(self, zeta, r):
        a = np.abs(zeta)
        nz = a > 0
        if self.name == "log-spiral":
            L = math.log(1.0 / r)
            return float(np.max(np.abs(np.sqrt(L - np.log(a[nz])) - math.sqrt(L))))
        return 0.0 if self.name in ("identity", "shabat", "radial-stretch") else None

    def modulus(self, zeta, r):
        a = np.abs(zeta)
        if self.name in ("identity", "log-spiral"):
            return 0.0
        if self.name == "radial-stretch":
            return self._stretch(a)
        if self.name == "shabat":
            nz = a > 0
            return float(np.max(a[nz] * np.abs(np.log(a[nz]))) / (1.0 + math.log(1.0 / r)))
        return None

    def log_ratio(self, r):
        L = math.log(1.0 / r)
        if self.name in ("identity", "log-spiral"):
            return 0.0
        if self.name == "radial-stretch":
            return abs(self.k - 1.0)
        if self.name == "shabat":
            return math.log1p(L) / L
        return None


# ---------------------------------------------------------------------------- profiles


@dataclass
class ScaleProfile:
    """Errors of a limit relation on a ladder of scales, with its verdict."""

    name: str
    direction: str
    scales: list
    errors: list
    verdict: CriterionVerdict
    values: Optional[list] = None
    floors: Optional[list] = None
    trust_horizon: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "direction": self.direction, "scales": self.scales,
                "errors": self.errors, "values": self.values, "floors": self.floors,
                "trust_horizon": self.trust_horizon, "verdict": self.verdict.to_dict(),
                "extra": self.extra}

    def write_csv(self, path):
        return write_csv(path, ["scale", "error"], zip(self.scales, self.errors))


def default_zeta_set():
    """64 points of ``|zeta| <= 2``: 0, 1, 2, -2 and 15 points on each of four circles."""
    ang = 2.0 * np.pi * (np.arange(15) + 0.5) / 15
    rings = [r * np.exp(1j * ang) for r in (0.5, 1.0, 1.5, 2.0)]
    return np.concatenate([[0, 1, 2, -2], *rings]).astype(complex)


def default_scales(direction, rungs=19, start=2):
    """Dyadic ladder ``2^-j`` (to-zero) or ``2^j`` (to-infinity), ``j = start .. start+rungs-1``."""
    j = np.arange(start, start + rungs, dtype=float)
    if direction == "to-zero":
        return 2.0 ** -j
    if direction == "to-infinity":
        return 2.0 ** j
    raise ValueError(f"unknown direction {direction!r}")


def _scale_variable(scales, direction):
    s = np.log(1.0 / scales) if direction == "to-zero" else np.log(scales)
    lo = float(np.min(s))
    return s if lo >= 0.5 else s + (1.0 - lo)


def _directions(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def _prepare_scales(f: EvaluableMapping, scales, direction, probe_factors):
    """Keep scales at which every probe point ``scale * factor`` is usable (grid horizon)."""
    scales = np.asarray(default_scales(direction) if scales is None else scales, float)
    if direction == "to-zero" and np.any(np.diff(scales) >= 0):
        raise ValueError("to-zero scales must decrease")
    if direction == "to-infinity" and np.any(np.diff(scales) <= 0):
        raise ValueError("to-infinity scales must increase")
    if f.mapping is None:
        return scales, None
    probe_factors = np.asarray(probe_factors, complex)
    keep = [s for s in scales if np.all(f.usable(s * probe_factors))]
    if len(keep) < 4:
        raise DomainError("fewer than four scales lie inside the trusted part of the grid")
    return np.asarray(keep), float(keep[-1])


def _verdict(name, scales, errors, direction, floors, th):
    errors = np.asarray(errors, float)
    if not np.all(np.isfinite(errors)):
        raise DomainError("profile errors must be finite")
    fl = None
    if floors is not None and all(x is not None for x in floors):
        fl = np.asarray(floors, float)
    return decay_verdict(name, scales, errors, _scale_variable(scales, direction), th, floors=fl)


def _safe_ratio(num, den):
    if np.any(den == 0):
        raise DomainError("f(z) = 0 at a probe point")
    # complex division of equal operands can be off by an ulp; x / x is exactly 1
    return np.where(num == den, 1.0 + 0j, num / den)


def _homogeneity_errors(f, zeta, scales, dirs):
    """``|f(zeta z)/f(z) - zeta|`` for every scale, direction and zeta: shape (S, D, Z)."""
    z = scales[:, None] * dirs[None, :]
    fz = f.evaluate(z)
    fzz = f.evaluate(z[:, :, None] * zeta[None, None, :])
    ratio = _safe_ratio(fzz, fz[:, :, None])
    return np.abs(ratio - zeta[None, None, :]), ratio


def homogeneity_profile(f: EvaluableMapping, zeta=None, direction="to-zero", scales=None,
                        directions=DIRECTIONS, th: Thresholds = DEFAULT_THRESHOLDS) -> ScaleProfile:
    """Max over ``zeta`` and ``arg z`` of ``|f(zeta z)/f(z) - zeta|`` at each ``|z|``."""
    zeta = default_zeta_set() if zeta is None else np.asarray(zeta, complex)
    dirs = _directions(directions)
    factors = np.concatenate([dirs, (dirs[:, None] * zeta[None, :]).ravel()])
    scales, horizon = _prepare_scales(f, scales, direction, factors)
    err, _ = _homogeneity_errors(f, zeta, scales, dirs)
    errors = err.max(axis=(1, 2))
    floors = None
    if f.floors is not None and direction == "to-zero":
        floors = [f.floors.homogeneity(zeta, s) for s in scales]
    v = _verdict("homogeneity", scales, errors, direction, floors, th)
    per_zeta = err.max(axis=1)
    return ScaleProfile("homogeneity", direction, scales.tolist(), errors.tolist(), v,
                        floors=floors, trust_horizon=horizon,
                        extra={"per_zeta_last": per_zeta[-1].tolist(),
                               "zeta": zeta.tolist()})


def lavrentiev_ratio(f: EvaluableMapping, direction="to-zero", scales=None, m=64,
                     th: Thresholds = DEFAULT_THRESHOLDS) -> ScaleProfile:
    """``max |f| / min |f|`` on circles ``|z| = scale``; the error is ``ratio - 1``."""
    dirs = _directions(m)
    scales, horizon = _prepare_scales(f, scales, direction, dirs)
    a = np.abs(f.evaluate(scales[:, None] * dirs[None, :]))
    if np.any(a == 0):
        raise DomainError("f vanishes on a probe circle")
    ratio = a.max(axis=1) / a.min(axis=1)
    errors = ratio - 1.0
    floors = [0.0] * len(scales) if (f.floors is not None and f.floors.name in
                                      ("identity", "radial-stretch", "log-spiral", "shabat")) else None
    v = _verdict("lavrentiev", scales, errors, direction, floors, th)
    return ScaleProfile("lavrentiev", direction, scales.tolist(), errors.tolist(), v,
                        values=ratio.tolist(), floors=floors, trust_horizon=horizon)


def _wrap_angle(x):
    """Map angles into ``(-pi, pi]``."""
    y = np.mod(x + np.pi, 2.0 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


def angle_modulus_profiles(f: EvaluableMapping, zeta=None, direction="to-zero", scales=None,
                           directions=DIRECTIONS, th: Thresholds = DEFAULT_THRESHOLDS):
    """Separate profiles of ``arg(f(zeta z)/f(z)) - arg zeta`` and ``|f(zeta z)|/|f(z)| - |zeta|``."""
    zeta = default_zeta_set() if zeta is None else np.asarray(zeta, complex)
    zeta = zeta[zeta != 0]
    dirs = _directions(directions)
    factors = np.concatenate([dirs, (dirs[:, None] * zeta[None, :]).ravel()])
    scales, horizon = _prepare_scales(f, scales, direction, factors)
    _, ratio = _homogeneity_errors(f, zeta, scales, dirs)
    ang = np.abs(_wrap_angle(np.angle(ratio) - np.angle(zeta)[None, None, :])).max(axis=(1, 2))
    mod = np.abs(np.abs(ratio) - np.abs(zeta)[None, None, :]).max(axis=(1, 2))
    fl_a = fl_m = None
    if f.floors is not None and direction == "to-zero":
        fl_a = [f.floors.angle(zeta, s) for s in scales]
        fl_m = [f.floors.modulus(zeta, s) for s in scales]
    va = _verdict("angle", scales, ang, direction, fl_a, th)
    vm = _verdict("modulus", scales, mod, direction, fl_m, th)
    return (ScaleProfile("angle", direction, scales.tolist(), ang.tolist(), va, floors=fl_a,
                         trust_horizon=horizon),
            ScaleProfile("modulus", direction, scales.tolist(), mod.tolist(), vm, floors=fl_m,
                         trust_horizon=horizon))


def log_ratio_profile(f: EvaluableMapping, direction="to-zero", scales=None,
                      directions=DIRECTIONS, th: Thresholds = DEFAULT_THRESHOLDS) -> ScaleProfile:
    """Max over ``arg z`` of ``|ln|f(z)| / ln|z| - 1|``."""
    dirs = _directions(directions)
    scales, horizon = _prepare_scales(f, scales, direction, dirs)
    if np.any(scales == 1.0):
        raise DomainError("log ratio is undefined on |z| = 1")
    a = np.abs(f.evaluate(scales[:, None] * dirs[None, :]))
    if np.any(a == 0):
        raise DomainError("f(z) = 0 at a probe point")
    errors = np.abs(np.log(a) / np.log(scales)[:, None] - 1.0).max(axis=1)
    floors = None
    if f.floors is not None and direction == "to-zero":
        floors = [f.floors.log_ratio(s) for s in scales]
    v = _verdict("log_ratio", scales, errors, direction, floors, th)
    return ScaleProfile("log_ratio", direction, scales.tolist(), errors.tolist(), v,
                        floors=floors, trust_horizon=horizon)


def belinskij_test(f: EvaluableMapping, mu0=0j, z0=0j, scales=None, t_set=(0.5, 2.0),
                   th: Thresholds = DEFAULT_THRESHOLDS) -> ScaleProfile:
    """A-ratio profile ``max_t |A(t rho)/A(rho) - 1|`` with ``A(rho) = g(rho)/rho``.

    ``g = (f(z0 + .) - f(z0)) o phi^{-1}`` with the real-linear ``phi(z) = z + mu0 conj(z)``.
    The homogeneity profile of ``g`` at 0 is attached as ``extra["homogeneity"]``.
    """
    mu0 = complex(mu0)
    if abs(mu0) >= 1:
        raise DomainError("|mu0| must be < 1")
    if is_infinity(z0):
        raise DomainError("the A-ratio is taken at finite points")
    z0 = complex(z0)
    w0 = f.evaluate(z0)
    det = 1.0 - abs(mu0) ** 2

    def g(w):
        return f.evaluate(z0 + (w - mu0 * np.conj(w)) / det) - w0

    base = f.floors if (mu0 == 0 and z0 == 0) else None
    gm = EvaluableMapping(f"belinskij[{f.key}]", g, radius=math.inf, floors=base)
    if f.mapping is not None:
        gm.mapping, gm.trust_radius = f.mapping, f.trust_radius
        gm.usable = lambda w: f.usable(z0 + (np.asarray(w) - mu0 * np.conj(w)) / det)
    t = np.asarray(t_set, float)
    scales, horizon = _prepare_scales(gm, scales, "to-zero",
                                      np.concatenate([[1.0], t]).astype(complex))
    A = _safe_ratio(gm.evaluate(scales), scales)
    At = gm.evaluate(scales[:, None] * t[None, :]) / (scales[:, None] * t[None, :])
    errors = np.abs(At / A[:, None] - 1.0).max(axis=1)
    floors = None
    if base is not None and base.name == "shabat":
        floors = [float(np.max(np.abs(np.log(t)))) / (1.0 + math.log(1.0 / s)) for s in scales]
    elif base is not None and base.name == "identity":
        floors = [0.0] * len(scales)
    elif base is not None and base.name == "radial-stretch":
        floors = [float(np.max(np.abs(t ** (base.k - 1.0) - 1.0)))] * len(scales)
    v = _verdict("belinskij", scales, errors, "to-zero", floors, th)
    hom = homogeneity_profile(gm, scales=scales, th=th)
    return ScaleProfile("belinskij", "to-zero", scales.tolist(), errors.tolist(), v,
                        values=np.abs(A).tolist(), floors=floors, trust_horizon=horizon,
                        extra={"homogeneity": hom, "mu0": mu0, "t_set": t.tolist()})


# ---------------------------------------------------------------------------- sparseness


def default_rho_ladder(rungs=40):
    """``rho = exp(-s)`` with ``s`` geometric in ``[1, 700]`` (dense in log log)."""
    return np.exp(-np.geomspace(1.0, 700.0, rungs))


@dataclass
class SparsenessReport:
    rho: list
    values: list
    skipped: list
    verdict: CriterionVerdict

    def to_dict(self):
        return {"rho": self.rho, "values": self.values, "skipped": self.skipped,
                "verdict": self.verdict.to_dict()}


def sparseness(Z, rho_ladder=None, count=4000, th: Thresholds = DEFAULT_THRESHOLDS):
    """``S_Z(rho) = inf{|z| >= rho} / sup{|z| <= rho}`` along a ladder ``rho -> 0``.

    ``Z`` is an array of points, a callable ``n -> z_n`` (sampled for ``n = 1..count``) or
    the string ``"ray"`` (every modulus present, so ``S = 1``).
    """
    rho = default_rho_ladder() if rho_ladder is None else np.asarray(rho_ladder, float)
    if isinstance(Z, str):
        if Z != "ray":
            raise ValueError("the only named set is 'ray'")
        vals = np.ones_like(rho)
        used, skipped = rho, []
    else:
        if callable(Z):
            with np.errstate(under="ignore"):
                pts = np.asarray([Z(n) for n in range(1, count + 1)], complex)
        else:
            pts = np.asarray(Z, complex)
        mod = np.sort(np.abs(pts[np.abs(pts) > 0]))
        used, vals, skipped = [], [], []
        for r in rho:
            above, below = mod[mod >= r], mod[mod <= r]
            if len(above) == 0 or len(below) == 0:
                skipped.append(float(r))
                continue
            used.append(r)
            vals.append(above[0] / below[-1])
        used, vals = np.asarray(used), np.asarray(vals)
    if len(used) < 4:
        raise DomainError("too few ladder rungs are straddled by the set")
    scale = np.log(np.log(1.0 / used) + 1.0)
    v = bounded_verdict("sparseness", used, vals, scale, th,
                        notes=[f"{len(skipped)} rungs skipped (no straddle)"] if skipped else ())
    return SparsenessReport(list(map(float, used)), list(map(float, vals)), skipped, v)


# ---------------------------------------------------------------------------- distortion bound


@dataclass
class DistortionReport:
    q0: float
    d0: float
    alpha0: float
    delta: float
    probes: list
    lhs: list
    rhs: list
    violations: list

    @property
    def passed(self):
        return not self.violations

    @property
    def min_margin(self):
        return float(np.min(np.asarray(self.rhs) - np.asarray(self.lhs)))

    def to_dict(self):
        return {"q0": self.q0, "d0": self.d0, "alpha0": self.alpha0, "delta": self.delta,
                "passed": self.passed, "min_margin": self.min_margin,
                "rows": [{"zeta": z, "lhs": a, "rhs": b, "margin": b - a}
                         for z, a, b in zip(self.probes, self.lhs, self.rhs)],
                "violations": self.violations}


def distortion_bound_check(f: EvaluableMapping, Q: Callable, zeta0=0j, eps0=0.5, Delta=1.0,
                           probes=100, seed=0, depth=12) -> DistortionReport:
    """Check ``s(f(zeta), f(zeta0)) <= 32/Delta * log(2 eps0/|zeta - zeta0|)^(-1/alpha0)``.

    ``alpha0 = 2 (q0 + 6 d0)`` with ``q0`` the mean of ``Q`` over ``D(zeta0, eps0)`` and
    ``d0`` its maximal dispersion there. Probes are seeded uniform points of
    ``D(zeta0, eps0/2)``.
    """
    if not 0 < Delta <= 1:
        raise DomainError("Delta is a spherical diameter in (0, 1]")
    zeta0 = complex(zeta0)
    q0 = disk_mean(Q, zeta0, eps0)
    d0 = maximal_dispersion(Q, zeta0, eps0, depth)
    alpha0 = 2.0 * (q0 + 6.0 * d0)
    rng = np.random.default_rng(seed)
    rad = 0.5 * eps0 * np.sqrt(rng.uniform(1e-12, 1.0, probes))
    ang = rng.uniform(0, 2 * np.pi, probes)
    zeta = zeta0 + rad * np.exp(1j * ang)
    lhs = spherical_distance_array(f.evaluate(zeta), f.evaluate(zeta0))
    rhs = 32.0 / Delta * np.log(2.0 * eps0 / np.abs(zeta - zeta0)) ** (-1.0 / alpha0)
    viol = [{"zeta": complex(z), "lhs": float(a), "rhs": float(b)}
            for z, a, b in zip(zeta, lhs, rhs) if not a <= b]
    return DistortionReport(q0, d0, alpha0, Delta, zeta.tolist(), lhs.tolist(), rhs.tolist(), viol)


# ---------------------------------------------------------------------------- equivalence suite


@dataclass
class Theorem1Report:
    verdicts: dict
    consistent: bool
    profiles: dict

    def to_dict(self):
        return {"consistent": self.consistent,
                "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
                "profiles": {k: p.to_dict() for k, p in self.profiles.items()}}


def theorem1_suite(f: EvaluableMapping, scales=None, zeta=None, deltas=(1.0, 2.0, 4.0),
                   pairs=64, seed=0, th: Thresholds = DEFAULT_THRESHOLDS) -> Theorem1Report:
    """Five numerically equivalent forms of conformality at the origin.

    ``belinskij``: A-ratio with ``mu0 = 0``; ``ray``: ``f(tau zeta)/f(tau) -> zeta`` for
    real ``tau > 0``; ``two_point``: ``f(z')/f(z) - z'/z -> 0`` over seeded pairs with
    ``|z'| <= delta |z|``; ``pointwise``: the median over ``zeta`` of the homogeneity error
    (every fixed ``zeta``); ``uniform``: the supremum over the ``zeta`` compact.
    Verdicts use the generic decay rule. ``consistent`` is true when all five agree.
    """
    zeta = default_zeta_set() if zeta is None else np.asarray(zeta, complex)
    dmax = max(deltas)
    dirs = _directions(DIRECTIONS)
    factors = np.concatenate([dirs, (dirs[:, None] * zeta[None, :]).ravel(),
                              dmax * dirs, [1.0]])
    scales, horizon = _prepare_scales(f, scales, "to-zero", factors)
    S = _scale_variable(scales, "to-zero")
    profiles = {}

    bel = belinskij_test(f, 0j, 0j, scales, th=th)
    profiles["belinskij"] = bel

    ray_err, _ = _homogeneity_errors(f, zeta, scales, np.array([1.0 + 0j]))
    ray = ray_err.max(axis=(1, 2))

    rng = np.random.default_rng(seed)
    two = np.zeros(len(scales))
    dirs_z = np.exp(2j * np.pi * rng.uniform(size=pairs))
    for d in deltas:
        rad = d * np.sqrt(rng.uniform(size=pairs))
        ang = np.exp(2j * np.pi * rng.uniform(size=pairs))
        z = scales[:, None] * dirs_z[None, :]
        zp = z * rad[None, :] * ang[None, :]
        val = np.abs(_safe_ratio(f.evaluate(zp), f.evaluate(z)) - zp / z)
        two = np.maximum(two, val.max(axis=1))

    full_err, _ = _homogeneity_errors(f, zeta, scales, dirs)
    per_zeta = full_err.max(axis=1)
    pointwise = np.median(per_zeta, axis=1)
    uniform = per_zeta.max(axis=1)

    verdicts = {"belinskij": bel.verdict}
    for name, err in (("ray", ray), ("two_point", two), ("pointwise", pointwise),
                      ("uniform", uniform)):
        verdicts[name] = decay_verdict(name, scales, err, S, th)
        profiles[name] = ScaleProfile(name, "to-zero", scales.tolist(), err.tolist(),
                                      verdicts[name], trust_horizon=horizon)
    profiles["uniform"].extra["spread_last"] = float(uniform[-1] / pointwise[-1]) \
        if pointwise[-1] > 0 else None
    bel_generic = decay_verdict("belinskij", scales, np.asarray(bel.errors), S, th)
    verdicts["belinskij"] = bel_generic
    kinds = {v.verdict for v in verdicts.values()}
    return Theorem1Report(verdicts, len(kinds) == 1, profiles)


__all__ = [
    "EvaluableMapping", "ScaleProfile", "mapping_from_key", "identity_mapping",
    "radial_stretch_mapping", "shabat_mapping", "log_spiral_mapping", "affine_mapping",
    "radial_profile_mapping", "closed_form_for_field", "default_zeta_set", "default_scales", "homogeneity_profile",
    "lavrentiev_ratio", "angle_modulus_profiles", "log_ratio_profile", "belinskij_test",
    "sparseness", "SparsenessReport", "distortion_bound_check", "DistortionReport",
    "theorem1_suite", "Theorem1Report",
]
