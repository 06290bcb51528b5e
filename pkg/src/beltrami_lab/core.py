"""Complex coefficients and the pointwise/averaged dilatation quantities built on them.

Everything here is vectorised over numpy arrays of complex points. Scalar inputs give
scalar outputs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import ndimage, optimize

from . import quadrature as quad
from .errors import DomainError

MU_CLAMP = 1.0 - 2.0 ** -40
K_CAP = 1e8


class _Infinity:
    """The point at infinity of the extended plane. Compares equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_infinity(z) -> bool:
    if z is INF:
        return True
    if isinstance(z, (complex, float, int, np.number)):
        return cmath.isinf(complex(z))
    return False


def _scalar_out(z_in, out):
    return out.item() if np.ndim(z_in) == 0 else out


# ---------------------------------------------------------------------------- grids


@dataclass(frozen=True)
class GridSpec:
    """An ``n x n`` node grid on the square of half-width ``half_width`` around ``center``.

    Nodes are ``center - half_width + spacing * j`` in each axis, ``j = 0..n-1``, so the
    center itself is node ``n // 2``. Arrays are indexed ``[iy, ix]``.
    """

    center: complex = 0j
    half_width: float = 4.0
    n: int = 512

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "half_width", float(self.half_width))
        object.__setattr__(self, "n", int(self.n))
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"grid n must be a power of two >= 16, got {self.n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    def axis(self, imag=False):
        c = self.center.imag if imag else self.center.real
        return c - self.half_width + self.spacing * np.arange(self.n)

    def points(self):
        X, Y = np.meshgrid(self.axis(), self.axis(imag=True))
        return X + 1j * Y

    def contains(self, z):
        """Inside the node hull (where interpolation is defined)."""
        z = np.asarray(z)
        x0, y0 = self.axis()[0], self.axis(imag=True)[0]
        top = self.spacing * (self.n - 1)
        return ((z.real >= x0) & (z.real <= x0 + top)
                & (z.imag >= y0) & (z.imag <= y0 + top))

    def fractional_index(self, z):
        z = np.asarray(z)
        return ((z.imag - self.axis(imag=True)[0]) / self.spacing,
                (z.real - self.axis()[0]) / self.spacing)


def interpolate_grid(grid: GridSpec, values, z, order=1, outside=0.0):
    """Interpolate a complex grid array at points ``z`` (``outside`` beyond the node hull)."""
    z = np.asarray(z, complex)
    iy, ix = grid.fractional_index(z.ravel())
    coords = np.vstack([iy, ix])
    re = ndimage.map_coordinates(np.ascontiguousarray(values.real), coords, order=order,
                                 mode="constant", cval=np.real(outside))
    im = ndimage.map_coordinates(np.ascontiguousarray(values.imag), coords, order=order,
                                 mode="constant", cval=np.imag(outside))
    out = (re + 1j * im).reshape(z.shape)
    out[~grid.contains(z)] = outside
    return out


# ---------------------------------------------------------------------------- radial profiles


def _log_plus(x):
    return np.log(np.maximum(x, 1.0))


RADIAL_PROFILES: dict[str, Callable] = {
    "log": lambda r, p: 1.0 + _log_plus(1.0 / r),
    "log2": lambda r, p: 1.0 + _log_plus(1.0 / r) ** 2,
    "log-inf": lambda r, p: 1.0 + _log_plus(r),
    "inv": lambda r, p: 1.0 + 1.0 / r,
    "power": lambda r, p: 1.0 + r ** p.get("p", 2.0),
    "const": lambda r, p: np.full_like(r, p.get("k", 2.0)),
    "ring": lambda r, p: 1.0 + np.abs(r - p.get("r0", 2.0)) ** (-p.get("p", 2.0)),
}


def _default_profile_support(name, p):
    if name in ("log", "log2"):
        return 1.0  # these profiles equal 1 outside the unit disk
    if name == "ring":
        return p.get("r0", 2.0) + 0.5
    return math.inf


def _z_over_zbar(z):
    a = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.where(a > 0, (z / np.where(a > 0, a, 1.0)) ** 2, 0.0)
    return q


# ---------------------------------------------------------------------------- mu fields


@dataclass
class ClampStats:
    """Counts evaluations whose |mu| had to be clamped below 1."""

    clamped: int = 0
    evaluated: int = 0


class MuField:
    """A complex coefficient ``mu`` of the Beltrami equation.

    ``raw`` returns the unclamped values; calling the field clamps ``|mu|`` to
    ``MU_CLAMP`` and counts the clamped points in ``stats``. Fields are otherwise
    immutable; derived fields (restriction, truncation) are new objects.
    """

    def __init__(self, name, raw, params=None, support_radius=math.inf, kind="builtin",
                 grid: Optional[GridSpec] = None, samples=None):
        self.name = name
        self.params = dict(params or {})
        self._raw = raw
        self.support_radius = float(support_radius)
        self.kind = kind
        self.grid = grid
        self.samples = samples
        self.stats = ClampStats()

    @property
    def key(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    def __repr__(self):
        return f"MuField({self.key!r})"

    def raw(self, z):
        return np.asarray(self._raw(np.asarray(z, complex)), complex)

    def __call__(self, z):
        z = np.asarray(z, complex)
        mu = np.array(self.raw(z), dtype=complex, copy=True)
        mu[~np.isfinite(mu)] = 0.0
        a = np.abs(mu)
        over = a > MU_CLAMP
        if np.any(over):
            mu[over] *= MU_CLAMP / a[over]
        self.stats.clamped += int(np.count_nonzero(over))
        self.stats.evaluated += int(mu.size)
        return mu

    def restricted(self, radius):
        """Same coefficient inside ``|z| <= radius``, zero outside."""
        parent = self

        def raw(z):
            return np.where(np.abs(z) <= radius, parent.raw(z), 0.0)

        params = dict(self.params, support=radius)
        return MuField(self.name, raw, params, min(radius, self.support_radius), self.kind,
                       self.grid, self.samples)


def _builtin_zero(p):
    return (lambda z: np.zeros_like(z)), 0.0


def _builtin_constant(p):
    mu = complex(p.get("re", 0.5), p.get("im", 0.0))
    s = p.get("support", math.inf)
    return (lambda z: np.where(np.abs(z) <= s, mu, 0.0) + 0j * z), s


def _builtin_radial_stretch(p):
    k = p.get("k", 2.0)
    s = p.get("support", 1.0)
    c = (k - 1.0) / (k + 1.0)
    return (lambda z: np.where(np.abs(z) <= s, c * _z_over_zbar(z), 0.0)), s


def _builtin_shabat(p):
    s = p.get("support", 0.5)
    if s >= 1.0:
        raise DomainError("shabat coefficient has |mu| >= 1 on |z| >= 1; support must be < 1")

    def raw(z):
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            mu = -_z_over_zbar(z) / (1.0 - 2.0 * np.log(np.where(r > 0, r, 1.0)))
        return np.where((r <= s) & (r > 0), mu, 0.0)

    return raw, s


def _builtin_log_spiral(p):
    s = p.get("support", 0.5)
    if s >= 1.0:
        raise DomainError("log-spiral coefficient is defined on |z| < 1 only")

    def raw(z):
        r = np.abs(z)
        rr = np.where((r > 0) & (r < 1), r, 0.5)
        a = -1.0 / (4.0 * np.sqrt(-np.log(rr)))
        mu = _z_over_zbar(z) * (1j * a) / (1.0 + 1j * a)
        return np.where((r <= s) & (r > 0), mu, 0.0)

    return raw, s


def _builtin_radial_profile(p):
    prof = p.get("profile", "log")
    if prof not in RADIAL_PROFILES:
        raise ValueError(f"unknown radial profile {prof!r}")
    K = RADIAL_PROFILES[prof]
    sign = float(p.get("sign", 1.0))
    s = p.get("support", _default_profile_support(prof, p))

    def raw(z):
        r = np.abs(z)
        rr = np.where(r > 0, r, 1.0)
        with np.errstate(divide="ignore"):
            k = K(rr, p)
        c = np.where(np.isfinite(k), (k - 1.0) / (k + 1.0), 1.0)
        return np.where((r > 0) & (r <= s), sign * c * _z_over_zbar(z), 0.0)

    return raw, s


BUILTIN_FIELDS = {
    "zero": _builtin_zero,
    "constant": _builtin_constant,
    "radial-stretch": _builtin_radial_stretch,
    "shabat": _builtin_shabat,
    "log-spiral": _builtin_log_spiral,
    "radial-profile": _builtin_radial_profile,
}


def _parse_value(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def parse_key(key: str):
    """Split ``"name:a=1,b=x"`` into ``("name", {"a": 1.0, "b": "x"})``."""
    name, _, rest = key.strip().partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            k, eq, v = item.partition("=")
            if not eq:
                raise ValueError(f"malformed parameter {item!r} in {key!r}")
            params[k.strip()] = _parse_value(v.strip())
    return name.strip(), params


def builtin_field(name: str, **params) -> MuField:
    if name not in BUILTIN_FIELDS:
        raise ValueError(f"unknown built-in field {name!r}; known: {sorted(BUILTIN_FIELDS)}")
    raw, support = BUILTIN_FIELDS[name](params)
    return MuField(name, raw, params, support)


def field_from_key(key: str) -> MuField:
    """Build a built-in field from a string key such as ``"radial-stretch:k=2.0"``."""
    name, params = parse_key(key)
    return builtin_field(name, **params)


def grid_field(grid: GridSpec, samples, name="grid") -> MuField:
    """Bilinear interpolation of sampled ``mu`` inside the grid, zero outside."""
    samples = np.asarray(samples, complex)
    if samples.shape != (grid.n, grid.n):
        raise ValueError(f"samples shape {samples.shape} does not match grid n={grid.n}")
    samples = samples.copy()
    samples.flags.writeable = False
    support = abs(grid.center) + math.sqrt(2.0) * grid.half_width

    def raw(z):
        return interpolate_grid(grid, samples, z, order=1)

    return MuField(name, raw, {}, support, kind="grid", grid=grid, samples=samples)


# ---------------------------------------------------------------------------- dilatations


def eval_mu(field: MuField, z):
    if is_infinity(z):
        raise DomainError("mu is not evaluated at infinity")
    za = np.asarray(z, complex)
    if not np.all(np.isfinite(za)):
        raise DomainError("mu is evaluated at finite points only")
    return _scalar_out(z, field(za))


def _k_from_abs(a, cap):
    with np.errstate(divide="ignore"):
        k = (1.0 + a) / (1.0 - a)
    capped = k > cap
    return np.minimum(k, cap), capped


def k_mu(field: MuField, z, cap=K_CAP, return_flag=False):
    """Dilatation quotient ``(1+|mu|)/(1-|mu|)``, capped at ``cap``."""
    a = np.abs(np.asarray(eval_mu(field, z)))
    k, capped = _k_from_abs(a, cap)
    k = _scalar_out(z, k)
    if return_flag:
        return k, bool(np.any(capped))
    return k


def k_tangent_values(mu, z, z0, cap=K_CAP):
    """Tangent dilatation from coefficient values ``mu`` at points ``z`` w.r.t. finite ``z0``."""
    d = np.asarray(z, complex) - z0
    if np.any(d == 0):
        raise DomainError("tangent dilatation undefined at z = z0")
    e = np.exp(-2j * np.angle(d))  # conj(d)/d, without overflow for subnormal d
    a = np.abs(mu)
    num = np.abs(1.0 - e * mu) ** 2
    den = (1.0 - a) * (1.0 + a)
    with np.errstate(divide="ignore", invalid="ignore"):
        kt = num / den
    kt = np.where(np.isfinite(kt), kt, cap)
    return np.clip(kt, 1.0 / cap, cap)


def k_tangent(field: MuField, z, z0, cap=K_CAP):
    """Tangent dilatation quotient of ``field`` at ``z`` relative to ``z0`` (``z0`` may be INF).

    At infinity the convention ``K^T(z, INF) = K^T(1/z, 0)`` is used.
    """
    za = np.asarray(z, complex)
    if is_infinity(z0):
        if np.any(za == 0):
            raise DomainError("tangent dilatation at infinity needs z != 0")
        w = 1.0 / za
        out = k_tangent_values(eval_mu(field, w), w, 0.0, cap)
    else:
        out = k_tangent_values(eval_mu(field, za), za, complex(z0), cap)
    return _scalar_out(z, np.asarray(out))


def circle_mean_kt(field: MuField, z0, r, m=512, offset=0.0, cap=K_CAP):
    """Mean of ``K^T(., z0)`` over the circle ``|z - z0| = r`` (trapezoid, ``m`` nodes).

    ``r`` may be an array of radii; for ``z0 = INF`` the circle is ``|z| = r``.
    """
    if m < 8:
        raise ValueError("need at least 8 angular nodes")
    radii = np.atleast_1d(np.asarray(r, float))
    if np.any(radii <= 0):
        raise DomainError("radius must be positive")
    e = np.exp(1j * quad.angles(m, offset))
    if is_infinity(z0):
        z = radii[:, None] * e[None, :]
    else:
        z = complex(z0) + radii[:, None] * e[None, :]
    out = np.asarray(k_tangent(field, z, z0, cap)).mean(axis=1)
    return out.item() if np.ndim(r) == 0 else out


# ---------------------------------------------------------------------------- spherical geometry


def spherical_distance(z, w) -> float:
    """Chordal distance on the extended plane."""
    zi, wi = is_infinity(z), is_infinity(w)
    if zi and wi:
        return 0.0
    if zi or wi:
        p = complex(w if zi else z)
        return 1.0 / math.sqrt(1.0 + abs(p) ** 2)
    z, w = complex(z), complex(w)
    return abs(z - w) / (math.sqrt(1.0 + abs(z) ** 2) * math.sqrt(1.0 + abs(w) ** 2))


def spherical_distance_array(z, w):
    """Vectorised chordal distance between finite points."""
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    return np.abs(z - w) / (np.sqrt(1.0 + np.abs(z) ** 2) * np.sqrt(1.0 + np.abs(w) ** 2))


def spherical_diameter(points) -> float:
    pts = list(points)
    if len(pts) < 2:
        raise DomainError("spherical diameter needs at least two points")
    return max(spherical_distance(a, b) for i, a in enumerate(pts) for b in pts[i + 1:])


@dataclass
class AreaIntegral:
    """Result of a spherical-area quadrature: truncated part, extrapolated tail, total."""

    value: float
    truncated: float
    tail: float
    r_max: float
    tail_exponent: Optional[float] = None
    flagged: bool = False
    notes: list = field(default_factory=list)

    def __float__(self):
        return float(self.value)


SPHERICAL_NORMALIZATION = {"paper-4": 4.0, "unit": 1.0}


def spherical_area_integral(g, annulus, normalization="paper-4", m=256, r_max=None,
                            overflow=1e300) -> AreaIntegral:
    """``int g dS`` over ``R1 < |z| < R2`` with ``dS = c dm / (1+|z|^2)^2``.

    ``c`` is 4 for ``"paper-4"`` and 1 for ``"unit"``. For ``R2 = inf`` the integral is
    truncated at ``r_max`` (default ``1e3 * max(R1, 1)``) and the tail beyond is
    extrapolated from the power-law decay of the radial density over the last decade.
    """
    c = SPHERICAL_NORMALIZATION[normalization]
    R1, R2 = float(annulus[0]), float(annulus[1])
    if not 0 <= R1 < R2:
        raise DomainError("need 0 <= R1 < R2")
    infinite = math.isinf(R2)
    top = (r_max or 1e3 * max(R1, 1.0)) if infinite else R2
    r, w = quad.radial_nodes(R1, top)
    cm = quad.circle_means(g, 0.0, r, m)
    dens = c * 2.0 * np.pi * r * cm / (1.0 + r * r) ** 2
    truncated = float(np.sum(dens * w))
    notes = []
    tail, p, flagged = 0.0, None, False
    if infinite:
        sel = r >= top / 10.0
        d = dens[sel]
        if np.all(d == 0):
            tail = 0.0
        elif np.all(d > 0):
            slope, icpt = np.polyfit(np.log(r[sel]), np.log(d), 1)
            p = -float(slope)
            if p > 1.05:
                tail = float(np.exp(icpt) * top ** (1.0 - p) / (p - 1.0))
            else:
                tail, flagged = math.inf, True
                notes.append(f"tail density decays like r^-{p:.3g}: not integrable")
        else:
            tail, flagged = math.nan, True
            notes.append("tail density changes sign; no extrapolation")
    value = truncated + tail
    if not np.isfinite(truncated) or abs(truncated) > overflow:
        flagged = True
        notes.append("overflow guard exceeded")
    return AreaIntegral(value, truncated, tail, top, p, flagged, notes)


# ---------------------------------------------------------------------------- Phi functions


@dataclass(frozen=True)
class PhiFunction:
    """A non-decreasing ``Phi: [0, inf] -> [0, inf]``.

    Built-ins: ``exp`` (``exp(alpha * t**q)``), ``power`` (``t**p``), ``tlog``
    (``t * log(1+t)``), ``identity``, ``constant`` (``c``). ``table`` interpolates
    linearly between ``(t, v)`` nodes, is constant below the first node and extrapolates
    by the last slope.
    """

    kind: str
    alpha: float = 1.0
    q: float = 1.0
    p: float = 2.0
    c: float = 1.0
    t: tuple = ()
    v: tuple = ()

    def __post_init__(self):
        if self.kind not in ("exp", "power", "tlog", "identity", "constant", "table"):
            raise ValueError(f"unknown Phi kind {self.kind!r}")
        if self.kind == "table":
            t, v = np.asarray(self.t, float), np.asarray(self.v, float)
            if len(t) < 2 or len(t) != len(v):
                raise ValueError("table needs >= 2 matching (t, v) nodes")
            if np.any(np.diff(t) <= 0) or np.any(np.diff(v) < 0) or np.any(v < 0):
                raise ValueError("table must be strictly increasing in t, non-decreasing in v, v >= 0")

    @classmethod
    def table(cls, t, v):
        return cls("table", t=tuple(map(float, t)), v=tuple(map(float, v)))

    @classmethod
    def from_key(cls, key: str):
        name, params = parse_key(key)
        if name == "table":
            raise ValueError("tables are built with PhiFunction.table(t, v)")
        return cls(name, **params)

    @property
    def key(self):
        if self.kind == "exp":
            return f"exp:alpha={self.alpha},q={self.q}"
        if self.kind == "power":
            return f"power:p={self.p}"
        if self.kind == "constant":
            return f"constant:c={self.c}"
        return self.kind

    def _last_slope(self):
        return (self.v[-1] - self.v[-2]) / (self.t[-1] - self.t[-2])

    def __call__(self, t):
        t = np.asarray(t, float)
        k = self.kind
        if k == "exp":
            with np.errstate(over="ignore"):
                out = np.exp(self.alpha * t ** self.q)
        elif k == "power":
            out = t ** self.p
        elif k == "tlog":
            out = t * np.log1p(t)
        elif k == "identity":
            out = t.copy()
        elif k == "constant":
            out = np.full_like(t, self.c)
        else:
            tt, vv = np.asarray(self.t), np.asarray(self.v)
            out = np.interp(t, tt, vv)
            beyond = t > tt[-1]
            out = np.where(beyond, vv[-1] + self._last_slope() * (t - tt[-1]), out)
        return out.item() if out.ndim == 0 else out

    def log(self, t):
        """``H(t) = log Phi(t)``, evaluated without overflow for the exponential kinds."""
        t = np.asarray(t, float)
        if self.kind == "exp":
            out = self.alpha * t ** self.q
        elif self.kind == "power":
            with np.errstate(divide="ignore"):
                out = self.p * np.log(t)
        else:
            with np.errstate(divide="ignore"):
                out = np.log(np.asarray(self(t), float))
        return out.item() if np.ndim(out) == 0 else out

    def dlog(self, t):
        """``H'(t)``, with the completion ``H' = 0`` where ``Phi = 0``."""
        t = np.asarray(t, float)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "exp":
                out = self.alpha * self.q * t ** (self.q - 1.0)
            elif k == "power":
                out = self.p / t
            elif k == "tlog":
                out = 1.0 / t + 1.0 / ((1.0 + t) * np.log1p(t))
            elif k == "identity":
                out = 1.0 / t
            elif k == "constant":
                out = np.zeros_like(t)
            else:
                tt, vv = np.asarray(self.t), np.asarray(self.v)
                slopes = np.diff(vv) / np.diff(tt)
                j = np.clip(np.searchsorted(tt, t, side="right") - 1, 0, len(slopes) - 1)
                sl = np.where(t < tt[0], 0.0, slopes[j])
                sl = np.where(t >= tt[-1], slopes[-1], sl)
                out = sl / np.asarray(self(t), float)
        out = np.where(np.isfinite(out), out, 0.0)
        return out.item() if out.ndim == 0 else out

    def zero_level(self) -> float:
        """``t0 = sup{t : Phi(t) = 0}`` (0 when ``Phi(0) > 0``)."""
        if self.kind in ("exp",):
            return 0.0
        if self.kind == "constant":
            return math.inf if self.c == 0 else 0.0
        if self.kind == "table":
            v = np.asarray(self.v)
            zero = np.nonzero(v == 0)[0]
            if len(zero) == 0:
                return 0.0
            if zero[-1] == len(v) - 1 and self._last_slope() == 0:
                return math.inf
            return float(self.t[zero[-1]])
        return 0.0

    def is_convex(self) -> bool:
        if self.kind == "exp":
            return self.alpha > 0 and self.q >= 1.0
        if self.kind == "power":
            return self.p >= 1.0
        if self.kind == "table":
            s = np.diff(self.v) / np.diff(self.t)
            return bool(np.all(np.diff(s) >= -1e-12))
        return True

    def inverse(self, tau):
        """Generalised inverse ``inf{t >= 0 : Phi(t) >= tau}`` (``inf`` if the set is empty)."""
        return phi_inverse(self, tau)

    def log_inverse(self, eta):
        """``H^{-1}(eta) = inf{t : log Phi(t) >= eta}``."""
        eta_a = np.asarray(eta, float)
        if self.kind == "exp":
            out = np.where(eta_a <= 0, 0.0, (np.maximum(eta_a, 0) / self.alpha) ** (1.0 / self.q))
        elif self.kind == "power":
            with np.errstate(over="ignore"):
                out = np.exp(eta_a / self.p)
        elif self.kind == "identity":
            with np.errstate(over="ignore"):
                out = np.exp(eta_a)
        else:
            with np.errstate(over="ignore"):
                out = np.asarray(phi_inverse(self, np.exp(eta_a)), float)
        return out.item() if np.ndim(out) == 0 else out


def _bisect_inverse(phi: PhiFunction, tau: float) -> float:
    if phi(0.0) >= tau:
        return 0.0
    hi = 1.0
    while phi(hi) < tau:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return optimize.brentq(lambda t: phi(t) - tau, 0.0, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


def phi_inverse(phi: PhiFunction, tau):
    """``Phi^{-1}(tau) = inf{t : Phi(t) >= tau}``; vectorised over ``tau``."""
    tau_a = np.atleast_1d(np.asarray(tau, float))
    if np.any(tau_a < 0):
        raise DomainError("tau must be non-negative")
    k = phi.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if k == "exp":
            out = np.where(tau_a <= 1.0, 0.0,
                           (np.log(np.maximum(tau_a, 1.0)) / phi.alpha) ** (1.0 / phi.q))
        elif k == "power":
            out = tau_a ** (1.0 / phi.p)
        elif k == "identity":
            out = tau_a.copy()
        elif k == "constant":
            out = np.where(tau_a <= phi.c, 0.0, math.inf)
        elif k == "table":
            out = np.array([_table_inverse(phi, x) for x in tau_a])
        else:
            out = np.array([_bisect_inverse(phi, x) for x in tau_a])
    return out.item() if np.ndim(tau) == 0 else out


def _table_inverse(phi: PhiFunction, tau: float) -> float:
    t, v = phi.t, phi.v
    if tau <= v[0]:
        return 0.0
    for i in range(len(t) - 1):
        if v[i] < tau <= v[i + 1]:
            return t[i] + (tau - v[i]) / (v[i + 1] - v[i]) * (t[i + 1] - t[i])
    s = phi._last_slope()
    if s <= 0:
        return math.inf
    return t[-1] + (tau - v[-1]) / s
