"""Numerical probes of integral existence conditions for degenerate Beltrami equations.

Every condition of the form "integral = infinity" or "quantity = o(...)" is evaluated
along a geometric ladder of cutoffs and turned into a three-valued verdict. Radial
integrals use Gauss-Legendre panels in ``log r`` between consecutive rungs so the values
at all rungs come from one cumulative sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import quadrature as quad
from .core import (MuField, PhiFunction, circle_mean_kt, is_infinity, k_mu, k_tangent,
                   spherical_area_integral)
from .errors import DomainError
from .oscillation import FmoBoundReport, fmo_bound_check
from .verdict import (DEFAULT_THRESHOLDS, FAILS, HOLDS, INCONCLUSIVE, CriterionVerdict,
                      Thresholds, bounded_verdict, decay_verdict, divergence_verdict,
                      limit_verdict)

DEFAULT_RUNGS = 20
ANGULAR_NODES = 256


# ---------------------------------------------------------------------------- ladders


def geometric_ladder(start, direction, rungs=DEFAULT_RUNGS, ratio=2.0):
    """``start * ratio**-j`` (to-zero) or ``start * ratio**j`` (to-infinity), j = 1..rungs."""
    j = np.arange(1, rungs + 1)
    if direction == "to-zero":
        return start * ratio ** -j.astype(float)
    if direction == "to-infinity":
        return start * ratio ** j.astype(float)
    raise ValueError(f"unknown direction {direction!r}")


def log_scale(ladder, direction):
    """The logarithmic scale variable of a ladder, shifted to stay >= 1/2."""
    ladder = np.asarray(ladder, float)
    s = np.log(1.0 / ladder) if direction == "to-zero" else np.log(ladder)
    lo = float(np.min(s))
    return s if lo >= 0.5 else s + (1.0 - lo)


def cumulative_radial(density: Callable, start, ladder, order=quad.GL_ORDER):
    """``int density(r) dr`` between ``start`` and every ladder rung (panels in ``log r``)."""
    full = np.concatenate([[start], np.asarray(ladder, float)])
    r, w, idx = quad.ladder_panels(full, order)
    vals = np.asarray(density(r), float) * w
    return np.cumsum(np.bincount(idx, weights=vals, minlength=len(full) - 1))


# ---------------------------------------------------------------------------- divergence engine


def divergence_probe(F: Callable, direction="to-zero", ladder=None, th: Thresholds = DEFAULT_THRESHOLDS,
                     name="divergence", start=1.0, rungs=DEFAULT_RUNGS, vectorized=False,
                     extend=True) -> CriterionVerdict:
    """Decide whether ``F(cutoff)`` diverges to ``+inf`` as the cutoff goes to 0 or infinity.

    ``F`` takes one cutoff (or, with ``vectorized=True``, the whole ladder array). When the
    verdict is inconclusive the ladder is doubled in depth once and re-probed.
    """
    if ladder is None:
        ladder = geometric_ladder(start, direction, rungs)
    ladder = np.asarray(ladder, float)

    def evaluate(lad):
        if vectorized:
            return np.asarray(F(lad), float)
        return np.asarray([F(c) for c in lad], float)

    values = evaluate(ladder)
    v = divergence_verdict(name, ladder, values, log_scale(ladder, direction), th)
    if v.verdict == INCONCLUSIVE and extend:
        ratio = ladder[-1] / ladder[-2]
        longer = np.concatenate([ladder, ladder[-1] * ratio ** np.arange(1, len(ladder) + 1)])
        values = evaluate(longer)
        v = divergence_verdict(name, longer, values, log_scale(longer, direction), th,
                               notes=["ladder extended once after an inconclusive probe"])
    v.extra["direction"] = direction
    return v


def _with_name(v: CriterionVerdict, name, **extra):
    v.name = name
    v.extra.update(extra)
    return v


# ---------------------------------------------------------------------------- point conditions


def lehto_check(field: MuField, z0=0j, eps0=0.5, rungs=DEFAULT_RUNGS, m=ANGULAR_NODES,
                th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Divergence of ``int_eps^eps0 dr / (r k^T(z0, r))`` as ``eps -> 0``.

    ``k^T(z0, r)`` is the circle mean of the tangent dilatation; ``z0`` may be INF.
    """
    if not eps0 > 0:
        raise DomainError("eps0 must be positive")

    def F(ladder):
        return cumulative_radial(lambda r: 1.0 / (r * circle_mean_kt(field, z0, r, m)),
                                 eps0, ladder)

    v = divergence_probe(F, "to-zero", geometric_ladder(eps0, "to-zero", rungs), th,
                         vectorized=True)
    return _with_name(v, "lehto", z0=_point_label(z0), eps0=eps0)


def _point_label(z0):
    return "inf" if is_infinity(z0) else repr(complex(z0))


def _kt_circle_density(field, z0, weight, m):
    """``r -> 2 pi r * mean_{|z-z0|=r} K^T(z, z0) * weight(r)``."""
    def density(r):
        return 2.0 * np.pi * r * np.asarray(circle_mean_kt(field, z0, r, m)) * weight(r)
    return density


def log_scale_check(field: MuField, z0=0j, eps0=0.5, variant="log", rungs=None,
                    m=ANGULAR_NODES, th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Ratio of the weighted annulus integral of ``K^T`` to ``log^2(1/eps)`` (or loglog^2)."""
    if variant == "log":
        weight = lambda r: 1.0 / r ** 2
        norm = lambda e: np.log(1.0 / e) ** 2
        rungs = rungs or DEFAULT_RUNGS
    elif variant == "loglog":
        if eps0 >= 1:
            raise DomainError("the loglog variant needs eps0 < 1")
        weight = lambda r: 1.0 / (r * np.log(1.0 / r)) ** 2
        norm = lambda e: np.log(np.log(1.0 / e)) ** 2
        rungs = rungs or 2 * DEFAULT_RUNGS
    else:
        raise ValueError(f"unknown variant {variant!r}")
    ladder = geometric_ladder(eps0, "to-zero", rungs)
    ladder = ladder[np.log(np.log(1.0 / ladder)) > 0] if variant == "loglog" else ladder
    lhs = cumulative_radial(_kt_circle_density(field, z0, weight, m), eps0, ladder)
    ratio = lhs / norm(ladder)
    v = decay_verdict(f"log_scale[{variant}]", ladder, ratio, log_scale(ladder, "to-zero"), th)
    v.extra.update(z0=_point_label(z0), lhs=lhs.tolist())
    return v


# ---------------------------------------------------------------------------- Phi conditions


def _check_delta(phi: PhiFunction, delta):
    t0 = phi.zero_level()
    if math.isinf(t0):
        raise DomainError("Phi vanishes identically beyond delta")
    if not delta > max(0.0, t0):
        raise DomainError(f"delta must exceed max(0, t0) = {max(0.0, t0)}")


def phi_divergence_check(phi: PhiFunction, delta=1.0, rungs=DEFAULT_RUNGS,
                         th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """Divergence of ``int_delta^T log Phi(t) dt / t^2`` as ``T -> infinity``."""
    _check_delta(phi, delta)
    F = lambda lad: cumulative_radial(lambda t: phi.log(t) / t ** 2, delta, lad)
    v = divergence_probe(F, "to-infinity", geometric_ladder(delta, "to-infinity", rungs), th,
                         vectorized=True)
    return _with_name(v, "phi_divergence", phi=phi.key, delta=delta)


def _stieltjes_cumulative(H: Callable, start, ladder, per_panel=256):
    """``int dH(t)/t`` as a sum of increments over a geometric sub-grid of every panel."""
    full = np.concatenate([[start], np.asarray(ladder, float)])
    out = []
    for a, b in zip(full[:-1], full[1:]):
        t = np.geomspace(a, b, per_panel + 1)
        h = np.asarray(H(t), float)
        mid = np.sqrt(t[:-1] * t[1:])
        out.append(float(np.sum(np.diff(h) / mid)))
    return np.cumsum(out)


@dataclass
class Remark11Report:
    phi: str
    verdicts: dict
    consistent: bool
    convex: bool

    def to_dict(self):
        return {"phi": self.phi, "consistent": self.consistent, "convex": self.convex,
                "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()}}


def remark11_equivalences(phi: PhiFunction, rungs=DEFAULT_RUNGS,
                          th: Thresholds = DEFAULT_THRESHOLDS) -> Remark11Report:
    """Probe six reformulations of the ``log Phi`` divergence condition.

    With ``H = log Phi`` (and ``H' = 0`` where ``Phi = 0``) the probes are
    ``int H'/t``, ``int dH/t``, ``int H/t^2``, ``int H(1/t) dt`` near 0,
    ``int d eta / H^{-1}(eta)`` and ``int d tau / (tau Phi^{-1}(tau))``.
    """
    t0 = phi.zero_level()
    if math.isinf(t0):
        raise DomainError("Phi vanishes identically")
    D = t0 + 1.0
    H0 = float(phi.log(1e-300)) if phi.zero_level() == 0 else -math.inf
    eta0 = max(H0, 0.0) + 1.0
    phi0 = float(phi(0.0))
    tau0 = phi0 + 1.0
    if phi.kind == "table":
        # Divergence is decided by the tail, which for a table is its extrapolation past the
        # last node; ladders starting inside the sampled range only see the sampled shape.
        t_last, v_last = phi.t[-1], phi.v[-1]
        D = max(D, t_last)
        eta0 = max(eta0, math.log(v_last) + 1.0) if v_last > 0 else eta0
        tau0 = max(tau0, v_last + 1.0)
    to_inf = geometric_ladder(D, "to-infinity", rungs)
    delta_star = 1.0 / D

    def inv_or_zero(x):
        with np.errstate(divide="ignore"):
            return np.where(np.isfinite(x) & (x > 0), 1.0 / np.where(x > 0, x, 1.0), 0.0)

    probes = {
        "dlog_over_t": (lambda lad: cumulative_radial(lambda t: phi.dlog(t) / t, D, lad),
                        "to-infinity", to_inf),
        "stieltjes": (lambda lad: _stieltjes_cumulative(phi.log, D, lad), "to-infinity", to_inf),
        "log_over_t2": (lambda lad: cumulative_radial(lambda t: phi.log(t) / t ** 2, D, lad),
                        "to-infinity", to_inf),
        "log_of_reciprocal": (lambda lad: cumulative_radial(lambda t: phi.log(1.0 / t),
                                                            delta_star, lad),
                              "to-zero", geometric_ladder(delta_star, "to-zero", rungs)),
        "inverse_log": (lambda lad: cumulative_radial(
            lambda e: inv_or_zero(np.asarray(phi.log_inverse(e), float)), eta0, lad),
            "to-infinity", geometric_ladder(eta0, "to-infinity", rungs)),
        "inverse_phi": (lambda lad: cumulative_radial(
            lambda s: inv_or_zero(np.asarray(phi.log_inverse(s), float)), math.log(tau0),
            np.log(lad)) if tau0 > 1 else _inverse_phi_direct(phi, tau0, lad),
            "to-infinity", geometric_ladder(tau0, "to-infinity", rungs)),
    }
    verdicts = {}
    for name, (F, direction, ladder) in probes.items():
        v = divergence_probe(F, direction, ladder, th, name=name, vectorized=True)
        verdicts[name] = v
    kinds = {v.verdict for v in verdicts.values()}
    consistent = len(kinds) == 1 and INCONCLUSIVE not in kinds
    return Remark11Report(phi.key, verdicts, consistent, phi.is_convex())


def _inverse_phi_direct(phi: PhiFunction, tau0, ladder):
    def density(tau):
        inv = np.asarray(phi.inverse(tau), float)
        with np.errstate(divide="ignore"):
            return np.where(np.isfinite(inv) & (inv > 0), 1.0 / (tau * inv), 0.0)
    return cumulative_radial(density, tau0, ladder)


# ---------------------------------------------------------------------------- psi families


@dataclass(frozen=True)
class PsiFamily:
    """Positive weight functions ``psi(t)``.

    ``inv``: ``1/t``; ``invlog``: ``1/(t log(1/t))``; ``iterlog`` with ``depth`` d:
    ``1/(t L1 ... Ld)`` with ``L1 = log(1/t)``, ``L(k+1) = log Lk``; ``one``: 1;
    ``table``: log-log interpolation of samples. ``mirrored=True`` evaluates
    ``psi(1/t)``, the form used near infinity.
    """

    kind: str
    depth: int = 1
    mirrored: bool = False
    t: tuple = ()
    v: tuple = ()

    MAX_DEPTH = 3

    def __post_init__(self):
        if self.kind not in ("inv", "invlog", "iterlog", "one", "table"):
            raise ValueError(f"unknown psi kind {self.kind!r}")
        if self.kind == "iterlog" and not 1 <= self.depth <= self.MAX_DEPTH:
            raise ValueError(f"iterated-log depth must be in 1..{self.MAX_DEPTH}")
        if self.kind == "table":
            if len(self.t) < 2 or len(self.t) != len(self.v) or min(self.v) <= 0:
                raise ValueError("psi table needs >= 2 positive samples")

    @classmethod
    def from_key(cls, key: str):
        name, _, rest = key.partition(":")
        kw = {}
        for item in filter(None, rest.split(",")):
            k, _, val = item.partition("=")
            kw[k.strip()] = int(val) if k.strip() == "depth" else val.strip() in ("1", "true", "True")
        return cls(name.strip(), **kw)

    def mirror(self):
        return PsiFamily(self.kind, self.depth, not self.mirrored, self.t, self.v)

    @property
    def key(self):
        base = f"iterlog:depth={self.depth}" if self.kind == "iterlog" else self.kind
        return base + (" (mirrored)" if self.mirrored else "")

    def domain_limit(self) -> float:
        """Largest ``t`` (before mirroring) where ``psi`` is positive and finite."""
        if self.kind in ("inv", "one", "table"):
            return math.inf
        if self.kind == "invlog":
            return 1.0
        lim = 0.0
        for _ in range(self.depth - 1):
            lim = math.exp(lim)
        return math.exp(-lim) if self.depth > 1 else 1.0

    def __call__(self, t):
        t = np.asarray(t, float)
        s = 1.0 / t if self.mirrored else t
        if self.kind == "one":
            out = np.ones_like(s)
        elif self.kind == "inv":
            out = 1.0 / s
        elif self.kind == "table":
            out = np.exp(np.interp(np.log(s), np.log(self.t), np.log(self.v)))
        else:
            depth = 1 if self.kind == "invlog" else self.depth
            L = np.log(1.0 / s)
            prod = L.copy()
            for _ in range(depth - 1):
                L = np.log(L)
                prod = prod * L
            out = 1.0 / (s * prod)
        return out.item() if out.ndim == 0 else out


def _ratio_probe(name, density, psi_integrand, start, ladder, direction, th):
    lhs = cumulative_radial(density, start, ladder)
    I = cumulative_radial(psi_integrand, start, ladder)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lhs / I ** 2
    v = decay_verdict(name, ladder, ratio, log_scale(ladder, direction), th)
    v.extra.update(lhs=lhs.tolist(), I=I.tolist())
    return v


def _infinity_ratio(name, g: Callable, psi: PsiFamily, R0, rungs, m, th):
    """``int_{R0<|z|<R} g psi^2(|z|) dm/|z|^4`` over ``I(R)^2``, ``I = int psi dt/t^2``."""
    if not R0 > 0:
        raise DomainError("R0 must be positive")
    ladder = geometric_ladder(R0, "to-infinity", rungs)

    def density(r):
        cm = quad.circle_means(g, 0j, r, m)
        return 2.0 * np.pi * r * cm * psi(r) ** 2 / r ** 4

    return _ratio_probe(name, density, lambda t: psi(t) / t ** 2, R0, ladder, "to-infinity", th)


def psi_infinity_check(field: MuField, psi: PsiFamily, R0=1.0, rungs=DEFAULT_RUNGS,
                       m=ANGULAR_NODES, th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """``int_{R0<|z|<R} K_mu psi^2(|z|) dm / |z|^4 = o(I(R)^2)`` with ``I = int psi dt/t^2``."""
    if psi.mirrored and psi.kind in ("invlog", "iterlog") and R0 <= 1.0 / psi.domain_limit():
        raise DomainError("R0 must exceed 1 / domain limit of the mirrored psi")
    v = _infinity_ratio("psi_infinity", lambda z: k_mu(field, z), psi, R0, rungs, m, th)
    v.extra.update(psi=psi.key, R0=R0)
    return v


# ---------------------------------------------------------------------------- tail conditions


TAIL_RUNGS = 11


@dataclass
class TailReport:
    normalization: str
    lebesgue: CriterionVerdict
    strong: CriterionVerdict
    limit: CriterionVerdict
    limit_estimate: float
    discrepancy: bool
    notes: list = field(default_factory=list)

    @property
    def verdicts(self):
        return (self.lebesgue, self.strong, self.limit)

    def to_dict(self):
        return {"normalization": self.normalization, "limit_estimate": self.limit_estimate,
                "discrepancy": self.discrepancy, "notes": self.notes,
                "lebesgue": self.lebesgue.to_dict(), "strong": self.strong.to_dict(),
                "limit": self.limit.to_dict()}


def tail_ladder(rungs=TAIL_RUNGS, top=1000.0):
    """``R = top * 2^-j`` for ``j = rungs-1 .. 0`` (increasing)."""
    return top * 2.0 ** -np.arange(rungs - 1, -1, -1, dtype=float)


def infinity_tail_checks(field: MuField, normalization="unit", ladder=None, m=ANGULAR_NODES,
                         tol=1e-2, th: Thresholds = DEFAULT_THRESHOLDS) -> TailReport:
    """Three tail probes of ``|mu|`` and ``K_mu`` against the spherical area element.

    (a) ``R^2 int_{|z|>R} |mu| dS -> 0``, (b) ``R^2 int_{|z|>R} K_mu dS`` bounded,
    (c) ``R^2/pi int_{|z|>R} K_mu dS -> 1`` (within ``tol`` at the last rung).
    Under the ``paper-4`` normalisation (c) tends to at least 4 for every coefficient, so a
    discrepancy flag is raised.
    """
    R = tail_ladder() if ladder is None else np.asarray(ladder, float)
    abs_mu = lambda z: np.abs(field(z))
    K = lambda z: k_mu(field, z)
    a_vals, b_vals, notes = [], [], []
    flagged = False
    for r in R:
        ia = spherical_area_integral(abs_mu, (r, math.inf), normalization, m)
        ib = spherical_area_integral(K, (r, math.inf), normalization, m)
        flagged |= ia.flagged or ib.flagged
        a_vals.append(r * r * ia.value)
        b_vals.append(r * r * ib.value)
    scale = np.log(R)
    scale = scale - scale.min() + 1.0
    if flagged:
        notes.append("non-integrable tail detected")
        fail = lambda name, vals: CriterionVerdict(name, FAILS, list(zip(R, vals)), None,
                                                   ["non-integrable tail"])
        va, vb = fail("tail_lebesgue", a_vals), fail("tail_strong", b_vals)
        vc = fail("tail_limit", np.asarray(b_vals) / math.pi)
        return TailReport(normalization, va, vb, vc, math.inf, normalization == "paper-4", notes)
    va = decay_verdict("tail_lebesgue", R, a_vals, scale, th)
    vb = bounded_verdict("tail_strong", R, b_vals, scale, th)
    c_vals = np.asarray(b_vals) / math.pi
    vc = limit_verdict("tail_limit", R, c_vals, 1.0, tol)
    discrepancy = normalization == "paper-4"
    if discrepancy:
        notes.append("paper-4 area element: the limit in (c) is at least 4 for every "
                     "coefficient, so (c) cannot hold with constant 1")
    return TailReport(normalization, va, vb, vc, float(c_vals[-1]), discrepancy, notes)


# ---------------------------------------------------------------------------- Orlicz-type premise


@dataclass
class Prop7Report:
    status: str
    premise: CriterionVerdict
    phi_condition: CriterionVerdict
    conclusion: Optional[CriterionVerdict]

    def to_dict(self):
        return {"status": self.status, "premise": self.premise.to_dict(),
                "phi_condition": self.phi_condition.to_dict(),
                "conclusion": self.conclusion.to_dict() if self.conclusion else None}


def prop7_check(Q: Callable, phi: PhiFunction, rungs=DEFAULT_RUNGS, m=ANGULAR_NODES,
                upper=0.5, th: Thresholds = DEFAULT_THRESHOLDS) -> Prop7Report:
    """If ``int_D Phi(Q) dm < inf`` and ``int d tau/(tau Phi^{-1}(tau)) = inf`` then
    ``int_0 dr/(r q(r)) = inf`` with ``q`` the circle mean of ``Q``.

    The premise integral is probed as ``eps -> 0`` over ``eps < |z| < 1``; the conclusion
    integral runs up to ``upper`` (default 1/2, keeping ``q`` away from a zero at ``r = 1``).
    Status is ``premise-failed``, ``conclusion-holds`` or ``conclusion-fails``.
    """
    ladder = geometric_ladder(1.0, "to-zero", rungs)

    def premise_F(lad):
        dens = lambda r: 2.0 * np.pi * r * quad.circle_means(
            lambda z: phi(np.asarray(Q(z), float)), 0j, r, m)
        with np.errstate(over="ignore"):
            return cumulative_radial(dens, 1.0, lad)

    with np.errstate(over="ignore"):
        vals = premise_F(ladder)
    if not np.all(np.isfinite(vals)):
        premise = CriterionVerdict("prop7_premise", HOLDS, list(zip(ladder, vals)), None,
                                   ["premise integral overflows: infinite"])
    else:
        premise = divergence_verdict("prop7_premise", ladder, vals, log_scale(ladder, "to-zero"),
                                     th)
    # premise finite <=> the divergence probe fails
    report_cond = remark11_equivalences(phi, rungs, th).verdicts["inverse_phi"]
    if not premise.fails:
        return Prop7Report("premise-failed", premise, report_cond, None)
    q_lad = geometric_ladder(upper, "to-zero", rungs)
    conclusion = divergence_probe(
        lambda lad: cumulative_radial(
            lambda r: 1.0 / (r * quad.circle_means(Q, 0j, r, m)), upper, lad),
        "to-zero", q_lad, th, name="prop7_conclusion", vectorized=True)
    if not report_cond.holds:
        return Prop7Report("premise-failed", premise, report_cond, conclusion)
    status = "conclusion-holds" if conclusion.holds else "conclusion-fails"
    return Prop7Report(status, premise, report_cond, conclusion)


# ---------------------------------------------------------------------------- general lemma


@dataclass
class Lemma3Report:
    per_point: dict
    infinity: Optional[CriterionVerdict]
    fmo_bound: Optional[FmoBoundReport]
    all_hold: bool

    def to_dict(self):
        return {"all_hold": self.all_hold,
                "per_point": {k: v.to_dict() for k, v in self.per_point.items()},
                "infinity": self.infinity.to_dict() if self.infinity else None,
                "fmo_bound": self.fmo_bound.to_dict() if self.fmo_bound else None}


def point_ratio_check(field: MuField, z0, psi: PsiFamily, eps0=None, rungs=DEFAULT_RUNGS,
                      m=ANGULAR_NODES, th: Thresholds = DEFAULT_THRESHOLDS) -> CriterionVerdict:
    """``int_{eps<|z-z0|<eps0} K^T psi^2 dm = o(I(eps)^2)``, ``I = int_eps^eps0 psi``."""
    if eps0 is None:
        eps0 = min(0.5, 0.5 * psi.domain_limit())
    if not 0 < eps0 < psi.domain_limit():
        raise DomainError("eps0 must lie inside the domain of psi")
    ladder = geometric_ladder(eps0, "to-zero", rungs)
    density = _kt_circle_density(field, z0, lambda r: psi(r) ** 2, m)
    v = _ratio_probe("point_ratio", density, psi, eps0, ladder, "to-zero", th)
    v.extra.update(z0=_point_label(z0), psi=psi.key, eps0=eps0)
    return v


def lemma3_general_check(field: MuField, z0_set: Sequence, psi_families, eps0=None,
                         infinity_psi: Optional[PsiFamily] = None, R0=1.0,
                         fmo_majorant: Optional[Callable] = None, rungs=DEFAULT_RUNGS,
                         m=ANGULAR_NODES, th: Thresholds = DEFAULT_THRESHOLDS) -> Lemma3Report:
    """Point conditions at every ``z0`` plus the condition at infinity in its ``R``-form.

    ``psi_families`` is one :class:`PsiFamily` or a mapping ``z0 -> PsiFamily``. The
    infinity family defaults to the mirror of the family at 0 (``psi(1/t)``). When
    ``fmo_majorant`` is given its log-log bound check is attached to the report.
    """
    def family(z0):
        if isinstance(psi_families, PsiFamily):
            return psi_families
        return psi_families[z0]

    per_point = {}
    for z0 in z0_set:
        if is_infinity(z0):
            continue
        per_point[_point_label(z0)] = point_ratio_check(field, z0, family(z0), eps0, rungs, m, th)
    if infinity_psi is None:
        base = psi_families if isinstance(psi_families, PsiFamily) else next(iter(psi_families.values()))
        infinity_psi = base.mirror()
    if infinity_psi.mirrored and infinity_psi.kind in ("invlog", "iterlog"):
        R0 = max(R0, 2.0 / infinity_psi.domain_limit())
    inf_v = _infinity_ratio("infinity_ratio", lambda z: k_tangent(field, z, 0j), infinity_psi,
                            R0, rungs, m, th)
    inf_v.extra.update(psi=infinity_psi.key, R0=R0)
    bound = fmo_bound_check(fmo_majorant) if fmo_majorant is not None else None
    all_hold = all(v.holds for v in per_point.values()) and inf_v.holds and (
        bound is None or bound.passed)
    return Lemma3Report(per_point, inf_v, bound, all_hold)


CRITERIA = {
    "lehto": lehto_check,
    "log_scale": log_scale_check,
    "phi_divergence": phi_divergence_check,
    "remark11": remark11_equivalences,
    "psi_infinity": psi_infinity_check,
    "infinity_tail": infinity_tail_checks,
    "prop7": prop7_check,
    "lemma3": lemma3_general_check,
}
