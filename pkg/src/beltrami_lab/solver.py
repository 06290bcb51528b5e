"""Spectral fixed-point solver for the Beltrami equation and the truncation scheme for
degenerate coefficients.

The solution is sought as ``f(z) = z + m * conj(z) + u(z)`` with ``u`` periodic on the grid
square. Writing ``h = dbar f`` the equation becomes ``h = mu * (1 + S h)``, where ``S`` is
the Beurling transform (Fourier multiplier ``conj(xi)/xi``). The constant ``m`` is the mean
of ``h``, which the periodic part cannot carry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.fft as sfft
from scipy import ndimage

from . import quadrature as quad
from .core import GridSpec, MuField, is_infinity
from .errors import ConvergenceError, DomainError
from .verdict import HOLDS, INCONCLUSIVE, CriterionVerdict

SUPPORT_FACTOR = 4.0
POSITIVITY_REQUIRED = 0.99


# ---------------------------------------------------------------------------- mappings


@dataclass
class Mapping:
    """A solution sampled on a grid, with derivative fields and its normalisation record.

    When the mapping comes from :func:`solve_qc` it keeps the decomposition
    ``f = scale * (z + m conj(z) + u) + shift`` so that off-node evaluation interpolates
    only the periodic remainder ``u``.
    """

    grid: GridSpec
    values: np.ndarray
    dz: Optional[np.ndarray] = None
    dzbar: Optional[np.ndarray] = None
    truncation: Optional[int] = None
    residual: float = math.nan
    tol: float = math.nan
    jacobian: Optional[np.ndarray] = None
    positive_fraction: float = math.nan
    derivative_method: str = "none"
    normalization: dict = field(default_factory=dict)
    iterations: int = 0
    contraction: float = math.nan
    field_key: str = ""
    periodic: Optional[np.ndarray] = None
    linear: tuple = (1.0 + 0j, 0j, 1.0 + 0j, 0j)  # (a, b, scale, shift)

    @classmethod
    def from_values(cls, grid: GridSpec, values, **kw):
        """Wrap plain grid samples (no periodic decomposition); off-node evaluation is cubic."""
        values = np.asarray(values, complex)
        if values.shape != (grid.n, grid.n):
            raise ValueError("values shape does not match grid")
        return cls(grid=grid, values=values, **kw)

    def evaluate(self, z):
        """Values at arbitrary points inside the grid hull; points outside raise DomainError."""
        z_in = z
        z = np.asarray(z, complex)
        if not np.all(self.grid.contains(z)):
            raise DomainError("query outside the grid of a discrete mapping")
        iy, ix = self.grid.fractional_index(z.ravel())
        coords = np.vstack([iy, ix])
        if self.periodic is not None:
            base = self.periodic
            mode = "grid-wrap"
        else:
            base = self.values
            mode = "nearest"
        re = ndimage.map_coordinates(np.ascontiguousarray(base.real), coords, order=3, mode=mode)
        im = ndimage.map_coordinates(np.ascontiguousarray(base.imag), coords, order=3, mode=mode)
        out = (re + 1j * im).reshape(z.shape)
        if self.periodic is not None:
            a, b, s, c = self.linear
            out = s * (a * z + b * np.conj(z) + out) + c
        return out.item() if np.ndim(z_in) == 0 else out

    def subgrid_mask(self, radius):
        Z = self.grid.points()
        d = Z - self.grid.center
        return (np.abs(d.real) <= radius) & (np.abs(d.imag) <= radius)


@dataclass
class ApproximationRun:
    schedule: list
    mappings: list
    distances: list
    subgrid_radius: float
    converged: bool
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {
            "schedule": list(self.schedule),
            "distances": list(self.distances),
            "subgrid_radius": self.subgrid_radius,
            "converged": self.converged,
            "failures": list(self.failures),
            "levels": [
                {"truncation": m.truncation, "residual": m.residual, "iterations": m.iterations,
                 "positive_fraction": m.positive_fraction, "contraction": m.contraction}
                for m in self.mappings
            ],
        }


# ---------------------------------------------------------------------------- truncation


def truncate_mu(field: MuField, n: int) -> MuField:
    """``mu`` where ``|mu| <= 1 - 1/n`` and 0 elsewhere."""
    if n < 2:
        raise ValueError("truncation level must be >= 2")
    level = 1.0 - 1.0 / n

    def raw(z):
        mu = field.raw(z)
        return np.where(np.abs(mu) <= level, mu, 0.0)

    params = {"base": field.key, "n": int(n)}
    return MuField("truncated", raw, params, field.support_radius, field.kind,
                   field.grid, field.samples)


# ---------------------------------------------------------------------------- spectral operators


class _Spectral:
    """Fourier multipliers on a periodic grid (Beurling transform and inverse dbar)."""

    def __init__(self, grid: GridSpec, workers=1):
        k = 2.0 * np.pi * sfft.fftfreq(grid.n, d=grid.spacing)
        KX, KY = np.meshgrid(k, k)
        xi = KX + 1j * KY
        nz = xi != 0
        safe = np.where(nz, xi, 1.0)
        self.beurling = np.where(nz, np.conj(safe) / safe, 0.0)
        self.dbar_inverse = np.where(nz, 2.0 / (1j * safe), 0.0)
        self.workers = workers

    def apply(self, mult, h):
        return sfft.ifft2(mult * sfft.fft2(h, workers=self.workers), workers=self.workers)


def _effective_support(grid: GridSpec, mu_grid):
    nz = np.abs(mu_grid) > 0
    if not np.any(nz):
        return 0.0
    Z = grid.points()
    return float(np.max(np.abs(Z[nz])))


def _node_index(grid: GridSpec, z):
    iy, ix = grid.fractional_index(np.asarray([z]))
    iy, ix = float(iy[0]), float(ix[0])
    if abs(iy - round(iy)) < 1e-9 and abs(ix - round(ix)) < 1e-9:
        return int(round(iy)), int(round(ix))
    return None


def solve_qc(field: MuField, grid: GridSpec, tol=1e-8, max_iter=5000, workers=1,
             gauge=(1.0, 0.0), truncation=None) -> Mapping:
    """Solve ``dbar f = mu * d f`` on ``grid`` with ``f(0)=0``, ``f(1)=1``.

    ``gauge = (a, b)`` post-composes the raw solution with ``a f + b`` before the
    normalisation; the returned mapping does not depend on it.
    Raises :class:`ConvergenceError` if the Neumann iteration has not reached ``tol``
    (grid L1-mean residual after normalisation) within ``max_iter`` steps.
    """
    Z = grid.points()
    mu = field(Z)
    k = float(np.max(np.abs(mu))) if mu.size else 0.0
    if k >= 1.0:
        raise DomainError("coefficient is not bounded away from 1 on the grid")
    support = _effective_support(grid, mu)
    if support > 0 and (grid.half_width < SUPPORT_FACTOR * support
                        or abs(grid.center) + support > grid.half_width):
        raise DomainError(
            f"grid half-width {grid.half_width} must be >= {SUPPORT_FACTOR} x coefficient "
            f"support radius {support:.4g}")
    for p in (0.0, 1.0):
        if not grid.contains(np.asarray(p)):
            raise DomainError("normalisation points 0 and 1 must lie inside the grid")

    sp = _Spectral(grid, workers)
    h = mu.copy()
    target = 0.1 * tol
    it = 0
    Sh = sp.apply(sp.beurling, h)
    res = float(np.mean(np.abs(mu * (1.0 + Sh) - h)))
    history = [res]
    while True:
        while res > target and it < max_iter:
            h = mu * (1.0 + Sh)
            Sh = sp.apply(sp.beurling, h)
            res = float(np.mean(np.abs(mu * (1.0 + Sh) - h)))
            history.append(res)
            it += 1
        m = complex(h.mean())
        u = sp.apply(sp.dbar_inverse, h)
        a, b = complex(gauge[0]), complex(gauge[1])
        raw = a * (Z + m * np.conj(Z) + u) + b

        def raw_at(p):
            idx = _node_index(grid, p)
            if idx is not None:
                return raw[idx]
            tmp = Mapping(grid, raw, periodic=u, linear=(1.0, m, a, b))
            return tmp.evaluate(p)

        f0, f1 = raw_at(0.0), raw_at(1.0)
        if f1 == f0:
            raise ConvergenceError("degenerate normalisation f(1) = f(0)", k, it, res)
        scale = 1.0 / (f1 - f0)
        final_res = res * abs(a * scale)
        if final_res <= tol:
            break
        if it >= max_iter:
            rate = _contraction_estimate(history)
            raise ConvergenceError(
                f"Neumann iteration did not reach tol={tol} in {max_iter} steps "
                f"(sup|mu| = {k:.6g}, observed rate {rate:.4g})", k, it, final_res)
        target = 0.5 * tol / abs(a * scale)

    values = scale * (raw - f0)
    dzbar = scale * a * h
    dz = scale * a * (1.0 + Sh)
    jac = np.abs(dz) ** 2 - np.abs(dzbar) ** 2
    mp = Mapping(
        grid=grid, values=values, dz=dz, dzbar=dzbar, truncation=truncation,
        residual=final_res, tol=tol, jacobian=jac,
        positive_fraction=_positive_fraction(jac), derivative_method="spectral",
        normalization={"f(0)": 0j, "f(1)": 1 + 0j, "raw_f0": f0, "raw_f1": f1},
        iterations=it, contraction=k, field_key=field.key,
        periodic=u, linear=(1.0 + 0j, m, scale * a, scale * (b - f0)),
    )
    return mp


def _contraction_estimate(history):
    h = [x for x in history if x > 0]
    if len(h) < 3:
        return math.nan
    return float((h[-1] / h[-3]) ** 0.5)


def _positive_fraction(jac):
    inner = jac[1:-1, 1:-1]
    return float(np.count_nonzero(inner > 0) / inner.size)


def solve_degenerate(field: MuField, schedule: Sequence[int], grid: GridSpec, tol=1e-8,
                     subgrid_radius=1.0, max_iter=20000, workers=1) -> ApproximationRun:
    """Solve the truncated equations for every level in ``schedule`` and track Cauchy distances.

    Distances are sup-norms between consecutive levels on the nodes with
    ``|x|, |y| <= subgrid_radius`` around the grid centre. The run is flagged converged
    when the distances shrink over the final two steps (or vanish) and the terminal
    mapping has positive Jacobian on at least 99% of interior nodes.
    """
    schedule = [int(s) for s in schedule]
    if len(schedule) < 3:
        raise ValueError("schedule needs at least three truncation levels")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing")
    mappings, failures = [], []
    for n in schedule:
        try:
            mappings.append(solve_qc(truncate_mu(field, n), grid, tol, max_iter, workers,
                                     truncation=n))
        except (ConvergenceError, DomainError) as exc:
            failures.append({"truncation": n, "error": type(exc).__name__, "message": str(exc)})
            break
    mask = mappings[0].subgrid_mask(subgrid_radius) if mappings else None
    distances = [float(np.max(np.abs(b.values[mask] - a.values[mask])))
                 for a, b in zip(mappings, mappings[1:])]
    converged = False
    if not failures and len(distances) >= 2:
        scale = max(1.0, float(np.max(np.abs(mappings[-1].values[mask]))))
        flat = all(d <= 10 * tol * scale for d in distances[-2:])
        shrinking = all(b < a for a, b in zip(distances[-3:], distances[-2:]))
        converged = (flat or shrinking) and mappings[-1].positive_fraction >= POSITIVITY_REQUIRED
    return ApproximationRun(schedule, mappings, distances, float(subgrid_radius), converged,
                            failures)


# ---------------------------------------------------------------------------- diagnostics


def derivatives_and_jacobian(m: Mapping) -> Mapping:
    """Replace the derivative fields by second-order central differences of the values."""
    h = m.grid.spacing
    fy, fx = np.gradient(m.values, h, h)
    dz = 0.5 * (fx - 1j * fy)
    dzbar = 0.5 * (fx + 1j * fy)
    jac = np.abs(dz) ** 2 - np.abs(dzbar) ** 2
    return replace(m, dz=dz, dzbar=dzbar, jacobian=jac, positive_fraction=_positive_fraction(jac),
                   derivative_method="central")


def residual(m: Mapping, field: MuField) -> float:
    """Grid L1-mean of ``|dbar f - mu * d f|`` using the derivative fields held by ``m``."""
    if m.dz is None or m.dzbar is None:
        m = derivatives_and_jacobian(m)
    mu = field(m.grid.points())
    return float(np.mean(np.abs(m.dzbar - mu * m.dz)))


def ring_inequality_check(f, z0, r1, r2, Q: Callable, m=1024, rtol=1e-3) -> CriterionVerdict:
    """Compare the circular-containment modulus bound of an image ring with ``int Q eta^2``.

    ``f`` is anything with an ``evaluate`` method (grid mapping or closed form).
    """
    if not 0 < r1 < r2:
        raise DomainError("need 0 < r1 < r2")
    if is_infinity(z0):
        raise DomainError("ring check is at finite points only")
    z0 = complex(z0)
    e = np.exp(1j * quad.angles(m))
    w0 = f.evaluate(z0)
    M1 = float(np.max(np.abs(f.evaluate(z0 + r1 * e) - w0)))
    m2 = float(np.min(np.abs(f.evaluate(z0 + r2 * e) - w0)))
    L = math.log(r2 / r1)

    def integrand(z):
        t = np.abs(z - z0)
        return np.asarray(Q(z), float) * (1.0 / (t * L)) ** 2

    rhs = quad.annulus_integral(integrand, z0, r1, r2, m=256)
    params = [r1, r2]
    if m2 <= M1:
        return CriterionVerdict("ring_inequality", INCONCLUSIVE, [(r1, M1), (r2, m2)], None,
                                ["image ring not radially separated (m2 <= M1)"],
                                {"M1": M1, "m2": m2, "rhs": rhs})
    U = 2.0 * math.pi / math.log(m2 / M1)
    verdict = HOLDS if U <= rhs * (1.0 + rtol) else INCONCLUSIVE
    notes = [f"U = {U:.10g}, RHS = {rhs:.10g}, relative gap {(rhs - U) / rhs:.3e}"]
    if verdict == INCONCLUSIVE:
        notes.append("circular-containment bound exceeds RHS; it only bounds the modulus above")
    return CriterionVerdict("ring_inequality", verdict, list(zip(params, [U, rhs])), None, notes,
                            {"M1": M1, "m2": m2, "U": U, "rhs": rhs})


__all__ = [
    "Mapping", "ApproximationRun", "truncate_mu", "solve_qc", "solve_degenerate",
    "derivatives_and_jacobian", "residual", "ring_inequality_check",
]
