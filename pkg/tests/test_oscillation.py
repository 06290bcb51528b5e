import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_lab.errors import DomainError
from beltrami_lab.oscillation import (DiskFamily, bmo_norm_estimate, default_bound_ladder,
                                      disk_mean, dispersion_ladder, fmo_bound_check, fmo_test,
                                      lebesgue_point_test, maximal_dispersion, mean_oscillation,
                                      scalar_from_key, vmo_test)
from beltrami_lab.verdict import FAILS, HOLDS

from conftest import const, log_inv

inv = lambda z: 1.0 / np.abs(z)
re = lambda z: np.real(z)


def test_disk_mean_constant_and_odd():
    assert disk_mean(const(3.5), 0.2j, 0.4) == pytest.approx(3.5, abs=1e-14)
    assert abs(disk_mean(re, 0j, 0.7)) < 1e-9


def test_disk_mean_of_log_increases_to_infinity():
    eps = 0.5 * 2.0 ** -np.arange(10)
    means = [disk_mean(log_inv, 0j, e) for e in eps]
    assert np.all(np.diff(means) > 0)
    # oracle: the exact mean of log(1/|z|) over D(0, e) is log(1/e) + 1/2
    np.testing.assert_allclose(means, np.log(1 / eps) + 0.5, rtol=5e-3)


def test_mean_oscillation_constant_is_zero():
    assert mean_oscillation(const(2.0), 1j, 0.3) == 0.0


def test_mean_oscillation_log_bounded_and_inv_grows():
    eps = 0.5 * 2.0 ** -np.arange(12)
    lo = [mean_oscillation(log_inv, 0j, e) for e in eps]
    hi = [mean_oscillation(inv, 0j, e) for e in eps]
    assert max(lo) < 1.0
    assert hi[-1] / hi[0] > 1000


def test_linear_oscillation_closed_form():
    # mean |x| over a disk of radius r is 4 r / (3 pi)
    for r in (0.25, 1.0):
        assert mean_oscillation(re, 0j, r) == pytest.approx(4 * r / (3 * math.pi), rel=2e-3)


@given(st.floats(-100, 100), st.floats(0.05, 1.0))
def test_oscillation_invariant_under_constants(c, eps):
    phi = lambda z: np.real(z) ** 2 + np.imag(z)
    a = mean_oscillation(phi, 0.1j, eps)
    b = mean_oscillation(lambda z: phi(z) + c, 0.1j, eps)
    assert abs(a - b) < 1e-10 * max(1.0, abs(c))


@given(st.floats(-20, 20))
def test_bmo_estimate_is_homogeneous(a):
    fam = DiskFamily.dyadic(4)
    phi = lambda z: np.log(1.0 + np.abs(z - 0.3))
    base = bmo_norm_estimate(phi, family=fam).estimate
    scaled = bmo_norm_estimate(lambda z: a * phi(z), family=fam).estimate
    assert abs(scaled - abs(a) * base) < 1e-10 * max(1.0, abs(a) * base)


def test_bmo_constant_zero():
    assert bmo_norm_estimate(const(1.0)).estimate == 0.0


def test_bmo_log_stable_under_refinement():
    a = bmo_norm_estimate(log_inv, family=DiskFamily.dyadic(6)).estimate
    b = bmo_norm_estimate(log_inv, family=DiskFamily.dyadic(12)).estimate
    assert abs(b - a) / a < 0.05


def test_bmo_inv_grows_under_refinement():
    a = bmo_norm_estimate(inv, family=DiskFamily.dyadic(6)).estimate
    b = bmo_norm_estimate(inv, family=DiskFamily.dyadic(12)).estimate
    assert b > 10 * a


def test_bmo_report_records_maximiser_and_monotone_sup():
    rep = bmo_norm_estimate(inv, family=DiskFamily.random(30, seed=1))
    assert np.all(np.diff(rep.running_sup) >= 0)
    assert rep.oscillations[rep.argmax] == rep.estimate
    for c, r in rep.disks:
        assert abs(c) + r <= 1.0 + 1e-12 and r > 0


def test_family_outside_region_rejected():
    with pytest.raises(ValueError):
        bmo_norm_estimate(re, region=(0j, 0.5), family=DiskFamily.dyadic(3))


def test_maximal_dispersion():
    assert maximal_dispersion(const(4.0), 0j, 0.5) == 0.0
    d0 = maximal_dispersion(log_inv, 0j, 0.5)
    assert 0 < d0 < 1
    radii, vals = dispersion_ladder(re, 0j, 1.0)
    assert np.argmax(vals) == 0 and radii[0] == 1.0


def test_maximal_dispersion_dominates_each_rung():
    radii, vals = dispersion_ladder(log_inv, 0.1j, 0.5)
    d = maximal_dispersion(log_inv, 0.1j, 0.5)
    for r, v in zip(radii, vals):
        assert d >= mean_oscillation(log_inv, 0.1j, r)
        assert v == mean_oscillation(log_inv, 0.1j, r)


def test_fmo_verdicts():
    assert fmo_test(const(1.0), 0j).verdict == HOLDS
    assert fmo_test(log_inv, 0j).verdict == HOLDS
    assert fmo_test(inv, 0j).verdict == FAILS


def test_fmo_non_integrable_fails():
    v = fmo_test(lambda z: 1.0 / np.abs(z) ** 3, 0j)
    assert v.verdict == FAILS


def test_lebesgue_verdicts():
    assert lebesgue_point_test(lambda z: np.cos(np.real(z)), 0.3j).verdict == HOLDS
    assert lebesgue_point_test(lambda z: (np.real(z) > 0).astype(float), 0j).verdict == FAILS
    assert lebesgue_point_test(log_inv, 1 + 0j).verdict == HOLDS
    with pytest.raises(DomainError):
        lebesgue_point_test(log_inv, 0j)


def test_fmo_bound_passes():
    for phi in (const(1.0), log_inv, const(0.0)):
        rep = fmo_bound_check(phi)
        assert rep.passed, rep.violations
        assert len(rep.lhs) == len(default_bound_ladder())


def test_fmo_bound_constant_closed_form():
    rep = fmo_bound_check(const(1.0))
    # radial integral of 1/(r log2(1/r))^2 from eps to 1/2
    eps = np.asarray(rep.eps)
    exact = 2 * math.pi * math.log(2) ** 2 * (1 / math.log(2) - 1 / np.log(1 / eps))
    np.testing.assert_allclose(rep.lhs, exact, rtol=1e-6)
    assert rep.C == pytest.approx(4 * math.pi)


def test_vmo():
    assert vmo_test(re).verdict == HOLDS
    assert vmo_test(log_inv).verdict == FAILS


def test_scalar_registry():
    assert scalar_from_key("one:c=2")(np.array([1j]))[0] == 2.0
    assert scalar_from_key("log:re=1")(np.array([0j]))[0] == 0.0
    assert scalar_from_key("log:plus=true")(np.array([3.0 + 0j]))[0] == 0.0
    with pytest.raises(ValueError):
        scalar_from_key("nope")
