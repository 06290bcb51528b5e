import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beltrami_lab.asymptotics import (EvaluableMapping, affine_mapping, angle_modulus_profiles,
                                      belinskij_test, closed_form_for_field, default_scales,
                                      default_zeta_set, distortion_bound_check,
                                      homogeneity_profile, identity_mapping, lavrentiev_ratio,
                                      log_ratio_profile, log_spiral_mapping, mapping_from_key,
                                      radial_stretch_mapping, shabat_mapping, sparseness,
                                      theorem1_suite)
from beltrami_lab.core import GridSpec, field_from_key
from beltrami_lab.errors import DomainError
from beltrami_lab.solver import solve_qc
from beltrami_lab.verdict import FAILS, HOLDS

LN2 = math.log(2)
DEEP = 2.0 ** -np.arange(2, 21)  # ends at |z| = 2^-20
BUILTINS = [identity_mapping, shabat_mapping, log_spiral_mapping,
            lambda: radial_stretch_mapping(2.0), lambda: radial_stretch_mapping(0.5)]


def ones(c=1.0):
    return lambda z: c * np.ones(np.shape(z))


# ---------------------------------------------------------------------------- evaluable mappings


def test_zeta_set_shape():
    z = default_zeta_set()
    assert len(z) == 64
    assert 0 in z and 1 in z
    assert np.max(np.abs(z)) <= 2 + 1e-15


def test_default_scales_monotone():
    assert np.all(np.diff(default_scales("to-zero")) < 0)
    assert np.all(np.diff(default_scales("to-infinity")) > 0)


def test_closed_form_domain_enforced():
    with pytest.raises(DomainError):
        shabat_mapping().evaluate(1.5)


def test_closed_forms_follow_fields():
    assert closed_form_for_field(field_from_key("zero")).key == "identity"
    f = closed_form_for_field(field_from_key("radial-stretch:k=2"))
    assert f.evaluate(0.5) == pytest.approx(0.25)
    assert f.evaluate(2j) == pytest.approx(2j)
    with pytest.raises(ValueError):
        closed_form_for_field(field_from_key("constant:re=0.2"))


def test_mapping_keys_round_trip():
    for key in ("identity", "shabat", "log-spiral", "radial-stretch:k=3.0"):
        assert mapping_from_key(key).key == key


def test_inverted_mapping_moves_infinity_to_origin():
    inv = radial_stretch_mapping(2.0).inverted()
    assert inv.evaluate(0.5) == pytest.approx(1 / radial_stretch_mapping(2.0).evaluate(2.0))
    with pytest.raises(DomainError):
        shabat_mapping().inverted()


def test_grid_mapping_never_extrapolates():
    g = GridSpec(0j, 4.0, 128)
    em = EvaluableMapping.from_mapping(solve_qc(field_from_key("shabat"), g))
    with pytest.raises(DomainError):
        em.evaluate(5.0)
    assert list(em.usable(np.array([0.01, 0.5, 4.5]))) == [False, True, False]


def test_grid_profile_needs_trusted_scales():
    g = GridSpec(0j, 3.0, 128)  # trust radius 4 cells = 0.1875
    em = EvaluableMapping.from_mapping(solve_qc(field_from_key("shabat"), g))
    with pytest.raises(DomainError):
        homogeneity_profile(em)
    p = lavrentiev_ratio(em, scales=2.0 ** -np.arange(-1, 5, dtype=float))
    assert p.scales == [2.0, 1.0, 0.5, 0.25]
    assert p.trust_horizon == 0.25


# ---------------------------------------------------------------------------- profile examples


def test_identity_profiles_vanish():
    # zero up to the rounding of (zeta z) / z
    f = identity_mapping()
    assert max(homogeneity_profile(f).errors) <= 1e-15
    assert max(lavrentiev_ratio(f).errors) <= 1e-15
    a, m = angle_modulus_profiles(f)
    assert max(a.errors) <= 1e-15 and max(m.errors) <= 1e-15
    assert max(log_ratio_profile(f).errors) <= 1e-15


def test_shabat_homogeneity_closed_form():
    p = homogeneity_profile(shabat_mapping(), scales=DEEP)
    assert p.errors[-1] == pytest.approx(2 * LN2 / (1 + 20 * LN2), abs=1e-9)
    assert p.verdict.verdict == HOLDS


def test_stretch_homogeneity_fails():
    p = homogeneity_profile(radial_stretch_mapping(2.0))
    assert np.allclose(p.errors, 2.0)
    assert p.verdict.verdict == FAILS


@pytest.mark.parametrize("make", [identity_mapping, log_spiral_mapping,
                                  lambda: radial_stretch_mapping(2.0)])
def test_lavrentiev_ratio_one_for_radial_modulus(make):
    p = lavrentiev_ratio(make())
    assert max(p.errors) <= 1e-12
    assert p.verdict.verdict == HOLDS


def test_log_spiral_angle_closed_form():
    zeta = np.array([0.5, 2.0])
    a, _ = angle_modulus_profiles(log_spiral_mapping(), zeta=zeta, scales=DEEP)
    for s, e in zip(DEEP, a.errors):
        L = math.log(1 / s)
        expected = max(abs(math.sqrt(L - math.log(abs(z))) - math.sqrt(L)) for z in zeta)
        assert e == pytest.approx(expected, abs=1e-9)


def test_shabat_modulus_rate():
    _, m = angle_modulus_profiles(shabat_mapping(), scales=DEEP)
    assert m.errors[-1] == pytest.approx(2 * LN2 / (1 + 20 * LN2), abs=1e-9)


def test_log_ratio_examples():
    p = log_ratio_profile(shabat_mapping(), scales=DEEP)
    assert p.errors[-1] == pytest.approx(math.log(1 + 20 * LN2) / (20 * LN2), abs=1e-9)
    q = log_ratio_profile(radial_stretch_mapping(2.0))
    assert np.allclose(q.errors, 1.0) and q.verdict.verdict == FAILS
    with pytest.raises(DomainError):
        log_ratio_profile(identity_mapping(), scales=[2.0, 1.0, 0.5, 0.25])


def test_belinskij_examples():
    p = belinskij_test(affine_mapping(0.3 + 0.1j), mu0=0.3 + 0.1j)
    assert max(p.errors) <= 1e-12
    assert max(p.extra["homogeneity"].errors) <= 1e-12
    s = belinskij_test(shabat_mapping(), scales=DEEP)
    assert s.errors[-1] == pytest.approx(LN2 / (1 + 20 * LN2), abs=1e-9)
    assert s.values[-1] == pytest.approx(1 + 20 * LN2)
    assert belinskij_test(radial_stretch_mapping(2.0)).verdict.verdict == FAILS
    with pytest.raises(DomainError):
        belinskij_test(identity_mapping(), mu0=1.0)


# ---------------------------------------------------------------------------- invariants


@pytest.mark.parametrize("make", BUILTINS)
def test_zeta_one_and_zero_exact(make):
    p = homogeneity_profile(make(), zeta=np.array([0, 1], complex))
    assert max(p.errors) == 0.0


@settings(max_examples=30)
@given(st.floats(0.2, 5.0), st.integers(2, 40))
def test_lavrentiev_at_least_one(k, j):
    f = radial_stretch_mapping(k)
    for g in (f, affine_mapping(0.5 * (k - 1) / (k + 1))):
        p = lavrentiev_ratio(g, scales=2.0 ** -np.arange(j, j + 5, dtype=float))
        assert min(p.values) >= 1.0


@settings(max_examples=20)
@given(st.integers(2, 40), st.sampled_from(["shabat", "log-spiral"]))
def test_measured_errors_equal_closed_form_rates(j, name):
    f = mapping_from_key(name)
    scales = 2.0 ** -np.arange(j, j + 4, dtype=float)
    p = homogeneity_profile(f, scales=scales)
    assert np.allclose(p.errors, p.floors, atol=1e-9, rtol=0)
    a, m = angle_modulus_profiles(f, scales=scales)
    assert np.allclose(a.errors, a.floors, atol=1e-9, rtol=0)
    assert np.allclose(m.errors, m.floors, atol=1e-9, rtol=0)


@pytest.mark.parametrize("make", BUILTINS)
def test_theorem1_consistent_on_builtins(make):
    f = make()
    rep = theorem1_suite(f)
    assert rep.consistent
    expected = FAILS if f.name == "radial-stretch" else HOLDS
    assert {v.verdict for v in rep.verdicts.values()} == {expected}
    assert set(rep.verdicts) == {"belinskij", "ray", "two_point", "pointwise", "uniform"}


# ---------------------------------------------------------------------------- sparseness


def test_sparseness_examples():
    dy = sparseness(lambda n: 2.0 ** -n)
    assert max(dy.values) <= 2.0 + 1e-12 and dy.verdict.verdict == HOLDS
    sq = sparseness(lambda n: 2.0 ** -(n * n))
    assert sq.verdict.verdict == FAILS and max(sq.values) > 1e6
    ray = sparseness("ray")
    assert set(ray.values) == {1.0} and ray.verdict.verdict == HOLDS


def test_sparseness_skips_unstraddled_rungs():
    rep = sparseness(2.0 ** -np.arange(1, 60, dtype=float))
    assert rep.skipped
    assert rep.verdict.verdict == HOLDS


# ---------------------------------------------------------------------------- distortion bound


def test_distortion_identity_and_stretch():
    rep = distortion_bound_check(identity_mapping(), ones(1.0), 0j, 0.5, 1.0)
    assert rep.passed and len(rep.probes) == 100
    assert rep.d0 == pytest.approx(0.0, abs=1e-12) and rep.alpha0 == pytest.approx(2.0)
    assert distortion_bound_check(radial_stretch_mapping(2.0), ones(2.0), 0j, 0.5, 1.0).passed


def test_distortion_reproducible_with_seed():
    a = distortion_bound_check(identity_mapping(), ones(1.0), 0.1j, 0.5, 0.5, seed=3)
    b = distortion_bound_check(identity_mapping(), ones(1.0), 0.1j, 0.5, 0.5, seed=3)
    assert a.probes == b.probes and a.lhs == b.lhs


def test_distortion_rejects_bad_delta():
    with pytest.raises(DomainError):
        distortion_bound_check(identity_mapping(), ones(1.0), 0j, 0.5, 2.0)
