import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami_lab.core import (INF, K_CAP, MU_CLAMP, GridSpec, PhiFunction, builtin_field,
                               circle_mean_kt, eval_mu, field_from_key, grid_field, is_infinity,
                               k_mu, k_tangent, k_tangent_values, parse_key, phi_inverse,
                               spherical_area_integral, spherical_diameter, spherical_distance)
from beltrami_lab.errors import DomainError

finite = st.floats(-50, 50, allow_nan=False)
points = st.builds(complex, finite, finite)


# ---------------------------------------------------------------- coefficients


def test_zero_field_is_zero():
    assert eval_mu(field_from_key("zero"), 0.3 + 0.1j) == 0


def test_radial_stretch_at_one():
    assert eval_mu(field_from_key("radial-stretch:k=2"), 1 + 0j) == pytest.approx(1 / 3, abs=1e-15)


def test_shabat_modulus_at_inverse_e():
    f = field_from_key("shabat:support=0.9")
    z = math.exp(-1) * np.exp(0.7j)
    mu = eval_mu(f, z)
    assert abs(mu) == pytest.approx(1 / 3, abs=1e-14)
    expected = -(z / np.conj(z)) / 3.0
    assert mu == pytest.approx(expected, abs=1e-14)


def test_eval_at_infinity_raises():
    with pytest.raises(DomainError):
        eval_mu(field_from_key("zero"), INF)


def test_infinity_only_equals_itself():
    assert INF == INF and is_infinity(INF)
    assert INF != 0 and not is_infinity(1e308)


def test_shabat_support_must_stay_inside_unit_disk():
    with pytest.raises(DomainError):
        field_from_key("shabat:support=1.0")


def test_parse_key():
    assert parse_key("radial-stretch:k=2.0,support=1") == ("radial-stretch",
                                                           {"k": 2.0, "support": 1.0})
    with pytest.raises(ValueError):
        parse_key("zero:k")


def test_clamp_counter():
    f = builtin_field("constant", re=1.5, im=0.0)
    mu = f(np.array([0.1 + 0j, 0.2 + 0j]))
    assert np.all(np.abs(mu) <= MU_CLAMP)
    assert f.stats.clamped == 2


def test_grid_field_zero_outside_and_bilinear_inside():
    g = GridSpec(0j, 2.0, 16)
    Z = g.points()
    f = grid_field(g, 0.1 * Z.real + 0j)
    assert eval_mu(f, 10 + 0j) == 0
    # bilinear interpolation reproduces linear data
    assert eval_mu(f, 0.33 - 0.2j).real == pytest.approx(0.033, abs=1e-12)


@given(points)
def test_mu_modulus_below_one(z):
    for key in ("radial-stretch:k=5", "shabat", "log-spiral", "radial-profile:profile=log2"):
        assert abs(eval_mu(field_from_key(key), z)) < 1


# ---------------------------------------------------------------- dilatations


def test_k_mu_values():
    assert k_mu(field_from_key("zero"), 0.5j) == 1
    assert k_mu(field_from_key("radial-stretch:k=2"), 0.3 + 0.4j) == pytest.approx(2.0, rel=1e-14)


def test_k_mu_cap_flag():
    k, flag = k_mu(builtin_field("constant", re=0.999999999), 0.1, cap=10.0, return_flag=True)
    assert k == 10.0 and flag


def test_k_tangent_zero_field():
    assert k_tangent(field_from_key("zero"), 0.2 + 0.1j, -0.5j) == 1.0


@pytest.mark.parametrize("k", [2.0, 3.0, 7.5])
def test_k_tangent_radial_stretch_is_one_over_k(k, rng):
    f = field_from_key(f"radial-stretch:k={k}")
    r = rng.uniform(0.01, 1.0, 200)
    z = r * np.exp(2j * np.pi * rng.uniform(size=200))
    np.testing.assert_allclose(k_tangent(f, z, 0.0), 1.0 / k, rtol=1e-12)


def test_k_tangent_at_z0_raises():
    with pytest.raises(DomainError):
        k_tangent(field_from_key("zero"), 0.5, 0.5)


def test_k_tangent_infinity_convention():
    f = field_from_key("radial-profile:profile=log-inf")
    z = 3.0 + 4.0j
    assert k_tangent(f, z, INF) == pytest.approx(k_tangent(f, 1 / z, 0.0), rel=1e-15)


@given(st.floats(0, 0.999), st.floats(-math.pi, math.pi), points, points)
def test_sandwich_inequality(a, t, z, z0):
    if z == z0:
        return
    mu = a * np.exp(1j * t)
    kt = float(k_tangent_values(mu, z, z0))
    K = (1 + a) / (1 - a)
    assert kt <= min(K, K_CAP) * (1 + 1e-12)
    assert kt >= max(1 / K, 1 / K_CAP) * (1 - 1e-12)


def test_circle_mean_kt_values():
    assert circle_mean_kt(field_from_key("zero"), 0j, 0.3) == pytest.approx(1.0, abs=1e-15)
    f = field_from_key("radial-stretch:k=3")
    for r in (0.1, 0.5, 0.9):
        assert abs(circle_mean_kt(f, 0j, r) - 1 / 3) < 1e-12


def test_circle_mean_kt_grid_field_matches_analytic():
    g = GridSpec(0j, 2.0, 256)
    exact = field_from_key("radial-stretch:k=3")
    gf = grid_field(g, exact(g.points()))
    # K^T is constant 1/3 on circles, so interpolation error of mu is what is measured
    assert abs(circle_mean_kt(gf, 0j, 0.6) - 1 / 3) < 1e-3


@given(st.floats(0, 2 * math.pi), st.floats(0.05, 0.35))
def test_circle_mean_offset_invariance(offset, r):
    # circles stay inside the support and at least 0.09 away from the singular origin,
    # so the coefficient is smooth along them
    c = 0.4 + 0.2j
    for key in ("shabat:support=0.9", "log-spiral:support=0.9"):
        f = field_from_key(key)
        base = circle_mean_kt(f, c, r)
        assert abs(circle_mean_kt(f, c, r, offset=offset) - base) < 1e-6


# ---------------------------------------------------------------- spherical geometry


def test_spherical_distance_values():
    assert spherical_distance(0, INF) == 1.0
    assert spherical_distance(0, 1) == pytest.approx(1 / math.sqrt(2), abs=1e-16)
    assert spherical_distance(1, 1) == 0.0


def test_spherical_diameter_values():
    assert spherical_diameter([0, INF]) == 1.0
    assert spherical_diameter([0, 1]) == pytest.approx(1 / math.sqrt(2))
    assert spherical_diameter([0, 1, INF]) == 1.0
    with pytest.raises(DomainError):
        spherical_diameter([0])


@given(points, points, points)
def test_spherical_metric_axioms(a, b, c):
    dab, dba = spherical_distance(a, b), spherical_distance(b, a)
    assert dab == dba and 0 <= dab <= 1
    assert (dab == 0) == (a == b)
    assert spherical_distance(a, c) <= dab + spherical_distance(b, c) + 1e-12


def test_spherical_area_closed_forms():
    one = lambda z: np.ones(np.shape(z))
    for R in (0.5, 2.0, 10.0):
        v = spherical_area_integral(one, (R, math.inf)).value
        assert v == pytest.approx(4 * math.pi / (1 + R * R), rel=1e-3)
    assert spherical_area_integral(one, (0.0, math.inf)).value == pytest.approx(4 * math.pi, rel=1e-3)
    assert spherical_area_integral(lambda z: np.zeros(np.shape(z)), (0, 3)).value == 0
    unit = spherical_area_integral(one, (0.0, math.inf), normalization="unit").value
    assert unit == pytest.approx(math.pi, rel=1e-3)


def test_spherical_area_flags_non_integrable_tail():
    r2 = lambda z: np.abs(z) ** 2
    assert spherical_area_integral(r2, (1.0, math.inf)).flagged


# ---------------------------------------------------------------- Phi


def test_phi_inverse_examples():
    assert phi_inverse(PhiFunction("identity"), 5.0) == 5.0
    assert phi_inverse(PhiFunction("constant", c=1.0), 2.0) == math.inf
    assert abs(phi_inverse(PhiFunction("exp"), math.e ** 2) - 2.0) < 1e-9


def test_phi_inverse_bisection_oracle():
    phi = PhiFunction("tlog")
    for t in (0.3, 2.0, 17.0):
        assert phi_inverse(phi, float(phi(t))) == pytest.approx(t, rel=1e-10)


def test_phi_table_extrapolates_by_last_slope():
    phi = PhiFunction.table([0, 1, 2], [0, 1, 3])
    assert float(phi(4.0)) == pytest.approx(7.0)
    assert phi_inverse(phi, 7.0) == pytest.approx(4.0)


def test_phi_table_must_be_monotone():
    with pytest.raises(ValueError):
        PhiFunction.table([0, 1, 2], [0, 2, 1])


@pytest.mark.parametrize("key", ["exp", "exp:alpha=0.5", "power:p=3", "tlog", "identity",
                                 "constant:c=2"])
def test_phi_inverse_sweep(key):
    phi = PhiFunction.from_key(key)
    t = np.linspace(0, 30, 1000)
    tau = np.asarray(phi(t), float)
    inv = np.asarray(phi_inverse(phi, tau), float)
    assert np.all(inv <= t * (1 + 1e-9) + 1e-12)
    taus = np.linspace(0, float(tau.max()), 1000)
    assert np.all(np.diff(np.asarray(phi_inverse(phi, taus), float)) >= 0)
