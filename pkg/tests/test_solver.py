import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beltrami_lab.asymptotics import affine_mapping, identity_mapping, radial_stretch_mapping
from beltrami_lab.core import GridSpec, MuField, field_from_key
from beltrami_lab.errors import ConvergenceError, DomainError
from beltrami_lab.solver import (Mapping, derivatives_and_jacobian, residual,
                                 ring_inequality_check, solve_degenerate, solve_qc, truncate_mu)
from beltrami_lab.verdict import HOLDS, INCONCLUSIVE

STRETCH = field_from_key("radial-stretch:k=2")


def stretch_oracle(Z):
    return np.where(np.abs(Z) <= 1, Z * np.abs(Z), Z)


def ones_times(c):
    return lambda z: c * np.ones(np.shape(z))


# ---------------------------------------------------------------------------- truncation


def test_truncate_zero_field_stays_zero():
    g = GridSpec(0j, 2.0, 32)
    for n in (2, 5, 50):
        assert np.all(truncate_mu(field_from_key("zero"), n)(g.points()) == 0)


def test_truncate_removes_large_constant():
    f = field_from_key("constant:re=0.9")
    g = GridSpec(0j, 2.0, 32)
    assert np.all(truncate_mu(f, 5)(g.points()) == 0)
    assert np.allclose(truncate_mu(f, 20)(g.points()), 0.9)


def test_truncate_shabat_matches_pointwise_threshold():
    f = field_from_key("shabat")
    Z = GridSpec(0j, 0.5, 64).points()
    mu = f.raw(Z)
    expected = np.where(np.abs(mu) <= 1 - 1 / 4, mu, 0)
    assert np.array_equal(truncate_mu(f, 4).raw(Z), expected)
    assert np.any(expected == 0) and np.any(expected != 0)


def test_truncate_rejects_small_level():
    with pytest.raises(ValueError):
        truncate_mu(STRETCH, 1)


# ---------------------------------------------------------------------------- quasiconformal solve


def test_zero_coefficient_gives_identity():
    g = GridSpec(0j, 4.0, 64)
    m = solve_qc(field_from_key("zero"), g)
    assert np.max(np.abs(m.values - g.points())) <= 1e-12


@pytest.mark.parametrize("n,bound", [(64, 0.06), (128, 0.04), (256, 0.025)])
def test_radial_stretch_oracle(n, bound):
    g = GridSpec(0j, 4.0, n)
    m = solve_qc(STRETCH, g, tol=1e-8)
    assert np.max(np.abs(m.values - stretch_oracle(g.points()))) <= bound
    assert m.residual <= 1e-8
    assert m.positive_fraction >= 0.99


def test_hand_built_coefficient_matches_same_oracle():
    def raw(z):
        a = np.abs(z)
        q = np.where(a > 0, (z / np.where(a > 0, a, 1)) ** 2, 0)
        return np.where(a <= 1, q / 3, 0)

    g = GridSpec(0j, 4.0, 128)
    m = solve_qc(MuField("custom", raw, support_radius=1.0), g)
    ref = solve_qc(STRETCH, g)
    assert np.max(np.abs(m.values - ref.values)) <= 1e-12


def test_normalisation_points():
    g = GridSpec(0j, 4.0, 128)
    m = solve_qc(field_from_key("shabat"), g)
    assert abs(m.evaluate(0.0)) <= 1e-9
    assert abs(m.evaluate(1.0) - 1) <= 1e-9


def test_convergence_error_reports_contraction():
    f = field_from_key("constant:re=0.99,support=0.5")
    with pytest.raises(ConvergenceError) as err:
        solve_qc(f, GridSpec(0j, 4.0, 64), tol=1e-12, max_iter=3)
    assert "0.99" in str(err.value)


def test_support_rule_enforced():
    with pytest.raises(DomainError):
        solve_qc(field_from_key("radial-stretch:k=2,support=2"), GridSpec(0j, 4.0, 64))


def test_gauge_does_not_change_solution():
    g = GridSpec(0j, 4.0, 128)
    a = solve_qc(STRETCH, g, tol=1e-8)
    b = solve_qc(STRETCH, g, tol=1e-8, gauge=(2 - 3j, 5 + 1j))
    assert np.max(np.abs(a.values - b.values)) <= 1e-8


@settings(max_examples=10)
@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_gauge_equivariance_property(a, b):
    g = GridSpec(0j, 4.0, 64)
    base = solve_qc(field_from_key("shabat"), g, tol=1e-8)
    other = solve_qc(field_from_key("shabat"), g, tol=1e-8, gauge=(a, b))
    assert np.max(np.abs(base.values - other.values)) <= 1e-8


@pytest.mark.parametrize("key", ["zero", "constant:re=0.3,support=0.5", "radial-stretch:k=2",
                                 "radial-stretch:k=0.5", "shabat", "log-spiral",
                                 "radial-profile:profile=log"])
def test_residual_postcondition_on_builtins(key):
    f = field_from_key(key)
    if key.startswith("radial-profile"):
        f = truncate_mu(f, 8)
    m = solve_qc(f, GridSpec(0j, 4.0, 128), tol=1e-8)
    assert m.residual <= 1e-8


# ---------------------------------------------------------------------------- degenerate scheme


def test_bounded_field_distances_vanish():
    run = solve_degenerate(STRETCH, [2, 4, 8, 16], GridSpec(0j, 4.0, 64))
    assert run.distances[1:] == [0.0, 0.0]
    assert run.converged


def test_fmo_log_profile_converges():
    run = solve_degenerate(field_from_key("radial-profile:profile=log"), [2, 4, 8, 16],
                           GridSpec(0j, 4.0, 128))
    assert run.converged and not run.failures
    assert run.mappings[-1].positive_fraction >= 0.99
    assert run.distances[-1] <= run.distances[0]


def test_ring_stress_case_not_converged():
    run = solve_degenerate(field_from_key("radial-profile:profile=ring"), [2, 4, 8, 16],
                           GridSpec(0j, 12.0, 128))
    assert not run.converged
    assert run.distances[-1] > run.distances[0]


def test_schedule_validation():
    g = GridSpec(0j, 4.0, 32)
    with pytest.raises(ValueError):
        solve_degenerate(STRETCH, [2, 4], g)
    with pytest.raises(ValueError):
        solve_degenerate(STRETCH, [2, 8, 4], g)


def test_failed_level_gives_partial_run():
    run = solve_degenerate(field_from_key("constant:re=0.99,support=0.5"), [2, 200, 400],
                           GridSpec(0j, 4.0, 32), tol=1e-12, max_iter=3)
    assert run.failures and run.failures[0]["error"] == "ConvergenceError"
    assert not run.converged
    assert len(run.mappings) == 1


# ---------------------------------------------------------------------------- derivatives, residual


def test_derivatives_of_identity():
    g = GridSpec(0j, 2.0, 64)
    m = derivatives_and_jacobian(Mapping.from_values(g, g.points()))
    inner = (slice(1, -1), slice(1, -1))
    assert np.max(np.abs(m.dz[inner] - 1)) <= 1e-12
    assert np.max(np.abs(m.dzbar[inner])) <= 1e-12
    assert np.max(np.abs(m.jacobian[inner] - 1)) <= 1e-12


def test_jacobian_of_z_abs_z():
    g = GridSpec(0j, 2.0, 128)
    Z = g.points()
    m = derivatives_and_jacobian(Mapping.from_values(g, Z * np.abs(Z)))
    inner = (slice(2, -2), slice(2, -2))
    off = np.abs(Z[inner]) > 4 * g.spacing
    err = np.abs(m.jacobian[inner] - 2 * np.abs(Z[inner]) ** 2)[off]
    assert np.max(err) <= 1e-3
    assert m.positive_fraction >= 0.99


def test_conjugation_detected_as_reversing():
    g = GridSpec(0j, 2.0, 32)
    m = derivatives_and_jacobian(Mapping.from_values(g, np.conj(g.points())))
    assert np.allclose(m.jacobian[1:-1, 1:-1], -1)
    assert m.positive_fraction == 0.0


def test_residual_examples():
    g = GridSpec(0j, 2.0, 64)
    ident = Mapping.from_values(g, g.points())
    assert residual(ident, field_from_key("zero")) <= 1e-12
    f = field_from_key("constant:re=0.2,im=0.1,support=1")
    assert residual(ident, f) == pytest.approx(np.mean(np.abs(f(g.points()))), rel=1e-12)


def test_oracle_residual_shrinks_with_spacing():
    errs = []
    for n in (64, 128, 256):
        g = GridSpec(0j, 4.0, n)
        errs.append(residual(Mapping.from_values(g, stretch_oracle(g.points())), STRETCH))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] <= 4 * GridSpec(0j, 4.0, 256).spacing


# ---------------------------------------------------------------------------- ring inequality


@pytest.mark.parametrize("r1,r2", [(0.5, 2.0), (0.25, 0.5), (1.0, 3.0)])
def test_ring_identity_equality(r1, r2):
    v = ring_inequality_check(identity_mapping(), 0j, r1, r2, ones_times(1.0))
    assert v.verdict == HOLDS
    U, rhs = v.extra["U"], v.extra["rhs"]
    assert U == pytest.approx(2 * np.pi / np.log(r2 / r1), rel=1e-3)
    assert rhs == pytest.approx(U, rel=1e-3)


@pytest.mark.parametrize("r1,r2", [(0.5, 2.0), (0.25, 0.5), (1.0, 3.0)])
def test_ring_radial_stretch_equality(r1, r2):
    v = ring_inequality_check(radial_stretch_mapping(2.0), 0j, r1, r2, ones_times(0.5))
    assert v.verdict == HOLDS
    assert v.extra["U"] == pytest.approx(np.pi / np.log(r2 / r1), rel=1e-3)
    assert v.extra["rhs"] == pytest.approx(v.extra["U"], rel=1e-3)


def test_ring_sheared_inconclusive():
    v = ring_inequality_check(affine_mapping(0.9), 0j, 0.5, 0.6, ones_times(1.0))
    assert v.verdict == INCONCLUSIVE
    assert "not radially separated" in v.notes[0]


def test_ring_on_solved_mapping():
    g = GridSpec(0j, 4.0, 256)
    m = solve_qc(STRETCH, g)
    v = ring_inequality_check(m, 0j, 0.25, 0.75, ones_times(0.5))
    assert v.extra["m2"] > v.extra["M1"]
    assert v.extra["U"] == pytest.approx(np.pi / np.log(3), rel=0.1)


def test_ring_rejects_bad_radii():
    with pytest.raises(DomainError):
        ring_inequality_check(identity_mapping(), 0j, 2.0, 1.0, ones_times(1.0))
