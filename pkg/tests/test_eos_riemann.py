from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from vpbwaves.eos_riemann import (EndStates, ThermoState, curve_velocity, eigenvalue, entropy,
                                  forward_end_state, pressure, rarefaction_u, riemann_fan_eval,
                                  solve_star_states, theta_from_vs, volume_from_speed,
                                  wave_strengths)
from vpbwaves.errors import DomainError, NoSolution, ValidationError


def test_pressure_and_entropy_values():
    assert pressure(1.0, 1.5) == pytest.approx(1.0)
    assert pressure(2.0, 3.0) == pytest.approx(1.0)
    assert entropy(1.0, 3.0 / (4.0 * np.pi)) == pytest.approx(1.0, abs=1e-15)
    # isentrope inversion
    v, th = 1.7, 0.8
    assert theta_from_vs(v, entropy(v, th)) == pytest.approx(th, rel=1e-14)


def test_gas_law_with_R_two_thirds():
    v, th = 0.9, 1.3
    assert pressure(v, th) * v == pytest.approx(2.0 / 3.0 * th, rel=1e-15)


@pytest.mark.parametrize("v,theta", [(1.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (1.0, -2.0)])
def test_domain_errors(v, theta):
    with pytest.raises(DomainError):
        pressure(v, theta)
    with pytest.raises(DomainError):
        entropy(v, theta)


def test_eigenvalue_unit_speed():
    s = 1.0 + np.log(6.0 * np.pi / 5.0)
    assert eigenvalue(1.0, s, "plus") == pytest.approx(1.0, rel=1e-14)
    assert eigenvalue(1.0, s, "minus") == pytest.approx(-1.0, rel=1e-14)


def test_eigenvalue_is_sound_speed():
    # lambda^2 = -dp/dv at fixed entropy = 5 p / (3 v)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v, th = rng.uniform(0.3, 3.0, 2)
        s = entropy(v, th)
        lam = eigenvalue(v, s, "plus")
        eps = 1e-6 * v
        dpdv = (pressure(v + eps, theta_from_vs(v + eps, s))
                - pressure(v - eps, theta_from_vs(v - eps, s))) / (2 * eps)
        assert lam**2 == pytest.approx(-dpdv, rel=1e-8)
        assert lam**2 == pytest.approx(5.0 * pressure(v, th) / (3.0 * v), rel=1e-13)


def test_volume_from_speed_inverts_eigenvalue():
    s = 0.7
    for fam in ("minus", "plus"):
        for v in (0.5, 1.0, 2.5):
            assert volume_from_speed(eigenvalue(v, s, fam), s, fam) == pytest.approx(v, rel=1e-13)
    with pytest.raises(DomainError):
        volume_from_speed(1.0, s, "minus")


def test_bad_family():
    with pytest.raises(ValidationError):
        eigenvalue(1.0, 0.0, "middle")


def test_rarefaction_integral_against_trapezoid_oracle():
    v0, u0, v1, s = 1.0, 0.2, 1.4, 0.9
    grid = np.linspace(v0, v1, 1_000_001)
    lam = eigenvalue(grid, s, "minus")
    oracle = u0 - integrate.trapezoid(lam, grid)
    assert rarefaction_u(v0, u0, v1, s, "minus") == pytest.approx(oracle, abs=1e-11)
    assert curve_velocity(v0, u0, v1, s, "minus") == pytest.approx(oracle, abs=1e-11)


def test_curve_velocity_matches_quadrature_vectorised():
    ends = np.linspace(1.0, 3.0, 7)
    closed = curve_velocity(1.0, 0.0, ends, 0.4, "plus")
    quad = [rarefaction_u(1.0, 0.0, e, 0.4, "plus") for e in ends]
    np.testing.assert_allclose(closed, quad, atol=1e-13)


def test_rarefaction_wrong_direction():
    with pytest.raises(DomainError):
        rarefaction_u(1.0, 0.0, 0.9, 0.0, "minus")
    assert rarefaction_u(1.0, 0.3, 1.0, 0.0, "minus") == 0.3


def test_equal_ends_give_zero_strengths():
    st = ThermoState(1.2, 0.1, 0.9)
    ends = EndStates(st, st)
    stars = solve_star_states(ends)
    strengths = wave_strengths(ends, stars)
    assert all(v == pytest.approx(0.0, abs=1e-12) for v in strengths.values())
    assert stars.u_star == pytest.approx(0.1)


def test_forward_constructed_recovery():
    left = ThermoState(1.0, 0.0, 1.0)
    right, truth = forward_end_state(left, 1.08, 1.05, 1.02)
    sol = solve_star_states(EndStates(left, right))
    for name in ("v_minus_star", "v_plus_star", "u_star", "theta_minus_star",
                 "theta_plus_star", "p_star"):
        assert getattr(sol, name) == pytest.approx(getattr(truth, name), abs=1e-10)


def test_star_pressure_continuity():
    left = ThermoState(0.8, 0.1, 1.2)
    right, _ = forward_end_state(left, 0.9, 0.95, 0.8)
    sol = solve_star_states(EndStates(left, right))
    assert pressure(sol.v_minus_star, sol.theta_minus_star) == pytest.approx(
        pressure(sol.v_plus_star, sol.theta_plus_star), rel=1e-12)


def test_compression_needs_shock():
    # colliding flows: the pattern would need shocks
    with pytest.raises(NoSolution) as err:
        solve_star_states(EndStates(ThermoState(1, 0.5, 1), ThermoState(1, -0.5, 1)))
    assert err.value.diagnosis


def test_vacuum_gap():
    with pytest.raises(NoSolution) as err:
        solve_star_states(EndStates(ThermoState(1, -5, 1), ThermoState(1, 5, 1)))
    assert "vacuum" in str(err.value).lower() or err.value.diagnosis


def test_riemann_fan_matches_states():
    left = ThermoState(1.0, 0.0, 1.0)
    right, stars = forward_end_state(left, 1.1, 1.2, 1.0)
    ends = EndStates(left, right)
    assert riemann_fan_eval(stars, ends, -10.0) == left
    assert riemann_fan_eval(stars, ends, 10.0) == right
    mid = riemann_fan_eval(stars, ends, -1e-9)
    assert mid.v == pytest.approx(stars.v_minus_star)
    # inside the 1-fan the speed equals the similarity variable
    lam_l = eigenvalue(left.v, left.s, "minus")
    lam_s = eigenvalue(stars.v_minus_star, left.s, "minus")
    xi = 0.5 * (lam_l + lam_s)
    st = riemann_fan_eval(stars, ends, xi)
    assert eigenvalue(st.v, left.s, "minus") == pytest.approx(xi, rel=1e-12)


def test_thermostate_validation():
    with pytest.raises(ValidationError, match="theta must be positive"):
        ThermoState(1.0, 0.0, -1.0)
    assert ThermoState(1.0, 0.5, 1.0).u == (0.5, 0.0, 0.0)
