from __future__ import annotations

import numpy as np
import pytest
from scipy import optimize
from scipy.integrate import quad, trapezoid

from vpbwaves.diagnostics import contact_tail_check, decay_fit
from vpbwaves.eos_riemann import EndStates, ThermoState, eigenvalue, solve_star_states
from vpbwaves.errors import ValidationError
from vpbwaves.wave_profiles import (BurgersWave, Region, RarefactionWave, burgers_riemann,
                                    burgers_w, burgers_wx, burgers_wxx, build_composite,
                                    c0_constant, composite_eval, composite_residuals,
                                    composite_state, contact_eval, contact_selfsimilar_solve,
                                    fit_region_envelope, rarefaction_profile, region_classify,
                                    region_speeds, weight_hat_g, weight_hat_w)

# ---------------------------------------------------------------- Burgers


def test_burgers_point_against_brentq():
    bw = BurgersWave(0.0, 1.0)
    x0 = optimize.brentq(lambda z: z + (1 + np.tanh(z)) / 2 - 2.0, -10, 10, xtol=1e-14)
    assert burgers_w(2.0, 1.0, bw) == pytest.approx((1 + np.tanh(x0)) / 2, abs=1e-13)


def test_burgers_initial_data_and_constant():
    bw = BurgersWave(-0.5, 1.5)
    x = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(burgers_w(x, 0.0, bw), 0.5 + np.tanh(x), atol=1e-15)
    flat = BurgersWave(0.3, 0.3)
    assert np.all(burgers_w(x, 7.0, flat) == 0.3)


def test_burgers_solves_pde():
    bw = BurgersWave(-0.2, 0.7)
    rng = np.random.default_rng(1)
    x, t = rng.uniform(-20, 20, 200), rng.uniform(0.1, 40, 200)
    e = 1e-5
    wt = (burgers_w(x, t + e, bw) - burgers_w(x, t - e, bw)) / (2 * e)
    wx = burgers_wx(x, t, bw)
    assert np.abs(wt + burgers_w(x, t, bw) * wx).max() < 1e-8
    fd = (burgers_w(x + e, t, bw) - burgers_w(x - e, t, bw)) / (2 * e)
    assert np.abs(fd - wx).max() < 1e-8
    fd2 = (burgers_wx(x + e, t, bw) - burgers_wx(x - e, t, bw)) / (2 * e)
    assert np.abs(fd2 - burgers_wxx(x, t, bw)).max() < 1e-7


def test_burgers_monotone_and_bounded():
    bw = BurgersWave(0.0, 1.0)
    x = np.linspace(-100, 100, 5001)
    w = burgers_w(x, 30.0, bw)
    assert np.all(np.diff(w) >= 0)
    assert w.min() >= 0.0 and w.max() <= 1.0


def test_burgers_decreasing_data_rejected():
    with pytest.raises(ValidationError):
        BurgersWave(1.0, 0.0)


def test_burgers_rates():
    bw = BurgersWave(0.0, 1.0)
    T = np.geomspace(10, 1000, 15)
    m, sup = [], []
    for t in T:
        x = np.linspace(-2 * t, 3 * t, 20001)
        m.append(burgers_wx(x, t, bw).max())
        sup.append(np.abs(burgers_w(x, t, bw) - burgers_riemann(x / t, bw)).max())
    assert decay_fit(np.column_stack([T, m])).exponent == pytest.approx(-1.0, abs=0.1)
    assert sup[0] / sup[-1] >= 5.0


# ---------------------------------------------------------------- rarefactions


def _rarefaction():
    end = ThermoState(1.0, 0.0, 1.0)
    return RarefactionWave("minus", end, 1.2)


def test_rarefaction_stays_on_curve():
    rw = _rarefaction()
    x = np.linspace(-30, 10, 801)
    S = rarefaction_profile(x, 5.0, rw)
    # isentropic: theta v^(2/3) constant; speed relation lambda(V) = w
    np.testing.assert_allclose(S.theta * S.v ** (2 / 3), 1.0, rtol=1e-13)
    w = burgers_w(x, 5.0, rw.burgers)
    np.testing.assert_allclose(eigenvalue(S.v, rw.s, "minus"), w, rtol=1e-12)
    # 1-rarefaction: U_x >= 0 and V increasing towards the contact
    assert np.all(S.u_x >= -1e-15) and np.all(S.v_x >= -1e-15)


def test_rarefaction_derivatives_finite_difference():
    rw = _rarefaction()
    x = np.linspace(-20, 5, 101)
    t, e = 3.0, 1e-6
    S = rarefaction_profile(x, t, rw)
    for name in ("v", "u", "theta"):
        dx = (getattr(rarefaction_profile(x + e, t, rw), name)
              - getattr(rarefaction_profile(x - e, t, rw), name)) / (2 * e)
        dt = (getattr(rarefaction_profile(x, t + e, rw), name)
              - getattr(rarefaction_profile(x, t - e, rw), name)) / (2 * e)
        np.testing.assert_allclose(getattr(S, name + "_x"), dx, atol=1e-8)
        np.testing.assert_allclose(getattr(S, name + "_t"), dt, atol=1e-8)


def test_rarefaction_inviscid_equations():
    # V_t = U_x and U_t + p_x = 0 hold exactly for the smooth rarefaction
    rw = RarefactionWave("plus", ThermoState(1.0, 0.2, 1.1), 1.3)
    x = np.linspace(-5, 40, 401)
    S = rarefaction_profile(x, 10.0, rw)
    np.testing.assert_allclose(S.v_t, S.u_x, atol=1e-14)
    px = 2.0 / 3.0 * (S.theta_x / S.v - S.theta * S.v_x / S.v**2)
    np.testing.assert_allclose(S.u_t + px, 0.0, atol=1e-13)


# ---------------------------------------------------------------- contact wave


@pytest.fixture(scope="module")
def contact():
    return contact_selfsimilar_solve(0.95, 1.1, 0.7)


def test_contact_ode_residual(contact):
    assert np.abs(contact.ode_residual()).max() <= 1e-6


def test_contact_limits_and_monotonicity(contact):
    assert contact.Theta[0] == pytest.approx(0.95, abs=1e-12)
    assert contact.Theta[-1] == pytest.approx(1.1, abs=1e-12)
    assert np.all(np.diff(contact.Theta) >= 0)


def test_contact_flux_identity(contact):
    # the tabulated derivative integrates to the jump across the contact
    eta = contact.eta_grid
    assert trapezoid(contact.Theta_prime, eta) == pytest.approx(contact.delta, rel=1e-8)


def test_contact_envelope_and_scaling(contact):
    for t in (0.0, 10.0, 100.0):
        assert contact_tail_check(contact, t).passed
    vals = []
    for t in (0.0, 10.0, 100.0, 1000.0):
        x = np.linspace(-10, 10, 4001) * np.sqrt(1 + t)
        vals.append(np.sqrt(1 + t) * np.abs(contact_eval(contact, x, t).theta_x).max())
    assert max(vals) / min(vals) - 1.0 < 0.05


def test_contact_is_selfsimilar_pde_solution(contact):
    # Theta_t = (a Theta_x)_x, checked by finite differences in (x, t)
    x = np.linspace(-6, 6, 121)
    t, e = 2.0, 1e-4
    C = contact_eval(contact, x, t)
    th_t = (contact_eval(contact, x, t + e).theta - contact_eval(contact, x, t - e).theta) / (2 * e)
    np.testing.assert_allclose(C.theta_t, th_t, atol=1e-7)
    q = lambda xx: contact.a(contact_eval(contact, xx, t).theta) * contact_eval(contact, xx, t).theta_x
    rhs = (q(x + e) - q(x - e)) / (2 * e)
    np.testing.assert_allclose(C.theta_t, rhs, atol=1e-6)


def test_contact_zero_strength():
    c = contact_selfsimilar_solve(1.0, 1.0, 0.5)
    assert np.all(c.Theta == 1.0)
    assert contact_tail_check(c, 3.0).passed


def test_contact_csv(tmp_path, contact):
    p = contact.to_csv(tmp_path / "c.csv")
    text = p.read_bytes()
    assert b"\r" not in text
    assert text.splitlines()[0] == b"eta,Theta,Theta_prime"
    assert len(text.splitlines()) == contact.eta_grid.size + 1


# ---------------------------------------------------------------- composite


def test_composite_far_field(moderate_wave, moderate_ends):
    L, R = moderate_ends.left, moderate_ends.right
    for t in (0.0, 1.0, 10.0, 100.0):
        a = composite_state(moderate_wave, -50 * (1 + t), t)
        b = composite_state(moderate_wave, 50 * (1 + t), t)
        assert np.abs(a.as_array() - L.as_array()).max() < 1e-10
        assert np.abs(b.as_array() - R.as_array()).max() < 1e-10


def test_composite_zero_strength_is_constant():
    st = ThermoState(1.0, 0.2, 1.0)
    W = build_composite(EndStates(st, st))
    S = composite_eval(W, np.linspace(-10, 10, 21), 3.0)
    np.testing.assert_allclose(S.v, 1.0, atol=1e-14)
    np.testing.assert_allclose(S.u, 0.2, atol=1e-14)
    np.testing.assert_allclose(S.theta, 1.0, atol=1e-14)


def test_mass_residual_is_discretisation_error(moderate_wave):
    errs = []
    for n in (2001, 4001):
        x = np.linspace(-40, 40, n)
        errs.append(np.abs(composite_residuals(moderate_wave, x, 5.0).mass).max())
    assert errs[1] < errs[0] / 8  # fourth-order differences
    assert errs[1] < 1e-6


def test_R1_decay_rate(moderate_wave):
    T = np.geomspace(10, 1000, 15)
    R1 = []
    for t in T:
        x = np.linspace(-10, 10, 2001) * np.sqrt(1 + t)
        R1.append(np.abs(composite_residuals(moderate_wave, x, t).contact_R1).max())
    assert decay_fit(np.column_stack([T, R1])).exponent == pytest.approx(-1.5, abs=0.1)


def test_composite_residuals_need_uniform_grid(moderate_wave):
    with pytest.raises(ValidationError):
        composite_residuals(moderate_wave, np.array([0.0, 1.0, 3.0]), 1.0)


def test_region_classification_tie_break(moderate_wave):
    st = moderate_wave.stars
    lm, lp = region_speeds(st)
    t = 4.0
    assert region_classify(st, 0.5 * lp * t, t) == Region.OMEGA_C
    assert region_classify(st, 0.5 * lm * t, t) == Region.OMEGA_C
    assert region_classify(st, 0.5 * lp * t + 1e-9, t) == Region.OMEGA_PLUS
    assert region_classify(st, 0.5 * lm * t - 1e-9, t) == Region.OMEGA_MINUS
    assert region_classify(st, 1.0, 0.0) == Region.OMEGA_PLUS


def test_region_envelope_constant_finite(moderate_wave):
    fit = fit_region_envelope(moderate_wave, [0, 1, 5, 10, 20, 50])
    assert np.isfinite(fit["C"]) and fit["C"] > 0
    assert fit["c0"] == pytest.approx(c0_constant(moderate_wave.stars, moderate_wave.contact.c1_est))


def test_weight_antiderivative():
    alpha, t = 0.3, 4.0
    x = np.linspace(-20, 20, 9)
    for xi in x:
        val, _ = quad(lambda y: weight_hat_w(y, t, alpha), -np.inf, xi)
        assert weight_hat_g(xi, t, alpha) == pytest.approx(val, rel=1e-9, abs=1e-12)


def test_weight_alpha_warning():
    with pytest.warns(UserWarning):
        weight_hat_w(0.0, 1.0, 1.0, c1=1.0)
    with pytest.raises(ValidationError):
        weight_hat_w(0.0, 1.0, 0.0)


def test_star_states_used_by_composite(moderate_wave, moderate_ends):
    st = solve_star_states(moderate_ends)
    assert moderate_wave.stars.p_star == pytest.approx(st.p_star)
    S = composite_eval(moderate_wave, np.array([0.0]), 1e6)
    # at the contact, far in time, temperature is between the two star values
    assert st.theta_minus_star - 1e-12 <= S.theta[0] <= st.theta_plus_star + 1e-12
