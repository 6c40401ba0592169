"""Smooth wave profiles: Burgers-driven rarefactions, the self-similar viscous
contact wave, and their superposition.

All profiles live in Lagrangian mass coordinates, where the contact sits at
``x = 0`` for all time.  Evaluators are vectorised over ``x`` and return a
:class:`ProfileSample` carrying values together with their first ``x`` and
``t`` derivatives (analytic wherever the construction allows it).
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicHermiteSpline
from scipy.special import erf, erfcx, expit

from .eos_riemann import (EndStates, StarStates, ThermoState, curve_velocity, eigenvalue,
                          solve_star_states, volume_from_speed, wave_strengths)
from .errors import ConvergenceFailure, ValidationError
from .transport import TransportModel


# --------------------------------------------------------------------------- Burgers

@dataclass(frozen=True)
class BurgersWave:
    """Burgers data ``w0(x) = (w_r + w_l)/2 + (w_r - w_l)/2 tanh x``."""

    w_l: float
    w_r: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.w_l) and np.isfinite(self.w_r)):
            raise ValidationError("Burgers end speeds must be finite")
        if self.w_r < self.w_l:
            raise ValidationError("Burgers data must be nondecreasing (w_l <= w_r)")

    @property
    def spread(self) -> float:
        return self.w_r - self.w_l

    def initial(self, x0):
        """``(w0, w0', w0'')`` at ``x0``; written with logistic functions so the
        far tails keep full relative precision."""
        x0 = np.asarray(x0, dtype=float)
        d = self.spread
        e, em = expit(2.0 * x0), expit(-2.0 * x0)
        w = np.where(x0 < 0, self.w_l + d * e, self.w_r - d * em)
        return w, 2.0 * d * e * em, 4.0 * d * e * em * (em - e)


def _foot(wave: BurgersWave, x, t):
    """Foot ``x0`` of the characteristic through ``(x, t)``: ``x0 + t w0(x0) = x``.

    Safeguarded Newton: the map is strictly increasing and ``x0`` is bracketed by
    ``[x - w_r t, x - w_l t]``; steps leaving the bracket are replaced by bisection.
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValidationError("t must be nonnegative")
    if wave.spread == 0 or not np.any(t > 0):
        return x - wave.w_l * t
    lo, hi = x - wave.w_r * t, x - wave.w_l * t
    x0 = x - 0.5 * (wave.w_l + wave.w_r) * t
    for _ in range(200):
        w, wp, _ = wave.initial(x0)
        g = x0 + t * w - x
        lo = np.where(g < 0, x0, lo)
        hi = np.where(g > 0, x0, hi)
        new = x0 - g / (1.0 + t * wp)
        bad = ~((new > lo) & (new < hi))
        new = np.where(bad, 0.5 * (lo + hi), new)
        step = np.abs(new - x0)
        x0 = new
        if np.all(step <= np.maximum(1e-12, 8 * np.finfo(float).eps * np.abs(x0))):
            break
    return x0


def _out(a, like):
    return float(a) if np.ndim(like) == 0 and np.ndim(a) == 0 else a


def burgers_w(x, t, wave: BurgersWave):
    """Exact solution of ``w_t + w w_x = 0`` with tanh data, by characteristics."""
    return _out(wave.initial(_foot(wave, x, t))[0], x)


def burgers_wx(x, t, wave: BurgersWave):
    """``w_x = w0'(x0) / (1 + t w0'(x0))``."""
    _, wp, _ = wave.initial(_foot(wave, x, t))
    return _out(wp / (1.0 + np.asarray(t, dtype=float) * wp), x)


def burgers_wxx(x, t, wave: BurgersWave):
    """``w_xx = w0''(x0) / (1 + t w0'(x0))^3``."""
    _, wp, wpp = wave.initial(_foot(wave, x, t))
    return _out(wpp / (1.0 + np.asarray(t, dtype=float) * wp) ** 3, x)


def burgers_riemann(xi, wave: BurgersWave):
    """Centred rarefaction ``w^r(x/t)`` for the step data ``w_l | w_r``."""
    return _out(np.clip(np.asarray(xi, dtype=float), wave.w_l, wave.w_r), xi)


# --------------------------------------------------------------------------- samples

@dataclass
class ProfileSample:
    """Values and first derivatives of ``(V, U_1, Theta)`` at sample points."""

    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    v_x: np.ndarray
    u_x: np.ndarray
    theta_x: np.ndarray
    v_t: np.ndarray
    u_t: np.ndarray
    theta_t: np.ndarray
    theta_xx: np.ndarray | None = None

    @property
    def p(self) -> np.ndarray:
        return 2.0 * self.theta / (3.0 * self.v)

    def state(self, k: int = 0) -> ThermoState:
        return ThermoState(float(np.ravel(self.v)[k]), float(np.ravel(self.u)[k]),
                           float(np.ravel(self.theta)[k]))


# --------------------------------------------------------------------------- rarefactions

@dataclass(frozen=True)
class RarefactionWave:
    """Approximate 1- (``family="minus"``) or 3-rarefaction (``"plus"``).

    ``end`` is the far-field state on the outer side, ``v_star`` the volume on
    the contact side; the wave lies on the isentrope of ``end``.
    """

    family: str
    end: ThermoState
    v_star: float
    burgers: BurgersWave = field(init=False)

    def __post_init__(self) -> None:
        if self.family not in ("minus", "plus"):
            raise ValidationError("family must be 'minus' or 'plus'")
        if self.v_star < self.end.v:
            raise ValidationError("v_star must not be below the end-state volume")
        s = self.end.s
        a, b = eigenvalue(self.end.v, s, self.family), eigenvalue(self.v_star, s, self.family)
        object.__setattr__(self, "burgers", BurgersWave(*sorted((a, b))))

    @property
    def s(self) -> float:
        return self.end.s

    @property
    def star(self) -> ThermoState:
        return self.eval_state(self.v_star)

    def eval_state(self, V) -> ThermoState:
        return ThermoState(float(V), self._u(V), float(self._theta(V)))

    def _u(self, V):
        return curve_velocity(self.end.v, self.end.u1, V, self.s, self.family)

    def _theta(self, V):
        return self.end.theta * (self.end.v / np.asarray(V, dtype=float)) ** (2.0 / 3.0)


def rarefaction_profile(x, t, wave: RarefactionWave) -> ProfileSample:
    """Smooth rarefaction: ``lambda(V, s) = w(x, t)``, ``U`` along the curve,
    ``Theta`` on the isentrope.  Time derivatives use ``w_t = -w w_x``."""
    x = np.asarray(x, dtype=float)
    bw = wave.burgers
    shape = np.broadcast(x, np.asarray(t)).shape
    if bw.spread == 0:
        V = np.full(shape, wave.v_star)
        zero = np.zeros(shape)
        return ProfileSample(V, np.full(shape, wave._u(wave.v_star)),
                             np.full(shape, wave._theta(wave.v_star)),
                             zero, zero.copy(), zero.copy(), zero.copy(), zero.copy(), zero.copy())
    x0 = _foot(bw, x, t)
    w, wp, _ = bw.initial(x0)
    wx = wp / (1.0 + np.asarray(t, dtype=float) * wp)
    if np.any(np.sign(w) != (-1 if wave.family == "minus" else 1)):
        raise ValidationError("Burgers speed crossed zero inside a rarefaction fan")
    V = np.asarray(volume_from_speed(w, wave.s, wave.family), dtype=float)
    # end-state volume is recovered exactly where w sits at the end speed
    V = np.clip(V, wave.end.v, wave.v_star)
    U = np.asarray(wave._u(V), dtype=float)
    Th = np.asarray(wave._theta(V), dtype=float)
    V_x = -0.75 * V / w * wx
    V_t = -w * V_x
    return ProfileSample(V, U, Th, V_x, -w * V_x, -2.0 / 3.0 * Th * V_x / V,
                         V_t, -w * V_t, -2.0 / 3.0 * Th * V_t / V)


# --------------------------------------------------------------------------- contact wave

@dataclass(frozen=True)
class ContactProfile:
    """Tabulated self-similar contact profile ``Theta(eta)``, ``eta = x / sqrt(1+t)``.

    The diffusion coefficient is ``a(Theta) = 9 p* kappa(Theta) / (10 Theta)``.
    """

    theta_minus_star: float
    theta_plus_star: float
    p_star: float
    eta_grid: np.ndarray
    Theta: np.ndarray
    Theta_prime: np.ndarray
    c1_est: float
    c2_est: float
    transport: TransportModel = TransportModel()
    u_star: float = 0.0
    iterations: int = 0
    _splines: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        eta, th, thp = self.eta_grid, self.Theta, self.Theta_prime
        thpp = self.theta_second(eta, th, thp)
        object.__setattr__(self, "_splines", (CubicHermiteSpline(eta, th, thp),
                                              CubicHermiteSpline(eta, thp, thpp)))

    @property
    def delta(self) -> float:
        return abs(self.theta_plus_star - self.theta_minus_star)

    @property
    def L(self) -> float:
        return float(self.eta_grid[-1])

    def a(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 0.9 * self.p_star * self.transport.kappa(theta) / theta

    def da(self, theta):
        theta = np.asarray(theta, dtype=float)
        k, dk = self.transport.kappa(theta), self.transport.dkappa(theta)
        return 0.9 * self.p_star * (dk * theta - k) / theta**2

    def theta_second(self, eta, th, thp):
        """``Theta''`` from the ODE ``(a Theta')' = -(eta/2) Theta'``."""
        return (-0.5 * eta * thp - self.da(th) * thp**2) / self.a(th)

    def at(self, eta):
        """``(Theta, Theta', Theta'')`` at ``eta``; clamped to the end constants
        outside ``[-L, L]``."""
        eta = np.asarray(eta, dtype=float)
        s0, s1 = self._splines
        inside = np.abs(eta) <= self.L
        e = np.clip(eta, -self.L, self.L)
        th = np.where(inside, s0(e), np.where(eta < 0, self.theta_minus_star, self.theta_plus_star))
        thp = np.where(inside, s1(e), 0.0)
        thpp = np.where(inside, s1(e, 1), 0.0)
        return th, thp, thpp

    def envelope_quantity(self, eta=None):
        """``|Theta - theta_+-*| + |Theta'| + |Theta''|`` on the table (or at ``eta``).

        At time ``t`` this is exactly the left side of the Gaussian tail bound,
        ``|Theta - theta*| + sqrt(1+t)|Theta_x| + (1+t)|Theta_xx|``.
        """
        if eta is None:
            eta, th, thp = self.eta_grid, self.Theta, self.Theta_prime
            thpp = self.theta_second(eta, th, thp)
        else:
            eta = np.asarray(eta, dtype=float)
            th, thp, thpp = self.at(eta)
        ref = np.where(eta < 0, self.theta_minus_star, self.theta_plus_star)
        return np.abs(th - ref) + np.abs(thp) + np.abs(thpp)

    def ode_residual(self) -> np.ndarray:
        """Second-order difference residual of ``-(eta/2) Theta' - (a Theta')'`` on
        the interior nodes, computed from ``Theta`` alone."""
        eta, th = self.eta_grid, self.Theta
        h = eta[1] - eta[0]
        am = self.a(0.5 * (th[1:] + th[:-1]))
        flux = am * np.diff(th) / h
        d2 = np.diff(flux) / h
        d1 = (th[2:] - th[:-2]) / (2 * h)
        return -0.5 * eta[1:-1] * d1 - d2

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["eta", "Theta", "Theta_prime"])
            for row in zip(self.eta_grid, self.Theta, self.Theta_prime):
                w.writerow([repr(float(c)) for c in row])
        return path


def contact_selfsimilar_solve(theta_minus_star: float, theta_plus_star: float, p_star: float,
                              kappa_model: TransportModel | None = None, L: float = 12.0,
                              n: int = 4001, *, tol: float = 1e-11, max_iter: int = 200,
                              u_star: float = 0.0) -> ContactProfile:
    """Solve ``-(eta/2) Theta' = (a(Theta) Theta')'`` with ``Theta(-+L) = theta_-+*``.

    Shooting from ``eta = 0`` in both directions on the unknowns ``Theta(0)`` and
    the flux ``a Theta'(0)``; the endpoint mismatch is driven to zero by MINPACK's
    hybrid (secant-updated) root finder.  Raises :class:`ConvergenceFailure` when
    the mismatch stays above ``tol``.
    """
    model = kappa_model or TransportModel()
    tm, tp = float(theta_minus_star), float(theta_plus_star)
    if not (tm > 0 and tp > 0 and p_star > 0):
        raise ValidationError("contact temperatures and pressure must be positive")
    if not (L > 0 and n >= 5):
        raise ValidationError("need L > 0 and at least 5 grid points")
    if n % 2 == 0:
        n += 1  # keep eta = 0 on the grid
    eta = np.linspace(-L, L, n)
    mid = n // 2
    eta[mid] = 0.0

    def a(th):
        return 0.9 * p_star * model.kappa(th) / th

    if tm == tp:
        th = np.full(n, tm)
        return ContactProfile(tm, tp, p_star, eta, th, np.zeros(n), 1.0,
                              1.0 / (4.0 * float(a(tm))), model, u_star, 0)

    def rhs(s, y):
        th = y[0]
        if th <= 0:
            return [0.0, 0.0]
        d = y[1] / a(th)
        return [d, -0.5 * s * d]

    def shoot(z, dense=False):
        c, q0 = z
        out = []
        for grid in (eta[mid::-1], eta[mid:]):
            sol = integrate.solve_ivp(rhs, (0.0, grid[-1]), [c, q0], method="DOP853",
                                      t_eval=grid if dense else [grid[-1]],
                                      rtol=1e-12, atol=1e-14)
            if not sol.success:
                raise ConvergenceFailure(f"contact shooting integration failed: {sol.message}",
                                         residual=np.inf, iterations=0)
            out.append(sol.y)
        return out

    dlt = tp - tm
    am = float(a(0.5 * (tm + tp)))
    z0 = np.array([0.5 * (tm + tp), am * dlt / (2.0 * np.sqrt(np.pi * am))])

    def mismatch(z):
        left, right = shoot(z)
        return np.array([left[0, -1] - tm, right[0, -1] - tp]) / abs(dlt)

    sol = optimize.root(mismatch, z0, method="hybr", options={"xtol": 1e-15, "maxfev": max_iter})
    res = float(np.max(np.abs(mismatch(sol.x)))) * abs(dlt)
    if not res <= tol:
        raise ConvergenceFailure(
            f"contact shooting mismatch {res:.2e} above {tol:.1e}; the contact jump may be "
            "too large for this transport model", residual=res, iterations=int(sol.nfev))
    left, right = shoot(sol.x, dense=True)
    th = np.concatenate([left[0, ::-1], right[0, 1:]])
    q = np.concatenate([left[1, ::-1], right[1, 1:]])
    thp = q / a(th)
    th, thp = _asymptotic_tails(eta, th, thp, tm, tp, a)
    prof = ContactProfile(tm, tp, p_star, eta, th, thp, 1.0, 1.0, model, u_star, int(sol.nfev))
    c1, c2 = fit_tail_constants(prof)
    return ContactProfile(tm, tp, p_star, eta, th, thp, c1, c2, model, u_star, int(sol.nfev))


def _asymptotic_tails(eta, th, thp, tm, tp, a, match: float = 1e-8):
    """Replace each tail beyond the first node where ``|Theta - theta*| <= match *
    delta`` by the linearised (constant-``a``) solution, an erfc profile matched in
    value.  The integrated tails are at round-off there and would otherwise
    spoil monotonicity and the Gaussian envelope fit."""
    th, thp = th.copy(), thp.copy()
    dlt = abs(tp - tm)
    for sign, ref in ((1.0, tp), (-1.0, tm)):
        z = sign * eta
        cand = np.nonzero((z > 0) & (np.abs(th - ref) <= match * dlt))[0]
        if cand.size == 0:
            continue
        kc = cand[np.argmin(z[cand])]
        sa = 2.0 * np.sqrt(float(a(ref)))
        zc = z[kc] / sa
        tail = z >= z[kc]
        zz = z[tail] / sa
        ratio = erfcx(zz) / erfcx(zc) * np.exp(zc**2 - zz**2)
        gap = th[kc] - ref
        th[tail] = ref + gap * ratio
        # d/dz erfc(z) = -2 exp(-z^2) / sqrt(pi); eta derivative carries sign / sa
        thp[tail] = -gap * sign * 2.0 / (np.sqrt(np.pi) * sa) * np.exp(-zz**2) / (erfcx(zc) * np.exp(-zc**2))
    return th, thp


def fit_tail_constants(profile: ContactProfile, safety: float = 0.9) -> tuple[float, float]:
    """Constants ``(c1, c2)`` of the Gaussian tail envelope.

    ``c2`` is ``safety`` times the smaller of the two tail slopes from a
    log-linear regression of ``|Theta - theta_+-*|`` against ``eta^2``;
    ``c1`` is then the smallest constant making
    ``envelope_quantity <= c1 delta exp(-c2 eta^2)`` hold on the whole table.
    """
    d = profile.delta
    if d == 0:
        return 1.0, profile.c2_est
    eta = profile.eta_grid
    ref = np.where(eta < 0, profile.theta_minus_star, profile.theta_plus_star)
    dev = np.abs(profile.Theta - ref)
    slopes = []
    for side in (eta < -1.0, eta > 1.0):
        m = side & (dev > 1e-13 * d)
        if m.sum() < 3:
            continue
        slopes.append(-np.polyfit(eta[m] ** 2, np.log(dev[m] / d), 1)[0])
    if not slopes:
        raise ConvergenceFailure("contact tails too short to fit the Gaussian envelope",
                                 residual=np.nan, iterations=0)
    c2 = safety * min(slopes)
    F = profile.envelope_quantity()
    c1 = float(np.max(F / (d * np.exp(-c2 * eta**2))))
    return c1, float(c2)


def contact_eval(profile: ContactProfile, x, t) -> ProfileSample:
    """Viscous contact wave ``V = 2 Theta / (3 p*)``, ``U = 2 a Theta_x / (3 p*) + u*``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValidationError("t must be nonnegative")
    s = np.sqrt(1.0 + t)
    eta = x / s
    th, thp, thpp = profile.at(eta)
    k = 2.0 / (3.0 * profile.p_star)
    a = profile.a(th)
    q = a * thp
    qp = -0.5 * eta * thp  # (a Theta')' from the ODE
    th_t = -0.5 * eta * thp / (1.0 + t)
    return ProfileSample(
        v=k * th, u=k * q / s + profile.u_star, theta=th,
        v_x=k * thp / s, u_x=k * qp / (1.0 + t), theta_x=thp / s,
        v_t=k * th_t, u_t=-0.5 * k * (eta * qp + q) / (1.0 + t) ** 1.5, theta_t=th_t,
        theta_xx=thpp / (1.0 + t))


# --------------------------------------------------------------------------- composite

@dataclass(frozen=True)
class CompositeWave:
    ends: EndStates
    stars: StarStates
    rare_minus: RarefactionWave
    rare_plus: RarefactionWave
    contact: ContactProfile
    transport: TransportModel = TransportModel()

    @property
    def strengths(self) -> dict:
        return wave_strengths(self.ends, self.stars)


def build_composite(ends: EndStates, transport: TransportModel | None = None, *,
                    L: float = 12.0, n: int = 4001, star_tol: float = 1e-12) -> CompositeWave:
    """Solve the star states and construct all three component waves."""
    transport = transport or TransportModel()
    stars = solve_star_states(ends, tol=star_tol)
    rm = RarefactionWave("minus", ends.left, max(stars.v_minus_star, ends.left.v))
    rp = RarefactionWave("plus", ends.right, max(stars.v_plus_star, ends.right.v))
    cd = contact_selfsimilar_solve(stars.theta_minus_star, stars.theta_plus_star, stars.p_star,
                                   transport, L, n, u_star=stars.u_star)
    return CompositeWave(ends, stars, rm, rp, cd, transport)


def composite_parts(wave: CompositeWave, x, t):
    return (contact_eval(wave.contact, x, t), rarefaction_profile(x, t, wave.rare_minus),
            rarefaction_profile(x, t, wave.rare_plus))


def composite_eval(wave: CompositeWave, x, t) -> ProfileSample:
    """Superposition ``contact + R1 + R3`` minus the doubly counted star constants."""
    c, m, p = composite_parts(wave, x, t)
    st = wave.stars
    shift = {"v": st.v_minus_star + st.v_plus_star, "u": 2.0 * st.u_star,
             "theta": st.theta_minus_star + st.theta_plus_star}
    vals = {}
    for name in ("v", "u", "theta", "v_x", "u_x", "theta_x", "v_t", "u_t", "theta_t"):
        vals[name] = getattr(c, name) + getattr(m, name) + getattr(p, name) - shift.get(name, 0.0)
    return ProfileSample(**vals)


def composite_state(wave: CompositeWave, x: float, t: float) -> ThermoState:
    return composite_eval(wave, np.array([x]), t).state()


@dataclass
class Residuals:
    """Residuals of the viscous fluid system evaluated on the ansatz.

    ``contact_R1`` / ``contact_R2`` are the contact-wave-only remainders
    ``U_t - (4/3)(mu U_x / V)_x`` and ``-(4/3) mu U_x^2 / V``.
    """

    x: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    transverse: np.ndarray
    energy: np.ndarray
    contact_R1: np.ndarray
    contact_R2: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.stack([self.mass, self.momentum, self.transverse, self.energy])


def _d4(f, h):
    """Fourth-order centred difference; returns the derivative at ``f[2:-2]``."""
    return (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)


def composite_residuals(wave: CompositeWave, x, t: float,
                        transport_models: TransportModel | None = None) -> Residuals:
    """Mass / momentum / transverse / energy residuals of the ansatz under the
    viscous (Navier-Stokes) part of the fluid system, on a uniform grid ``x``.

    Time derivatives are analytic; the outer ``x`` derivatives of fluxes use
    fourth-order centred differences (the grid is padded by two nodes per side).
    """
    tm = transport_models or wave.transport
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("x must be a 1D grid")
    h = x[1] - x[0]
    if not (h > 0 and np.allclose(np.diff(x), h, rtol=1e-9, atol=0)):
        raise ValidationError("composite_residuals needs a uniform increasing grid")
    xe = np.concatenate([x[0] - h * np.arange(2, 0, -1), x, x[-1] + h * np.arange(1, 3)])
    S = composite_eval(wave, xe, t)
    mu, ka = tm.mu(S.theta), tm.kappa(S.theta)
    p = S.p
    core = slice(2, -2)
    mass = S.v_t[core] - _d4(S.u, h)
    momentum = S.u_t[core] + _d4(p, h) - 4.0 / 3.0 * _d4(mu * S.u_x / S.v, h)
    energy = (S.theta_t + S.u * S.u_t)[core] + _d4(p * S.u, h) \
        - _d4(ka * S.theta_x / S.v, h) - 4.0 / 3.0 * _d4(mu * S.u * S.u_x / S.v, h)
    C = contact_eval(wave.contact, xe, t)
    muc = tm.mu(C.theta)
    R1 = C.u_t[core] - 4.0 / 3.0 * _d4(muc * C.u_x / C.v, h)
    R2 = -(4.0 / 3.0 * muc * C.u_x**2 / C.v)[core]
    return Residuals(x, mass, momentum, np.zeros_like(x), energy, R1, R2)


# --------------------------------------------------------------------------- regions, weights

class Region(IntEnum):
    OMEGA_MINUS = -1
    OMEGA_C = 0
    OMEGA_PLUS = 1


def region_speeds(stars: StarStates) -> tuple[float, float]:
    """``(lambda_-(v_-*, s_-), lambda_+(v_+*, s_+))``."""
    return (eigenvalue(stars.v_minus_star, stars.s_minus, "minus"),
            eigenvalue(stars.v_plus_star, stars.s_plus, "plus"))


def region_classify(stars: StarStates, x, t):
    """``Omega_-: 2x < lambda_-* t``, ``Omega_+: 2x > lambda_+* t``, closed band
    ``Omega_c`` in between (boundary points belong to ``Omega_c``)."""
    lm, lp = region_speeds(stars)
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    code = np.where(2 * x < lm * t, -1, np.where(2 * x > lp * t, 1, 0))
    if code.ndim == 0:
        return Region(int(code))
    return code


def c0_constant(stars: StarStates, c1_est: float) -> float:
    """``c0 = min{|lambda_-*|, lambda_+*, c1 lambda_-*^2, c1 lambda_+*^2, 1} / 10``."""
    lm, lp = region_speeds(stars)
    return 0.1 * min(abs(lm), lp, c1_est * lm**2, c1_est * lp**2, 1.0)


def rarefaction_envelope_quantity(wave: RarefactionWave, x, t) -> np.ndarray:
    """``U_x + |V_x| + |V - v*| + |Theta_x| + |Theta - theta*|`` for one rarefaction."""
    S = rarefaction_profile(x, t, wave)
    st = wave.star
    return S.u_x + np.abs(S.v_x) + np.abs(S.v - st.v) + np.abs(S.theta_x) \
        + np.abs(S.theta - st.theta)


def fit_region_envelope(wave: CompositeWave, times, c0: float | None = None,
                        n_x: int = 401) -> dict:
    """Fit ``C`` in ``F <= C delta exp(-c0 (|x| + t))`` over samples of ``Omega_c``.

    Returns the fitted ``C`` and, per sampled time, the largest ratio seen.
    """
    st = wave.stars
    if c0 is None:
        c0 = c0_constant(st, wave.contact.c1_est)
    lm, lp = region_speeds(st)
    delta = wave.ends.strength
    per_time = []
    for t in np.atleast_1d(times):
        x = np.linspace(0.5 * lm * t, 0.5 * lp * t, n_x) if t > 0 else np.zeros(1)
        F = rarefaction_envelope_quantity(wave.rare_minus, x, t) \
            + rarefaction_envelope_quantity(wave.rare_plus, x, t)
        if delta == 0:
            per_time.append(0.0)
            continue
        per_time.append(float(np.max(F / (delta * np.exp(-c0 * (np.abs(x) + t))))))
    return {"C": max(per_time), "c0": c0, "ratio_per_time": per_time}


def weight_hat_w(x, t, alpha: float, c1: float | None = None):
    """``(1+t)^(-1/2) exp(-alpha x^2 / (1+t))``; warns when ``alpha > c1 / 4``."""
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    if c1 is not None and alpha > c1 / 4.0:
        warnings.warn(f"alpha={alpha} lies outside (0, c1/4] = (0, {c1 / 4:.3g}]", stacklevel=2)
    x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
    val = np.exp(-alpha * x**2 / (1.0 + t)) / np.sqrt(1.0 + t)
    return _out(val, x)


def weight_hat_g(x, t, alpha: float):
    """Antiderivative ``int_{-inf}^x w_hat dy = sqrt(pi/alpha) (1 + erf(x sqrt(alpha/(1+t)))) / 2``."""
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
    val = 0.5 * np.sqrt(np.pi / alpha) * (1.0 + erf(x * np.sqrt(alpha / (1.0 + t))))
    return _out(val, x)
