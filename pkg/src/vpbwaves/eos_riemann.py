"""Equation of state, Riemann invariants and the rarefaction-contact-rarefaction star states.

Lagrangian convention: ``v`` is specific volume, ``u`` velocity and ``theta``
temperature, with gas constant ``R = 2/3`` so that ``p = 2 theta / (3 v)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, NoSolution, ValidationError

#: sqrt(5 / (6 pi)), the constant in the sound speed.
_C_LAMBDA = np.sqrt(5.0 / (6.0 * np.pi))


def _family_sign(family) -> int:
    if family in ("minus", "1", 1, -1, "1st"):
        return -1
    if family in ("plus", "3", 3, +1, "3rd"):
        return +1
    raise ValidationError(f"family must be 'minus' or 'plus', got {family!r}")


@dataclass(frozen=True)
class ThermoState:
    """Fluid state ``(v, u, theta)``; ``u`` may be given as a scalar ``u_1``."""

    v: float
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    theta: float = 1.0

    def __post_init__(self) -> None:
        u = tuple(float(c) for c in np.broadcast_to(np.asarray(self.u, dtype=float), (3,)))
        if np.ndim(self.u) == 0:
            u = (float(self.u), 0.0, 0.0)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "theta", float(self.theta))
        if not (np.isfinite(self.v) and self.v > 0):
            raise ValidationError(f"v must be positive, got {self.v}")
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise ValidationError(f"theta must be positive, got {self.theta}")

    @property
    def u1(self) -> float:
        return self.u[0]

    @property
    def p(self) -> float:
        return pressure(self.v, self.theta)

    @property
    def s(self) -> float:
        return entropy(self.v, self.theta)

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.u1, self.theta])


@dataclass(frozen=True)
class EndStates:
    left: ThermoState
    right: ThermoState

    @property
    def strength(self) -> float:
        """Euclidean size of the jump in ``(v, u_1, theta)``."""
        return float(np.linalg.norm(self.right.as_array() - self.left.as_array()))


@dataclass(frozen=True)
class StarStates:
    """Intermediate states either side of the contact."""

    v_minus_star: float
    v_plus_star: float
    u_star: float
    theta_minus_star: float
    theta_plus_star: float
    p_star: float
    iterations: int = 0

    @property
    def left(self) -> ThermoState:
        return ThermoState(self.v_minus_star, self.u_star, self.theta_minus_star)

    @property
    def right(self) -> ThermoState:
        return ThermoState(self.v_plus_star, self.u_star, self.theta_plus_star)

    @property
    def s_minus(self) -> float:
        return entropy(self.v_minus_star, self.theta_minus_star)

    @property
    def s_plus(self) -> float:
        return entropy(self.v_plus_star, self.theta_plus_star)


def _positive(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"{name} must be positive")
    return x


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def pressure(v, theta):
    """``p = 2 theta / (3 v)``."""
    v, theta = _positive("v", v), _positive("theta", theta)
    return _scalar(2.0 * theta / (3.0 * v))


def entropy(v, theta):
    """``s = (2/3) ln v + ln(4 pi theta / 3) + 1``."""
    v, theta = _positive("v", v), _positive("theta", theta)
    return _scalar(2.0 / 3.0 * np.log(v) + np.log(4.0 * np.pi * theta / 3.0) + 1.0)


def theta_from_vs(v, s):
    """Temperature on the isentrope ``s`` at volume ``v``."""
    v = _positive("v", v)
    return _scalar(3.0 / (4.0 * np.pi) * np.exp(np.asarray(s, dtype=float) - 1.0) * v ** (-2.0 / 3.0))


def eigenvalue(v, s, family):
    """Characteristic speed of the 1st/3rd family, ``+-sqrt(-dp/dv)`` at fixed ``s``.

    With the entropy normalisation above this is ``+-sqrt((5/(6 pi)) v^(-8/3) e^(s-1))``;
    the ``e^(-1)`` keeps the speed equal to ``sqrt(5 p / (3 v))``.
    """
    v = _positive("v", v)
    sign = _family_sign(family)
    return _scalar(sign * _C_LAMBDA * np.exp(0.5 * (np.asarray(s, dtype=float) - 1.0)) * v ** (-4.0 / 3.0))


def volume_from_speed(w, s, family):
    """Invert ``eigenvalue(v, s, family) = w``."""
    w = np.asarray(w, dtype=float)
    sign = _family_sign(family)
    if np.any(sign * w <= 0):
        raise DomainError("speed has the wrong sign for this family")
    return _scalar((5.0 / (6.0 * np.pi) * np.exp(s - 1.0) / w**2) ** 0.375)


def rarefaction_u(v_start: float, u_start: float, v_end: float, s: float, family) -> float:
    """Velocity along the rarefaction curve, ``u_start - int_{v_start}^{v_end} lambda(eta, s) d eta``."""
    if not v_start > 0:
        raise DomainError("v_start must be positive")
    if v_end < v_start:
        raise DomainError("v_end lies outside the rarefaction curve (v_end < v_start)")
    if v_end == v_start:
        return float(u_start)
    val, _ = integrate.quad(lambda eta: eigenvalue(eta, s, family), v_start, v_end,
                            epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(u_start - val)


def curve_velocity(v_start, u_start, v_end, s, family):
    """Closed form of :func:`rarefaction_u`, vectorised over ``v_end``.

    ``int lambda d eta`` has the antiderivative ``-3 lambda(eta) eta``, so no
    quadrature is needed; used where many points are evaluated at once.
    """
    sign = _family_sign(family)
    v_end = _positive("v_end", v_end)
    k = 3.0 * _C_LAMBDA * np.exp(0.5 * (s - 1.0))
    return _scalar(u_start - sign * k * (v_start ** (-1.0 / 3.0) - v_end ** (-1.0 / 3.0)))


@dataclass(frozen=True)
class StarSolverOptions:
    newton_steps: int = 100
    bisection_steps: int = 200


def solve_star_states(ends: EndStates, tol: float = 1e-12,
                      options: StarSolverOptions = StarSolverOptions()) -> StarStates:
    """Star states of the R1-CD2-R3 pattern joining ``ends``.

    Damped Newton on ``(v_-*, v_+*)`` for the two conditions ``u_-(v_-*) =
    u_+(v_+*)`` and ``p(v_-*, theta_-*) = p(v_+*, theta_+*)``; if Newton stalls,
    bisection on the common pressure (both unknowns are explicit in ``p`` along
    the isentropes).
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    L, R = ends.left, ends.right
    sL, sR = L.s, R.s

    def residual(a, b):
        uL = curve_velocity(L.v, L.u1, a, sL, "minus")
        uR = curve_velocity(R.v, R.u1, b, sR, "plus")
        return np.array([uL - uR, pressure(a, theta_from_vs(a, sL)) - pressure(b, theta_from_vs(b, sR))])

    def finish(a, b, it):
        th_a, th_b = theta_from_vs(a, sL), theta_from_vs(b, sR)
        uL = curve_velocity(L.v, L.u1, a, sL, "minus")
        uR = curve_velocity(R.v, R.u1, b, sR, "plus")
        return StarStates(float(a), float(b), 0.5 * (uL + uR), th_a, th_b,
                          0.5 * (pressure(a, th_a) + pressure(b, th_b)), int(it))

    scale = max(1.0, abs(L.u1), abs(R.u1), L.p, R.p)
    x = np.array([L.v, R.v], dtype=float)
    F = residual(*x)
    if np.max(np.abs(F)) <= tol * scale:
        return finish(*x, 0)
    for it in range(1, options.newton_steps + 1):
        a, b = x
        pa, pb = pressure(a, theta_from_vs(a, sL)), pressure(b, theta_from_vs(b, sR))
        J = np.array([[-eigenvalue(a, sL, "minus"), eigenvalue(b, sR, "plus")],
                      [-5.0 / 3.0 * pa / a, 5.0 / 3.0 * pb / b]])
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        nrm = np.max(np.abs(F))
        while lam > 1e-6:
            y = x + lam * dx
            if y[0] >= L.v and y[1] >= R.v:
                Fy = residual(*y)
                if np.max(np.abs(Fy)) < nrm or lam < 1e-3:
                    break
            lam *= 0.5
        else:
            break
        if not (y[0] >= L.v and y[1] >= R.v):
            break
        x, F = y, Fy
        if np.max(np.abs(F)) <= tol * scale:
            return finish(*x, it)
    return _bisect_pressure(L, R, sL, sR, tol * scale, options, finish)


def _bisect_pressure(L, R, sL, sR, atol, options, finish):
    """Fallback: bracket the common pressure in ``(0, min(p_-, p_+)]``."""
    kL = 1.0 / (2.0 * np.pi) * np.exp(sL - 1.0)  # p = k v^{-5/3} on the isentrope
    kR = 1.0 / (2.0 * np.pi) * np.exp(sR - 1.0)
    pmax = min(L.p, R.p)

    def vols(p):
        return (kL / p) ** 0.6, (kR / p) ** 0.6

    def F(p):
        a, b = vols(p)
        a, b = max(a, L.v), max(b, R.v)
        return curve_velocity(L.v, L.u1, a, sL, "minus") - curve_velocity(R.v, R.u1, b, sR, "plus")

    diag = {"p_minus": L.p, "p_plus": R.p}
    Fmax = F(pmax)
    diag["mismatch_at_max_pressure"] = Fmax
    if Fmax > atol:
        raise NoSolution("end states need a compressive (shock) wave: no rarefaction pair connects them",
                         diag)
    # vacuum limit: u_-(inf) - u_+(inf)
    vac = (L.u1 + 3 * _C_LAMBDA * np.exp(0.5 * (sL - 1.0)) * L.v ** (-1 / 3)) \
        - (R.u1 - 3 * _C_LAMBDA * np.exp(0.5 * (sR - 1.0)) * R.v ** (-1 / 3))
    diag["vacuum_gap"] = vac
    if vac <= 0:
        raise NoSolution("end states separate too fast: the pattern would contain vacuum", diag)
    if abs(Fmax) <= atol:
        a, b = vols(pmax)
        return finish(max(a, L.v), max(b, R.v), 0)
    lo, hi = pmax, pmax
    # walk the lower end down until the mismatch changes sign
    for _ in range(options.bisection_steps):
        lo *= 0.5
        if F(lo) > 0:
            break
    else:
        raise NoSolution("could not bracket the star pressure", diag)
    p, res = optimize.brentq(F, lo, hi, xtol=1e-15, rtol=4e-16, maxiter=options.bisection_steps,
                             full_output=True)
    if not res.converged:
        raise NoSolution("star-pressure bisection did not converge", diag)
    a, b = vols(p)
    return finish(a, b, res.iterations)


def forward_end_state(left: ThermoState, v_minus_star: float, theta_ratio: float,
                      v_plus: float) -> tuple[ThermoState, StarStates]:
    """Walk the wave curves forward from ``left``.

    Chooses ``v_-*`` on the 1-curve, the ratio ``theta_+* / theta_-*`` across
    the contact (pressure is continuous, which fixes ``v_+*``), then the right
    end volume ``v_+ <= v_+*`` on the 3-curve.  Returns the implied right end
    state together with the star states.
    """
    if v_minus_star < left.v:
        raise DomainError("v_minus_star must not be below v_minus")
    sL = left.s
    th_m = theta_from_vs(v_minus_star, sL)
    u_star = rarefaction_u(left.v, left.u1, v_minus_star, sL, "minus")
    p_star = pressure(v_minus_star, th_m)
    if not theta_ratio > 0:
        raise DomainError("theta_ratio must be positive")
    th_p = th_m * theta_ratio
    vp_star = 2.0 * th_p / (3.0 * p_star)
    sR = entropy(vp_star, th_p)
    if not 0 < v_plus <= vp_star:
        raise DomainError("v_plus must lie in (0, v_plus_star]")
    # the 3-curve from the right end: u_star = u_+ - int_{v_+}^{v_+*} lambda_+
    u_plus = u_star + integrate.quad(lambda e: eigenvalue(e, sR, "plus"), v_plus, vp_star,
                                     epsabs=1e-13, epsrel=1e-13)[0]
    right = ThermoState(v_plus, u_plus, theta_from_vs(v_plus, sR))
    stars = StarStates(v_minus_star, vp_star, u_star, th_m, th_p, p_star)
    return right, stars


def wave_strengths(ends: EndStates, stars: StarStates) -> dict:
    """Strengths of the three waves and of the whole pattern."""
    L, R = ends.left, ends.right
    d_rm = np.linalg.norm([stars.v_minus_star - L.v, stars.u_star - L.u1,
                           stars.theta_minus_star - L.theta])
    d_rp = np.linalg.norm([stars.v_plus_star - R.v, stars.u_star - R.u1,
                           stars.theta_plus_star - R.theta])
    return {"delta_r_minus": float(d_rm), "delta_r_plus": float(d_rp),
            "delta_cd": float(abs(stars.theta_plus_star - stars.theta_minus_star)),
            "delta": ends.strength}


def riemann_fan_eval(stars: StarStates, ends: EndStates, xi: float) -> ThermoState:
    """Inviscid self-similar solution at ``xi = x / t`` (contact at ``xi = 0``)."""
    L, R = ends.left, ends.right
    sL, sR = L.s, R.s
    lam_l, lam_ls = eigenvalue(L.v, sL, "minus"), eigenvalue(stars.v_minus_star, sL, "minus")
    lam_rs, lam_r = eigenvalue(stars.v_plus_star, sR, "plus"), eigenvalue(R.v, sR, "plus")
    if xi <= lam_l:
        return L
    if xi < lam_ls:
        v = volume_from_speed(xi, sL, "minus")
        return ThermoState(v, rarefaction_u(L.v, L.u1, v, sL, "minus"), theta_from_vs(v, sL))
    if xi < 0:
        return stars.left
    if xi == 0:
        # right-continuous at the contact
        return stars.right
    if xi <= lam_rs:
        return stars.right
    if xi < lam_r:
        v = volume_from_speed(xi, sR, "plus")
        return ThermoState(v, rarefaction_u(R.v, R.u1, v, sR, "plus"), theta_from_vs(v, sR))
    return R
