"""Norms, energies, decay fits and envelope checks on solver snapshots."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import NonPositiveSeries, ValidationError
from .wave_profiles import CompositeWave, ContactProfile, composite_eval, weight_hat_w


def trapezoid(f: np.ndarray, h: float) -> float:
    """Trapezoid rule along the last axis, summed over any leading axes."""
    f = np.asarray(f, dtype=float)
    return float(h * (f.sum() - 0.5 * (f[..., 0].sum() + f[..., -1].sum())))


def derivative(f: np.ndarray, h: float) -> np.ndarray:
    """Centred differences inside, one-sided (second-order) at the ends."""
    return np.gradient(f, h, edge_order=2)


@dataclass
class DiagnosticsRecord:
    t: float
    l2_pert: float
    h1_pert: float
    linf_pert: float
    l2_charge: float
    linf_charge: float
    weighted_l2: float
    energy_fluid: float
    min_v: float
    min_theta: float
    boundary_pert: float

    def __post_init__(self) -> None:
        for f in fields(self):
            val = getattr(self, f.name)
            if not np.isfinite(val):
                raise ValidationError(f"diagnostic {f.name} is not finite")

    def as_dict(self) -> dict:
        return asdict(self)


def perturbation(field, wave: CompositeWave | None, t: float) -> np.ndarray:
    """Stack ``(phi, psi1, psi2, psi3, zeta)`` of the field against the ansatz."""
    if wave is None:
        return np.zeros((5, field.x.size))
    S = composite_eval(wave, field.x, t)
    return np.stack([field.v - S.v, field.u1 - S.u, field.u2, field.u3, field.theta - S.theta])


def perturbation_norms(field, wave: CompositeWave | None, t: float, *,
                       pert: np.ndarray | None = None) -> dict:
    """Trapezoid ``L2`` and ``H1`` norms and the max-norm of ``(phi, psi, zeta)``."""
    P = perturbation(field, wave, t) if pert is None else pert
    h = field.h
    l2sq = trapezoid(P**2, h)
    dP = np.stack([derivative(p, h) for p in P])
    h1sq = l2sq + trapezoid(dP**2, h)
    return {"l2_pert": np.sqrt(l2sq), "h1_pert": np.sqrt(h1sq),
            "linf_pert": float(np.abs(P).max())}


def charge_norms(charge, h: float) -> dict:
    n2x = derivative(charge.n2, h)
    sq = trapezoid(charge.Phi_x**2, h) + trapezoid(charge.n2**2, h) + trapezoid(n2x**2, h)
    return {"l2_charge": np.sqrt(sq),
            "linf_charge": float(max(np.abs(charge.Phi_x).max(), np.abs(charge.n2).max()))}


def energy_fluid(field, charge, wave: CompositeWave | None, t: float, *,
                 pert: np.ndarray | None = None) -> float:
    """``||(v - v_bar, u - u_bar, theta - theta_bar)||_{H1}^2 + ||(Phi_x, n2, n2_x)||^2``.

    The velocity-space terms of the full energy need kinetic data and are omitted.
    """
    nrm = perturbation_norms(field, wave, t, pert=pert)
    return nrm["h1_pert"] ** 2 + charge_norms(charge, field.h)["l2_charge"] ** 2


def weighted_l2(field, pert: np.ndarray, t: float, alpha: float) -> float:
    """``int (phi^2 + psi^2 + zeta^2) w_hat^2 dx``."""
    w = weight_hat_w(field.x, t, alpha)
    return trapezoid((pert**2).sum(axis=0) * w**2, field.h)


def record(field, charge, wave: CompositeWave | None, t: float, *, alpha: float = 0.1,
           boundary_nodes: int = 10) -> DiagnosticsRecord:
    P = perturbation(field, wave, t)
    nrm = perturbation_norms(field, wave, t, pert=P)
    ch = charge_norms(charge, field.h)
    nb = boundary_nodes
    edge = np.abs(np.concatenate([P[:, :nb], P[:, -nb:]], axis=1)).max()
    return DiagnosticsRecord(
        t=float(t), l2_pert=nrm["l2_pert"], h1_pert=nrm["h1_pert"], linf_pert=nrm["linf_pert"],
        l2_charge=ch["l2_charge"], linf_charge=ch["linf_charge"],
        weighted_l2=weighted_l2(field, P, t, alpha),
        energy_fluid=nrm["h1_pert"] ** 2 + ch["l2_charge"] ** 2,
        min_v=float(field.v.min()), min_theta=float(field.theta.min()),
        boundary_pert=float(edge))


def records_to_csv(records, path=None) -> str:
    """CSV (header row, ``,`` separator, LF endings); floats written with ``repr``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(DiagnosticsRecord)]
    w.writerow(names)
    for r in records:
        w.writerow([repr(float(getattr(r, n))) for n in names])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    halfwidth: float
    n: int


def decay_fit(series, window: tuple[float, float] | None = None) -> DecayFit:
    """Least-squares slope of ``log y`` against ``log(1 + t)``.

    ``halfwidth`` is twice the standard error of the slope.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("series must be a sequence of (t, value) pairs")
    t, y = arr[:, 0], arr[:, 1]
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, y = t[keep], y[keep]
    if t.size < 10:
        raise ValidationError("decay_fit needs at least 10 points in the window")
    if np.any(y <= 0):
        raise NonPositiveSeries("decay_fit needs strictly positive values")
    X, Y = np.log1p(t), np.log(y)
    A = np.vstack([X, np.ones_like(X)]).T
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    r = Y - A @ coef
    dof = max(t.size - 2, 1)
    s2 = float(r @ r) / dof
    se = np.sqrt(s2 / float(((X - X.mean()) ** 2).sum()))
    return DecayFit(float(coef[0]), float(2.0 * se), int(t.size))


@dataclass(frozen=True)
class TailCheck:
    passed: bool
    c1: float
    c2: float
    tightest_c2: float
    worst_ratio: float


def gaussian_tail_check(x, t: float, Theta, Theta_x, Theta_xx, theta_minus: float,
                        theta_plus: float, c1: float, c2: float, *,
                        floor: float = 1e-13, rtol: float = 1e-6) -> TailCheck:
    """Check ``|Theta - theta*| + sqrt(1+t)|Theta_x| + (1+t)|Theta_xx| <=
    c1 delta exp(-c2 x^2 / (1+t))`` pointwise.

    Values below ``floor * max(delta, 1)`` count as round-off and pass.  Also
    reports the largest ``c2`` that still passes with the given ``c1``.
    """
    x = np.asarray(x, dtype=float)
    delta = abs(theta_plus - theta_minus)
    s = 1.0 + t
    ref = np.where(x < 0, theta_minus, theta_plus)
    F = np.abs(np.asarray(Theta) - ref) + np.sqrt(s) * np.abs(Theta_x) + s * np.abs(Theta_xx)
    noise = floor * max(delta, 1.0)
    if delta == 0:
        ok = bool(np.all(F <= noise))
        return TailCheck(ok, c1, c2, np.inf, 0.0)
    env = c1 * delta * np.exp(-c2 * x**2 / s)
    live = F > noise
    ratio = np.where(live, F / env, 0.0)
    worst = float(ratio.max())
    # tightest c2: F <= c1 delta exp(-c2 eta^2)  <=>  c2 <= log(c1 delta / F) / eta^2
    eta2 = x**2 / s
    m = live & (eta2 > 0)
    if np.any(F[live & (eta2 == 0)] > c1 * delta * (1 + rtol)):
        tight = -np.inf
    elif np.any(m):
        tight = float(np.min(np.log(c1 * delta / F[m]) / eta2[m]))
    else:
        tight = np.inf
    return TailCheck(worst <= 1.0 + rtol, c1, c2, tight, worst)


def contact_tail_check(profile: ContactProfile, t: float, c1: float | None = None,
                       c2: float | None = None, n: int = 4001) -> TailCheck:
    """:func:`gaussian_tail_check` on samples of a solved contact profile over
    ``|x| <= 10 sqrt(1+t)``."""
    from .wave_profiles import contact_eval
    s = np.sqrt(1.0 + t)
    x = np.linspace(-10 * s, 10 * s, n)
    C = contact_eval(profile, x, t)
    return gaussian_tail_check(x, t, C.theta, C.theta_x, C.theta_xx, profile.theta_minus_star,
                               profile.theta_plus_star, c1 or profile.c1_est, c2 or profile.c2_est)


def stability_criteria(records, *, charge_from: float = 5.0) -> dict:
    """Pass/fail summary of a stability run.

    * ``perturbation_decay``: sup-norm of ``(phi, psi, zeta)`` at the last record
      at most a fifth of the first;
    * ``charge_decay``: ``||(Phi_x, n2)||_inf`` non-increasing after
      ``charge_from`` and at the end at most a tenth of the first;
    * ``energy_bounded``: fluid energy never above three times the first;
    * ``positivity``: ``v`` and ``theta`` positive at every record.
    """
    if len(records) < 2:
        raise ValidationError("need at least two records")
    r0, rT = records[0], records[-1]
    late = [r.linf_charge for r in records if r.t > charge_from]
    mono = all(b <= a for a, b in zip(late, late[1:]))
    e_max = max(r.energy_fluid for r in records)
    pos = min(min(r.min_v, r.min_theta) for r in records)
    out = {
        "perturbation_decay": {"initial": r0.linf_pert, "final": rT.linf_pert,
                               "ratio": rT.linf_pert / r0.linf_pert if r0.linf_pert else 0.0,
                               "bound": 0.2},
        "charge_decay": {"initial": r0.linf_charge, "final": rT.linf_charge,
                         "ratio": rT.linf_charge / r0.linf_charge if r0.linf_charge else 0.0,
                         "bound": 0.1, "monotone_after": charge_from, "monotone": mono},
        "energy_bounded": {"initial": r0.energy_fluid, "max": e_max,
                           "ratio": e_max / r0.energy_fluid if r0.energy_fluid else 0.0,
                           "bound": 3.0},
        "positivity": {"min_v_or_theta": pos},
    }
    out["perturbation_decay"]["passed"] = rT.linf_pert <= 0.2 * r0.linf_pert
    out["charge_decay"]["passed"] = mono and rT.linf_charge <= 0.1 * r0.linf_charge
    out["energy_bounded"]["passed"] = e_max <= 3.0 * r0.energy_fluid
    out["positivity"]["passed"] = pos > 0
    return out
