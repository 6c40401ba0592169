"""Explicit finite-difference solver for the closed Lagrangian fluid/Poisson system.

Unknowns on a uniform grid of ``[-X, X]``: specific volume ``v``, velocity
``(u1, u2, u3)``, temperature ``theta`` and the charge-difference density
``n2``; the electric field ``Phi_x`` is recomputed from ``n2`` at every stage.
Internally the charge is carried as ``m = n2 v`` (charge per unit mass), which
turns the ``n2`` equation into the divergence form ``m_t + J_x = 0``.

Discretisation: centred differences for pressure and transport terms,
flux-form (half-node) differences for every diffusive term, Heun's RK2 in time.
The outermost node on each side is pinned to the ansatz (``n2 = 0`` there).
An optional absorbing layer of width ``sponge_width`` next to each end relaxes
``(v, u, energy)`` toward the ansatz at rate ``sponge_strength * r^2``
(``r`` the depth into the layer, from 0 to 1), so outgoing sound waves leave
instead of reflecting off the pinned nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (DomainTooSmall, NeutralityViolated, PositivityViolation,
                     StabilityViolation, ValidationError, VPBError)
from .transport import TransportModel
from .wave_profiles import CompositeWave, composite_eval


@dataclass(frozen=True)
class SolverConfig:
    """Grid, time stepping and tolerance settings for one run."""

    h: float = 0.05
    X: float = 100.0
    T: float = 200.0
    cfl: float = 0.9
    dt: float | None = None
    transport: TransportModel = TransportModel()
    output_every: float = 1.0
    neutrality_tol: float = 1e-10
    boundary_check_nodes: int = 10
    boundary_tol: float = 1e-3
    sponge_width: float = 0.0
    sponge_strength: float = 2.0
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not (self.h > 0 and self.X > 0 and self.T >= 0):
            raise ValidationError("need h > 0, X > 0, T >= 0")
        if self.X / self.h < 20:
            raise ValidationError("grid needs at least 40 cells")
        if not 0 < self.cfl <= 1:
            raise ValidationError("cfl must lie in (0, 1]")
        if self.dt is not None and not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not self.output_every > 0:
            raise ValidationError("output_every must be positive")
        if self.boundary_check_nodes < 1:
            raise ValidationError("boundary_check_nodes must be at least 1")
        if not 0 <= self.sponge_width < self.X:
            raise ValidationError("sponge_width must lie in [0, X)")
        if not self.sponge_strength >= 0:
            raise ValidationError("sponge_strength must be nonnegative")
        object.__setattr__(self, "snapshot_times", tuple(sorted(float(t) for t in self.snapshot_times)))
        if any(not 0 <= t <= self.T for t in self.snapshot_times):
            raise ValidationError("snapshot_times must lie in [0, T]")

    @property
    def x(self) -> np.ndarray:
        n = int(round(2 * self.X / self.h)) + 1
        return np.linspace(-self.X, self.X, n)


@dataclass
class FluidField:
    x: np.ndarray
    v: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    theta: np.ndarray

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    def copy(self) -> "FluidField":
        return FluidField(self.x, *(a.copy() for a in (self.v, self.u1, self.u2, self.u3, self.theta)))


@dataclass
class ChargeField:
    n2: np.ndarray
    Phi_x: np.ndarray

    def copy(self) -> "ChargeField":
        return ChargeField(self.n2.copy(), self.Phi_x.copy())


@dataclass(frozen=True)
class PerturbationSpec:
    """Initial perturbation ``(phi0, psi0, zeta0, n2_0)`` of amplitude ``epsilon``.

    ``shape``: ``"bump"`` (compactly supported C-infinity bump of half-width
    ``width``), ``"gaussian"`` (``exp(-x^2 / width^2)``) or ``"random"`` (a seeded
    sum of bumps, rescaled so each component has sup-norm ``epsilon``).  ``n2_0``
    uses the odd companion ``(x / width)`` times the shape, then is projected to
    zero total charge.
    """

    epsilon: float = 0.01
    shape: str = "bump"
    width: float = 10.0
    seed: int = 0
    components: tuple[str, ...] = ("phi", "psi", "zeta", "n2")
    center: float = 0.0

    def __post_init__(self) -> None:
        if self.shape not in ("bump", "gaussian", "random"):
            raise ValidationError(f"unknown perturbation shape {self.shape!r}")
        if not self.width > 0:
            raise ValidationError("perturbation width must be positive")
        if not self.epsilon >= 0:
            raise ValidationError("perturbation amplitude must be nonnegative")
        bad = set(self.components) - {"phi", "psi", "zeta", "n2", "psi2", "psi3"}
        if bad:
            raise ValidationError(f"unknown perturbation components {sorted(bad)}")

    def _bump(self, z):
        out = np.zeros_like(z)
        m = np.abs(z) < 1
        out[m] = np.exp(1.0 - 1.0 / (1.0 - z[m] ** 2))
        return out

    def profiles(self, x: np.ndarray) -> dict[str, np.ndarray]:
        z = (x - self.center) / self.width
        rng = np.random.default_rng(self.seed)
        out = {}
        for name in ("phi", "psi", "psi2", "psi3", "zeta", "n2"):
            if name not in self.components or self.epsilon == 0:
                out[name] = np.zeros_like(x)
                continue
            if self.shape == "bump":
                f = self._bump(z)
            elif self.shape == "gaussian":
                f = np.exp(-z**2)
            else:
                c = rng.uniform(-0.5, 0.5, 4)
                a = rng.normal(size=4)
                f = sum(ak * self._bump(2.0 * (z - ck)) for ak, ck in zip(a, c))
            if name == "n2":
                f = z * f
            peak = np.max(np.abs(f))
            out[name] = self.epsilon * f / peak if peak > 0 else f
        return out


# --------------------------------------------------------------------------- Poisson

def total_charge(n2: np.ndarray, v: np.ndarray, h: float) -> float:
    """Trapezoid value of ``int n2 v dx``."""
    m = n2 * v
    return float(h * (m.sum() - 0.5 * (m[0] + m[-1])))


def solve_poisson(n2: np.ndarray, v: np.ndarray, config_or_h, *, tol: float = 1e-10,
                  check: bool = True) -> np.ndarray:
    """``Phi_x`` from ``(1/v)(Phi_x / v)_x = 2 n2`` with ``Phi_x(-X) = 0``.

    ``Phi_x / v`` is the cumulative trapezoid integral of ``2 n2 v``; under
    discrete neutrality it also vanishes at ``+X``.
    """
    h = config_or_h.h if isinstance(config_or_h, SolverConfig) else float(config_or_h)
    m = n2 * v
    if check:
        q = total_charge(n2, v, h)
        scale = h * np.abs(m).sum()
        if abs(q) > tol * max(scale, np.finfo(float).tiny):
            raise NeutralityViolated(f"net charge {q:.3e} exceeds {tol:.0e} x ||n2 v||_1")
    E = np.concatenate([[0.0], np.cumsum(h * (m[1:] + m[:-1]))])
    return v * E


def project_neutral(n2: np.ndarray, v: np.ndarray, h: float, carrier: np.ndarray | None = None
                    ) -> np.ndarray:
    """Remove the net charge of ``n2`` along ``carrier`` (default: ``|n2|``, so
    compact support is kept); exact in the trapezoid measure."""
    m = n2 * v
    b = np.abs(m) if carrier is None else carrier * v
    q, qb = total_charge(m, np.ones_like(m), h), total_charge(b, np.ones_like(b), h)
    if q == 0 or qb == 0:
        return n2.copy()
    return (m - q / qb * b) / v


# --------------------------------------------------------------------------- right-hand side

@dataclass
class Tendencies:
    v: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    theta: np.ndarray
    n2: np.ndarray
    energy: np.ndarray = field(repr=False, default=None)
    m: np.ndarray = field(repr=False, default=None)


def _half(a):
    return 0.5 * (a[1:] + a[:-1])


def charge_current(field: FluidField, n2: np.ndarray, Phi_x: np.ndarray,
                   model: TransportModel) -> np.ndarray:
    """Microscopic current ``J2 = (3 k1 / (2 theta v)) Phi_x - (k1 / v)(n2 v)_x`` at half nodes."""
    h = field.h
    vh, th = _half(field.v), _half(field.theta)
    k1 = model.kappa1(th)
    m = n2 * field.v
    return 1.5 * k1 / (th * vh) * _half(Phi_x) - k1 / vh * np.diff(m) / h


def rhs(field: FluidField, charge: ChargeField, config: SolverConfig) -> Tendencies:
    """Time derivatives of ``(v, u1, u2, u3, theta, n2)`` at interior nodes (zero at
    the two pinned end nodes)."""
    model = config.transport
    v, u1, u2, u3, th = field.v, field.u1, field.u2, field.u3, field.theta
    n2, E = charge.n2, charge.Phi_x
    h = field.h
    if np.any(v <= 0) or np.any(th <= 0):
        raise PositivityViolation("nonpositive volume or temperature in rhs")
    p = 2.0 * th / (3.0 * v)
    vh, thh = _half(v), _half(th)
    mu, ka = model.mu(thh), model.kappa(thh)

    def c(a):  # centred first derivative at interior nodes
        return (a[2:] - a[:-2]) / (2.0 * h)

    def div(flux):  # flux at half nodes -> divergence at interior nodes
        return np.diff(flux) / h

    du1, du2, du3 = np.diff(u1) / h, np.diff(u2) / h, np.diff(u3) / h
    s1 = 4.0 / 3.0 * mu * du1 / vh
    s2, s3 = mu * du2 / vh, mu * du3 / vh
    J = charge_current(field, n2, E, model)
    Jn = np.concatenate([[J[0]], _half(J), [J[-1]]])  # node values for the Joule term
    q = ka * np.diff(th) / (h * vh) + s1 * _half(u1) + s2 * _half(u2) + s3 * _half(u3)

    i = slice(1, -1)
    z = np.zeros_like(v)
    vt, u1t, u2t, u3t, et, mt = (z.copy() for _ in range(6))
    vt[i] = c(u1)
    u1t[i] = -c(p) + E[i] * n2[i] + div(s1)
    u2t[i] = div(s2)
    u3t[i] = div(s3)
    et[i] = -c(p * u1) + E[i] * (n2[i] * u1[i] + Jn[i]) + div(q)
    mt[i] = -div(J)
    tht = et - (u1 * u1t + u2 * u2t + u3 * u3t)
    n2t = (mt - n2 * vt) / v
    return Tendencies(vt, u1t, u2t, u3t, tht, n2t, energy=et, m=mt)


# --------------------------------------------------------------------------- stepping

def stable_dt(field: FluidField, config: SolverConfig) -> float:
    """Explicit-diffusion bound ``0.4 h^2 min(v^2) / max(4 mu/3, kappa, kappa_1)``."""
    D = config.transport.max_diffusivity(float(field.theta.min()), float(field.theta.max()))
    return 0.4 * field.h**2 * float(field.v.min()) ** 2 / D


@dataclass
class _State:
    v: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    e: np.ndarray
    m: np.ndarray

    def axpy(self, a: float, d: "_State") -> "_State":
        return _State(*(x + a * y for x, y in zip(self.arrays(), d.arrays())))

    def arrays(self):
        return (self.v, self.u1, self.u2, self.u3, self.e, self.m)


def _to_state(field: FluidField, charge: ChargeField) -> _State:
    e = field.theta + 0.5 * (field.u1**2 + field.u2**2 + field.u3**2)
    return _State(field.v, field.u1, field.u2, field.u3, e, charge.n2 * field.v)


def _from_state(x, S: _State, h: float, check_neutral: bool = False) -> tuple[FluidField, ChargeField]:
    th = S.e - 0.5 * (S.u1**2 + S.u2**2 + S.u3**2)
    f = FluidField(x, S.v, S.u1, S.u2, S.u3, th)
    n2 = S.m / S.v
    return f, ChargeField(n2, solve_poisson(n2, S.v, h, check=check_neutral))


def _derivative(field, charge, config) -> _State:
    d = rhs(field, charge, config)
    return _State(d.v, d.u1, d.u2, d.u3, d.energy, d.m)


def _pin(S: _State, bc: dict) -> None:
    for k, name in ((0, "v"), (1, "u1"), (2, "u2"), (3, "u3"), (4, "e"), (5, "m")):
        arr = S.arrays()[k]
        arr[0], arr[-1] = bc[name]


class AnsatzTable:
    """``(v, u1, total energy)`` of the ansatz at fixed nodes, tabulated every
    ``tau`` time units and interpolated linearly in between.

    Keeps the ansatz evaluations (a Burgers root-find per node) off the
    per-step path; the interpolation error is ``O(tau^2)`` times the second
    time derivative of the ansatz.
    """

    def __init__(self, wave: CompositeWave, xs: np.ndarray, tau: float = 0.05) -> None:
        self.wave, self.xs, self.tau = wave, np.asarray(xs, dtype=float), tau
        self._cache: dict[int, np.ndarray] = {}

    def _table(self, k: int) -> np.ndarray:
        if k not in self._cache:
            if len(self._cache) > 8:
                self._cache.clear()
            S = composite_eval(self.wave, self.xs, k * self.tau)
            self._cache[k] = np.stack([S.v, S.u, S.theta + 0.5 * S.u**2])
        return self._cache[k]

    def __call__(self, t: float) -> np.ndarray:
        k = int(np.floor(t / self.tau))
        a = t / self.tau - k
        return (1.0 - a) * self._table(k) + a * self._table(k + 1)


def _boundary_values(wave: CompositeWave | None, x: np.ndarray, t: float, fallback: _State,
                     ends: AnsatzTable | None = None) -> dict:
    if wave is None:
        return {n: (a[0], a[-1]) for n, a in zip(("v", "u1", "u2", "u3", "e", "m"), fallback.arrays())}
    if ends is not None:
        v, u, e = ends(t)
    else:
        S = composite_eval(wave, np.array([x[0], x[-1]]), t)
        v, u, e = S.v, S.u, S.theta + 0.5 * S.u**2
    return {"v": tuple(v), "u1": tuple(u), "u2": (0.0, 0.0), "u3": (0.0, 0.0),
            "e": tuple(e), "m": (0.0, 0.0)}


class Sponge:
    """Relaxation rates and ansatz targets inside the absorbing layers."""

    def __init__(self, wave: CompositeWave, x: np.ndarray, config: SolverConfig,
                 tau: float = 0.05) -> None:
        L = config.sponge_width
        r = np.clip((np.abs(x) - (x[-1] - L)) / L, 0.0, 1.0) if L > 0 else np.zeros_like(x)
        self.idx = np.flatnonzero(r > 0)
        self.rate = config.sponge_strength * r[self.idx] ** 2
        self.target = AnsatzTable(wave, x[self.idx], tau)

    def apply(self, S: "_State", d: "_State", t: float) -> None:
        """Add ``-rate (S - target)`` to the tendencies ``d`` (charge untouched)."""
        if self.idx.size == 0:
            return
        i = self.idx
        v, u, e = self.target(t)
        d.v[i] -= self.rate * (S.v[i] - v)
        d.u1[i] -= self.rate * (S.u1[i] - u)
        d.u2[i] -= self.rate * S.u2[i]
        d.u3[i] -= self.rate * S.u3[i]
        d.e[i] -= self.rate * (S.e[i] - e)


def step(field: FluidField, charge: ChargeField, dt: float, config: SolverConfig, *,
         t: float = 0.0, wave: CompositeWave | None = None,
         sponge: Sponge | None = None, ends: AnsatzTable | None = None
         ) -> tuple[FluidField, ChargeField]:
    """One Heun (RK2) step; the Poisson field is refreshed at each stage.

    End nodes follow the ansatz when ``wave`` is given (exactly, or through the
    table ``ends`` at ``(x[0], x[-1])``), otherwise they are frozen.
    """
    bound = stable_dt(field, config)
    if dt > bound * (1 + 1e-12):
        raise StabilityViolation(f"dt={dt:.3e} exceeds the explicit bound {bound:.3e}")
    x, h = field.x, field.h
    if sponge is None and wave is not None and config.sponge_width > 0:
        sponge = Sponge(wave, x, config)
    S0 = _to_state(field, charge)
    bc = _boundary_values(wave, x, t + dt, S0, ends)
    k1 = _derivative(field, charge, config)
    if sponge is not None:
        sponge.apply(S0, k1, t)
    S1 = S0.axpy(dt, k1)
    _pin(S1, bc)
    f1, c1 = _from_state(x, S1, h)
    k2 = _derivative(f1, c1, config)
    if sponge is not None:
        sponge.apply(S1, k2, t + dt)
    S2 = S0.axpy(0.5 * dt, k1).axpy(0.5 * dt, k2)
    _pin(S2, bc)
    f2, c2 = _from_state(x, S2, h)
    if np.any(f2.v <= 0) or np.any(f2.theta <= 0):
        k = int(np.argmin(np.minimum(f2.v, f2.theta)))
        raise PositivityViolation(f"v or theta nonpositive at x={x[k]:.3f}, t={t + dt:.4f}",
                                  time=t + dt)
    return f2, c2


# --------------------------------------------------------------------------- setup and runs

def init_from_ansatz(wave: CompositeWave, perturbation: PerturbationSpec,
                     config: SolverConfig) -> tuple[FluidField, ChargeField]:
    """Ansatz at ``t = 0`` plus the perturbation; ``n2_0`` made exactly neutral."""
    x = config.x
    S = composite_eval(wave, x, 0.0)
    P = perturbation.profiles(x)
    for name in P:
        P[name][[0, -1]] = 0.0
    v = S.v + P["phi"]
    th = S.theta + P["zeta"]
    if np.any(v <= 0) or np.any(th <= 0):
        raise PositivityViolation("perturbation makes v or theta nonpositive", time=0.0)
    f = FluidField(x, v, S.u + P["psi"], P["psi2"].copy(), P["psi3"].copy(), th)
    n2 = project_neutral(P["n2"], v, f.h)
    return f, ChargeField(n2, solve_poisson(n2, v, f.h, tol=config.neutrality_tol))


def lagrangian_coordinate(y: np.ndarray, rho: np.ndarray) -> "LagrangianMap":
    """Mass coordinate ``x_L(y) = int_0^y rho dy'`` from samples of a positive density."""
    return LagrangianMap(np.asarray(y, dtype=float), np.asarray(rho, dtype=float))


@dataclass
class LagrangianMap:
    y: np.ndarray
    rho: np.ndarray

    def __post_init__(self) -> None:
        from scipy.interpolate import CubicSpline, PchipInterpolator
        if np.any(self.rho <= 0):
            raise ValidationError("density must be positive")
        if np.any(np.diff(self.y) <= 0):
            raise ValidationError("y samples must be strictly increasing")
        if not self.y[0] <= 0 <= self.y[-1]:
            raise ValidationError("y samples must bracket the origin")
        F = CubicSpline(self.y, self.rho).antiderivative()
        self._F = lambda s: F(s) - F(0.0)
        self._rho = CubicSpline(self.y, self.rho)
        xs = self._F(self.y)
        self._guess = PchipInterpolator(xs, self.y)
        self.x_range = (float(xs[0]), float(xs[-1]))

    def forward(self, y):
        return self._F(np.asarray(y, dtype=float))

    def inverse(self, x):
        """Monotone interpolation for a first guess, then Newton on ``x_L(y) = x``."""
        x = np.asarray(x, dtype=float)
        y = self._guess(x)
        for _ in range(20):
            dy = (self._F(y) - x) / self._rho(y)
            y = y - dy
            if np.max(np.abs(dy)) < 1e-15 * max(1.0, float(np.max(np.abs(y)))):
                break
        return y


@dataclass
class RunResult:
    records: list
    field: FluidField
    charge: ChargeField
    t: float
    steps: int
    dt: float
    snapshots: dict = field(default_factory=dict)


def snapshot_table(field_: FluidField, charge: ChargeField) -> np.ndarray:
    """Columns ``x, v, u1, theta, n2, Phi_x``."""
    return np.column_stack([field_.x, field_.v, field_.u1, field_.theta, charge.n2, charge.Phi_x])


def snapshot_csv(field_: FluidField, charge: ChargeField, path=None) -> str:
    rows = ["x,v,u1,theta,n2,Phi_x"]
    rows += [",".join(repr(float(c)) for c in r) for r in snapshot_table(field_, charge)]
    text = "\n".join(rows) + "\n"
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def run(config: SolverConfig, wave: CompositeWave, perturbation: PerturbationSpec, *,
        progress=None) -> RunResult:
    """Advance ``init_from_ansatz`` to ``T`` and record diagnostics every ``output_every``.

    Snapshots are kept at ``config.snapshot_times``.  Solver errors get a
    ``last_good`` attribute ``(t, field, charge)`` with the state before the
    failing step.  :class:`DomainTooSmall` is raised when the perturbation in the
    outermost ``boundary_check_nodes`` nodes exceeds ``boundary_tol`` times the
    largest sup-norm recorded so far.
    """
    from .diagnostics import record

    field_, charge = init_from_ansatz(wave, perturbation, config)
    sponge = Sponge(wave, field_.x, config) if config.sponge_width > 0 else None
    ends = AnsatzTable(wave, field_.x[[0, -1]])
    nb = config.boundary_check_nodes
    t, steps, dt = 0.0, 0, 0.0
    records = [record(field_, charge, wave, 0.0, boundary_nodes=nb)]
    peak = records[0].linf_pert
    snaps = {}
    pending = list(config.snapshot_times)
    while pending and pending[0] <= 0.0:
        snaps[pending.pop(0)] = (field_.copy(), charge.copy())
    next_out = config.output_every
    while t < config.T - 1e-12:
        dt = config.dt if config.dt is not None else config.cfl * stable_dt(field_, config)
        target = min(next_out, config.T, pending[0] if pending else np.inf)
        dt = min(dt, target - t)
        try:
            new = step(field_, charge, dt, config, t=t, wave=wave, sponge=sponge, ends=ends)
        except VPBError as exc:
            exc.last_good = (t, field_, charge)
            raise
        field_, charge = new
        t += dt
        steps += 1
        if t < target - 1e-12:
            continue
        t = target
        if pending and t >= pending[0] - 1e-12:
            snaps[pending.pop(0)] = (field_.copy(), charge.copy())
        if t >= min(next_out, config.T) - 1e-12:
            rec = record(field_, charge, wave, t, boundary_nodes=nb)
            records.append(rec)
            peak = max(peak, rec.linf_pert)
            if peak > 0 and rec.boundary_pert > config.boundary_tol * peak:
                exc = DomainTooSmall(
                    f"perturbation reached the last {nb} nodes at t={t:.2f} "
                    f"({rec.boundary_pert:.2e} against peak {peak:.2e}); enlarge X, "
                    "add an absorbing layer or shorten T")
                exc.last_good = (t, field_, charge)
                raise exc
            next_out = t + config.output_every
            if progress is not None:
                progress(rec)
    return RunResult(records, field_, charge, t, steps, dt, snaps)
