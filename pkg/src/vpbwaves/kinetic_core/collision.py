"""Hard-sphere collision operator on uniform velocity boxes."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from ..errors import GridTooCoarse, NonphysicalMoments, ValidationError
from . import _kernels
from .grids import R_GAS, MaxwellParams, VelocityGrid
from .maxwell import Distribution, collision_invariants, moments

_MODES = {"log": _kernels.LOG, "trilinear": _kernels.TRILINEAR, "envelope": _kernels.RATIO}


@dataclass(frozen=True)
class CollisionQuadrature:
    """Discretisation choices for the collision integral.

    ``interpolation`` selects how post-collision values are read off the box:
    ``"log"`` (quadratic in ``log f``, needs positive data), ``"envelope"``
    (quadratic in ``f / E`` for Gaussian envelopes given per argument),
    ``"trilinear"`` or ``"auto"`` (log when both arguments are positive,
    envelope about the fitted Maxwellians otherwise).
    """

    n_mu: int = 8
    n_phi: int = 8
    interpolation: str = "auto"
    prune_tol: float = 1e-10
    subsample: float | None = None
    seed: int = 0
    conservation_bound: float = 1e-3

    def __post_init__(self) -> None:
        if self.n_mu < 1 or self.n_phi < 1:
            raise ValidationError("angular grid sizes must be positive")
        if self.interpolation not in (*_MODES, "auto"):
            raise ValidationError(f"unknown interpolation {self.interpolation!r}")
        if self.subsample is not None and not 0 < self.subsample <= 1:
            raise ValidationError("subsample must lie in (0, 1]")
        if not 0 <= self.prune_tol < 1:
            raise ValidationError("prune_tol must lie in [0, 1)")


def sphere_quadrature(n_mu: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in cos(polar) times uniform azimuth; weights sum to 4 pi."""
    mu, wm = leggauss(n_mu)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    st = np.sqrt(1.0 - mu**2)
    S = np.stack([np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
                  np.outer(mu, np.ones(n_phi))], -1).reshape(-1, 3)
    return S, np.outer(wm, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()


def _envelope_array(p: MaxwellParams) -> np.ndarray:
    return np.array([p.peak, *p.u, 2.0 * R_GAS * p.theta])


def _require_box(grid: VelocityGrid) -> None:
    if grid.kind != "box":
        raise ValidationError("collision integrals need a uniform box grid")


def _envelope_of(F: Distribution) -> MaxwellParams | None:
    try:
        return moments(Distribution(np.abs(F.values), F.grid)).params()
    except (NonphysicalMoments, ValidationError):
        return None


def _pruning(grid, envs, tol):
    """Centre and squared radius outside which Gaussian products fall below ``tol``."""
    if tol <= 0 or any(e is None for e in envs):
        return np.zeros(3), np.inf
    c0 = 0.5 * (envs[0].velocity + envs[1].velocity)
    s = R_GAS * max(e.theta for e in envs)
    shift = float(np.linalg.norm(envs[0].velocity - envs[1].velocity))
    r = np.sqrt(2.0 * s * np.log(1.0 / tol)) + shift
    return c0, r * r


def _target_nodes(grid, act, quad):
    if quad.subsample is None or quad.subsample >= 1:
        return act, grid.weights[act]
    rng = np.random.default_rng(quad.seed)
    k = max(1, int(round(quad.subsample * act.size)))
    pick = np.sort(rng.choice(act, size=k, replace=False))
    return pick, grid.weights[pick] * (act.size / k)


def collision_Q(f: Distribution, g: Distribution,
                quad: CollisionQuadrature | None = None, *,
                envelopes: tuple[MaxwellParams, MaxwellParams] | None = None,
                symmetric: bool = False) -> Distribution:
    """Bilinear hard-sphere collision operator ``Q(f, g)`` at the box nodes.

    ``Q(f, g)`` alone conserves mass only.  With ``symmetric=True`` returns
    ``Q(f, g) + Q(g, f)``, which conserves momentum and energy as well.
    ``envelopes`` fixes the Gaussians used by envelope interpolation (default:
    fitted to ``|f|`` and ``|g|``).
    """
    if symmetric:
        a, b = collision_pair(f, g, quad, envelopes=envelopes)
        return a + b
    return _collide(f, g, quad, envelopes, False)[0]


def collision_pair(f: Distribution, g: Distribution,
                   quad: CollisionQuadrature | None = None, *,
                   envelopes: tuple[MaxwellParams, MaxwellParams] | None = None,
                   ) -> tuple[Distribution, Distribution]:
    """``(Q(f, g), Q(g, f))`` from one sweep over the collision pairs."""
    return _collide(f, g, quad, envelopes, True)


def _collide(f, g, quad, envelopes, both):
    quad = quad or CollisionQuadrature()
    grid = f.grid
    _require_box(grid)
    if g.grid is not grid:
        raise ValidationError("f and g must share a grid")
    fv, gv = f.values, g.values

    mode = quad.interpolation
    if mode == "auto":
        mode = "log" if envelopes is None and (fv > 0).all() and (gv > 0).all() else "envelope"
    if mode == "log" and not ((fv > 0).all() and (gv > 0).all()):
        raise ValidationError("log interpolation needs strictly positive data")
    envs = envelopes or (_envelope_of(f), _envelope_of(g))
    if mode == "envelope" and any(e is None for e in envs):
        raise ValidationError("envelope interpolation needs distributions with physical moments")

    dummy = np.zeros(5)
    if mode == "log":
        fd, gd, Ef, Eg = np.log(fv), np.log(gv), dummy, dummy
    elif mode == "envelope":
        Ef, Eg = _envelope_array(envs[0]), _envelope_array(envs[1])
        fd = fv / _gauss_at(grid.nodes, Ef)
        gd = gv / _gauss_at(grid.nodes, Eg)
    else:
        fd, gd, Ef, Eg = fv, gv, dummy, dummy

    c0, r2max = _pruning(grid, envs, quad.prune_tol)
    d2 = np.einsum("ij,ij->i", grid.nodes - c0, grid.nodes - c0)
    act = np.nonzero(d2 <= r2max)[0] if np.isfinite(r2max) else np.arange(grid.size)
    act_j, wj = _target_nodes(grid, act, quad)
    S, ws = sphere_quadrature(quad.n_mu, quad.n_phi)
    half = quad.n_mu % 2 == 0 and quad.n_phi % 2 == 0
    if half:
        S, ws = S[S[:, 2] > 0], ws[S[:, 2] > 0]
    out, out2 = _kernels.collision_kernel(
        np.ascontiguousarray(fd, dtype=float), np.ascontiguousarray(gd, dtype=float),
        fv, gv, Ef, Eg, _MODES[mode], grid.nodes, act, act_j, wj, d2,
        grid.origin, grid.spacing, grid.n, S, ws, r2max, both, half)
    Q, Q2 = Distribution(out, grid), Distribution(out2, grid)
    defect = conservation_defect(Q, f, g, invariants=1)
    if both:
        defect = np.r_[defect, conservation_defect(Q + Q2, f, g)]
    if defect.max() > quad.conservation_bound:
        warnings.warn(GridTooCoarse(
            f"collision conservation defect {defect.max():.2e} exceeds "
            f"{quad.conservation_bound:.1e} on a {grid.n}^3 box"), stacklevel=3)
    return Q, Q2


def _gauss_at(X: np.ndarray, E: np.ndarray) -> np.ndarray:
    d = X - E[1:4]
    return E[0] * np.exp(-np.einsum("ij,ij->i", d, d) / E[4])


def conservation_defect(Q: Distribution, f: Distribution, g: Distribution,
                        invariants: int = 5) -> np.ndarray:
    """``|sum w phi_i Q| / (||f||_1 ||g||_1)`` for the first ``invariants`` phi_i."""
    phi = collision_invariants(Q.grid)[:invariants]
    scale = f.norm1() * g.norm1()
    return np.abs(phi @ (Q.grid.weights * Q.values)) / scale


def nu_freq(xi, params: MaxwellParams) -> np.ndarray | float:
    """Hard-sphere collision frequency ``pi int M(xi_*) |xi - xi_*| d xi_*``.

    The angular integral of the Gaussian about ``xi`` is done in closed form;
    the remaining radial integral is adaptive.  Accepts one velocity or an
    ``(k, 3)`` array.
    """
    single = np.ndim(xi) == 1
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    a = np.linalg.norm(xi - params.velocity, axis=-1)
    s2 = R_GAS * params.theta
    # int_{S^2} exp(-|a + r w|^2 / 2 s2) dw = 4 pi e^{-(a-r)^2/2s2} (1 - e^{-2ar/s2}) s2 / (2 a r)
    out = np.empty_like(a)
    for k, ak in enumerate(a):
        def radial(r, ak=ak):
            if ak * r < 1e-12:
                ang = 4.0 * np.pi * np.exp(-(ak * ak + r * r) / (2 * s2))
            else:
                ang = (2.0 * np.pi * s2 / (ak * r)) * np.exp(-(ak - r) ** 2 / (2 * s2)) \
                    * -np.expm1(-2.0 * ak * r / s2)
            return r**3 * ang
        lo, hi = max(0.0, ak - 12 * np.sqrt(s2)), ak + 12 * np.sqrt(s2)
        val = 0.0
        if lo > 0:
            val += integrate.quad(radial, 0.0, lo, limit=200)[0]
        val += integrate.quad(radial, lo, hi, points=[ak] if lo < ak < hi else None,
                              limit=200, epsabs=0, epsrel=1e-13)[0]
        out[k] = np.pi * params.peak * val
    return float(out[0]) if single else out
