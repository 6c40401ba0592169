"""Operators linearised about a Maxwellian and their inverse on microscopic data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceFailure, NotMicroscopic, ValidationError
from . import _kernels
from .collision import (CollisionQuadrature, _require_box, collision_pair, collision_Q,
                        sphere_quadrature)
from .grids import R_GAS, MaxwellParams, VelocityGrid
from .maxwell import Distribution, _gauss, chi_basis, maxwellian, project_P1, project_Pc


@dataclass(frozen=True)
class GlobalMaxwellianStar:
    """Reference Maxwellian used to weight energy estimates.

    ``rho_star`` stands in for ``1 / v_star``.  A valid choice for a set of
    local temperatures needs ``theta/2 < theta_star < theta`` for every one of
    them.
    """

    v_star: float
    u_star: float
    theta_star: float

    def __post_init__(self) -> None:
        if self.v_star <= 0 or self.theta_star <= 0:
            raise ValidationError("v_star and theta_star must be positive")

    @property
    def params(self) -> MaxwellParams:
        return MaxwellParams(1.0 / self.v_star, (self.u_star, 0.0, 0.0), self.theta_star)

    def admissible_for(self, thetas) -> bool:
        t = np.asarray(thetas, dtype=float)
        return bool(np.all((t / 2 < self.theta_star) & (self.theta_star < t)))

    @classmethod
    def choose(cls, v, u, theta, fraction: float = 0.9) -> GlobalMaxwellianStar:
        """Star state for the given ranges with ``theta_star = fraction * min(theta)``.

        Any ``fraction`` in ``(max/2min, 1)`` satisfies the temperature window.
        """
        th = np.asarray(theta, dtype=float)
        ts = fraction * th.min()
        if not (th.max() / 2 < ts):
            raise ValidationError("temperature range too wide for a single M_star")
        return cls(float(np.mean(v)), float(np.mean(u)), float(ts))


@dataclass(eq=False)
class LinearizedOperators:
    """Dense matrices of ``L_M`` and ``N_M`` restricted to the active nodes.

    ``L_raw`` and ``N_raw`` are the quadrature of the collision integrals.
    ``L = P1 L_raw P1`` and ``N = Pc N_raw Pc`` restore the exact null spaces
    and ranges of the continuous operators, which quadrature only keeps up to
    its conservation defect.
    """

    params: MaxwellParams
    grid: VelocityGrid
    active: np.ndarray
    L: np.ndarray
    N: np.ndarray
    nu: np.ndarray
    L_raw: np.ndarray
    N_raw: np.ndarray

    def _restrict(self, g: Distribution) -> np.ndarray:
        if g.grid is not self.grid:
            raise ValidationError("distribution lives on a different grid")
        return g.values[self.active]

    def _extend(self, y: np.ndarray) -> Distribution:
        out = np.zeros(self.grid.size)
        out[self.active] = y
        return Distribution(out, self.grid)

    def apply_L(self, g: Distribution) -> Distribution:
        return self._extend(self.L @ self._restrict(g))

    def apply_N(self, h: Distribution) -> Distribution:
        return self._extend(self.N @ self._restrict(h))

    def quadratic_form(self, g: Distribution, which: str = "L",
                       reference: MaxwellParams | None = None) -> tuple[float, float]:
        """``(<g, A g>_ref, <g, g>_ref)`` with the weight ``1 / M_ref``."""
        A = self.L if which == "L" else self.N
        ref = _gauss(self.grid.nodes[self.active], reference or self.params)
        y = self._restrict(g)
        wr = self.grid.weights[self.active] / ref
        return float(np.sum(wr * y * (A @ y))), float(np.sum(wr * y * y))


#: Linearised operators only keep nodes where M exceeds this fraction of its
#: peak; further out the envelope ratios amplify interpolation error.
LINEAR_QUAD = CollisionQuadrature(interpolation="envelope", prune_tol=1e-6,
                                  conservation_bound=np.inf)

_CACHE: dict = {}


def _active_set(grid: VelocityGrid, params: MaxwellParams, tol: float):
    d2 = np.einsum("ij,ij->i", grid.nodes - params.velocity, grid.nodes - params.velocity)
    r2max = 2.0 * R_GAS * params.theta * np.log(1.0 / tol)
    # one extra stencil width so interpolation never reaches inactive nodes
    r_act = np.sqrt(r2max) + 2.0 * np.sqrt(3.0) * grid.spacing
    return d2, r2max, np.nonzero(d2 <= r_act**2)[0]


def _discrete_projectors(grid, params, act):
    """``P1`` and ``Pc`` as matrices on the active nodes, orthogonal in ``sum w g h / M``."""
    s = np.sqrt(grid.weights[act] / _gauss(grid.nodes[act], params))
    chis = np.vstack([c.values[act] for c in chi_basis(params, grid)]) * s
    Qm, _ = np.linalg.qr(chis.T)
    q0 = chis[0] / np.linalg.norm(chis[0])
    P1 = -(Qm @ Qm.T)
    P1[np.diag_indices_from(P1)] += 1.0
    Pc = -np.outer(q0, q0)
    Pc[np.diag_indices_from(Pc)] += 1.0
    # back from y = s g to nodal values
    return P1 * (s[None, :] / s[:, None]), Pc * (s[None, :] / s[:, None])


def assemble_linearized(params: MaxwellParams, grid: VelocityGrid,
                        quad: CollisionQuadrature | None = None) -> LinearizedOperators:
    """Assemble ``L_M`` and ``N_M`` as dense matrices (cached per grid and state)."""
    _require_box(grid)
    quad = quad or LINEAR_QUAD
    key = (id(grid), params, quad.n_mu, quad.n_phi, quad.prune_tol)
    hit = _CACHE.get(key)
    if hit is not None and hit.grid is grid:
        return hit
    d2, r2max, act = _active_set(grid, params, quad.prune_tol)
    loc = np.full(grid.size, -1, dtype=np.int64)
    loc[act] = np.arange(act.size)
    M = _gauss(grid.nodes, params)
    with np.errstate(over="ignore", divide="ignore"):
        minv = np.where(loc >= 0, 1.0 / M, 0.0)
    S, ws = sphere_quadrature(quad.n_mu, quad.n_phi)
    Ap, Aq, B, nu = _kernels.linearized_kernel(
        grid.nodes, grid.weights, act, loc, M, minv, d2, grid.origin, grid.spacing,
        grid.n, S, ws, r2max)
    N_raw = Ap - np.diag(nu)
    L_raw = N_raw + Aq - B
    del Ap, Aq, B
    P1, Pc = _discrete_projectors(grid, params, act)
    ops = LinearizedOperators(params, grid, act, P1 @ L_raw @ P1, Pc @ N_raw @ Pc, nu,
                              L_raw, N_raw)
    if len(_CACHE) > 8:
        _CACHE.clear()
    _CACHE[key] = ops
    return ops


def linearized_LM(g: Distribution, params: MaxwellParams,
                  quad: CollisionQuadrature | None = None) -> Distribution:
    """``L_M g = 2Q(M, g) + 2Q(g, M)``, projected onto the microscopic space.

    Evaluated through the collision quadrature with envelope interpolation
    about ``M`` so the result is linear in ``g``.  The final ``P1`` removes the
    macroscopic part that quadrature error would otherwise leave behind.
    """
    quad = _linear_quad(quad)
    M = maxwellian(params, g.grid)
    a, b = collision_pair(M, g, quad, envelopes=(params, params))
    return project_P1(2.0 * (a + b), params)


def linearized_NM(h: Distribution, params: MaxwellParams,
                  quad: CollisionQuadrature | None = None) -> Distribution:
    """``N_M h = 2Q(h, M)``, with its mass removed along ``M``."""
    quad = _linear_quad(quad)
    M = maxwellian(params, h.grid)
    return project_Pc(2.0 * collision_Q(h, M, quad, envelopes=(params, params)), params)


def _linear_quad(quad):
    q = quad or LINEAR_QUAD
    return CollisionQuadrature(q.n_mu, q.n_phi, "envelope", q.prune_tol, q.subsample,
                               q.seed, np.inf)


@dataclass(frozen=True)
class InverseResult:
    g: Distribution
    residual: float
    iterations: int
    bound_constant: float


def _micro_basis(ops: LinearizedOperators) -> tuple[np.ndarray, np.ndarray]:
    """Scaling ``s = sqrt(w / M)`` and an orthonormal basis of the macro space."""
    act = ops.active
    s = np.sqrt(ops.grid.weights[act] / _gauss(ops.grid.nodes[act], ops.params))
    chis = np.vstack([c.values[act] for c in chi_basis(ops.params, ops.grid)])
    Qm, _ = np.linalg.qr((chis * s).T)
    return s, Qm


def invert_LM_on_microspace(h: Distribution, params: MaxwellParams, tol: float = 1e-8,
                            quad: CollisionQuadrature | None = None) -> Distribution:
    """``g`` with ``L_M g = h`` and ``P0 g = 0``; see :func:`solve_LM_on_microspace`."""
    return solve_LM_on_microspace(h, params, tol, quad).g


def solve_LM_on_microspace(h: Distribution, params: MaxwellParams, tol: float = 1e-8,
                           quad: CollisionQuadrature | None = None,
                           max_iter: int = 2000) -> InverseResult:
    """Solve ``L_M g = h`` with ``P0 g = 0`` by CG on the normal equations.

    Works in the scaled coordinates ``y = sqrt(w/M) g`` where the macroscopic
    projector is orthogonal; every iterate is projected back onto the
    microscopic subspace.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    ops = assemble_linearized(params, h.grid, quad)
    s, Qm = _micro_basis(ops)

    def P(y):
        return y - Qm @ (Qm.T @ y)

    b = s * ops._restrict(h)
    bn = np.linalg.norm(b)
    macro = np.linalg.norm(Qm.T @ b)
    # the box truncates Gaussian tails at ~1e-10, so that is the floor
    if macro > max(tol, 1e-9) * bn:
        raise NotMicroscopic(f"right-hand side has macroscopic part {macro / bn:.2e} (relative)")
    if bn == 0.0:
        return InverseResult(Distribution(np.zeros(h.grid.size), h.grid), 0.0, 0, 0.0)

    A = (s[:, None] * ops.L) / s[None, :]
    b = P(b)
    y = np.zeros_like(b)
    r = b.copy()
    z = P(A.T @ r)
    p = z.copy()
    zz = z @ z
    it = 0
    res = 1.0
    while it < max_iter:
        Ap = A @ p
        alpha = zz / (Ap @ Ap)
        y += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / bn
        it += 1
        if res <= tol:
            break
        z = P(A.T @ r)
        zz_new = z @ z
        p = z + (zz_new / zz) * p
        zz = zz_new
    if res > tol:
        raise ConvergenceFailure("normal-equation CG did not converge", res, it)
    g = ops._extend(y / s)
    # <nu g, g> <= C <nu^{-1} h, h>, both in the M-weighted product
    yg, yh = y, P(s * ops._restrict(h))
    C = float(np.sum(ops.nu * yg * yg) / np.sum(yh * yh / ops.nu))
    return InverseResult(g, res, it, C)


def gbar(params: MaxwellParams, theta_bar_x: float, u1_bar_x: float, grid: VelocityGrid,
         tol: float = 1e-10, quad: CollisionQuadrature | None = None) -> Distribution:
    """Microscopic correction driven by temperature and velocity gradients.

    ``(3 / (2 v theta)) L_M^{-1} P1[xi_1 (|xi - u|^2 theta_x / (2 theta) + xi_1 u1_x) M]``
    with ``v = 1 / rho``.
    """
    if theta_bar_x == 0 and u1_bar_x == 0:
        return Distribution(np.zeros(grid.size), grid)
    X = grid.nodes
    c = X - params.velocity
    M = _gauss(X, params)
    src = X[:, 0] * (np.einsum("ij,ij->i", c, c) / (2 * params.theta) * theta_bar_x
                     + X[:, 0] * u1_bar_x) * M
    rhs = project_P1(Distribution(src, grid), params)
    g = invert_LM_on_microspace(rhs, params, tol, quad)
    v = 1.0 / params.rho
    return g * (3.0 / (2.0 * v * params.theta))
