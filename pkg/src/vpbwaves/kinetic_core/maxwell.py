"""Distributions, moments, the chi-basis and the macro/micro projections."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonphysicalMoments, ValidationError
from .grids import R_GAS, MaxwellParams, VelocityGrid


@dataclass(eq=False)
class Distribution:
    """Nodal values of a velocity density on a grid."""

    values: np.ndarray
    grid: VelocityGrid

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValidationError(
                f"expected {self.grid.size} nodal values, got shape {self.values.shape}")

    def _other(self, other) -> np.ndarray | float:
        if isinstance(other, Distribution):
            if other.grid is not self.grid:
                raise ValidationError("distributions live on different grids")
            return other.values
        return other

    def __add__(self, other) -> Distribution:
        return Distribution(self.values + self._other(other), self.grid)

    def __sub__(self, other) -> Distribution:
        return Distribution(self.values - self._other(other), self.grid)

    def __mul__(self, a) -> Distribution:
        return Distribution(self.values * self._other(a), self.grid)

    __rmul__ = __mul__
    __radd__ = __add__

    def __neg__(self) -> Distribution:
        return Distribution(-self.values, self.grid)

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def norm1(self) -> float:
        return self.grid.integrate(np.abs(self.values))

    def to_csv(self, path=None) -> str:
        """Rows ``index,xi1,xi2,xi3,value`` (header, LF line endings, ``repr`` floats)."""
        lines = ["index,xi1,xi2,xi3,value"]
        for k, (node, val) in enumerate(zip(self.grid.nodes, self.values)):
            lines.append(",".join([str(k)] + [repr(float(c)) for c in node] + [repr(float(val))]))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_binary(self, path) -> None:
        """Little-endian float64 nodal values, in grid order, with no header."""
        self.values.astype("<f8").tofile(path)

    @classmethod
    def from_binary(cls, path, grid: VelocityGrid) -> Distribution:
        return cls(np.fromfile(path, dtype="<f8"), grid)


@dataclass(frozen=True)
class Moments:
    """Mass, momentum and total energy ``int |xi|^2/2 F``."""

    rho: float
    momentum: np.ndarray
    energy: float

    @property
    def u(self) -> np.ndarray:
        return self.momentum / self.rho

    @property
    def theta(self) -> float:
        # E = rho (e + |u|^2/2) with e = theta
        return self.energy / self.rho - 0.5 * float(np.dot(self.u, self.u))

    def params(self) -> MaxwellParams:
        if not self.rho > 0:
            raise NonphysicalMoments(f"non-positive density {self.rho:.6g}")
        th = self.theta
        if not th > 0:
            raise NonphysicalMoments(f"non-positive temperature {th:.6g}")
        return MaxwellParams(self.rho, tuple(self.u), th)


def _gauss(X: np.ndarray, p: MaxwellParams) -> np.ndarray:
    d = X - p.velocity
    return p.peak * np.exp(-np.einsum("ij,ij->i", d, d) / (2.0 * R_GAS * p.theta))


def maxwellian(params: MaxwellParams, grid: VelocityGrid) -> Distribution:
    return Distribution(_gauss(grid.nodes, params), grid)


def collision_invariants(grid: VelocityGrid) -> np.ndarray:
    """Rows 1, xi_1, xi_2, xi_3, |xi|^2/2 evaluated on the nodes."""
    X = grid.nodes
    return np.vstack([np.ones(grid.size), X.T, 0.5 * np.einsum("ij,ij->i", X, X)])


def moments(F: Distribution) -> Moments:
    m = collision_invariants(F.grid) @ (F.grid.weights * F.values)
    return Moments(float(m[0]), m[1:4].copy(), float(m[4]))


def inner_product(g1: Distribution, g2: Distribution, reference: Distribution) -> float:
    """Weighted product ``int g1 g2 / M`` for a strictly positive reference."""
    ref = reference.values
    if np.any(ref <= 0):
        raise ValidationError("reference distribution must be strictly positive")
    return float(np.sum(g1.grid.weights * (g1.values * g2.values) / ref))


def chi_basis(params: MaxwellParams, grid: VelocityGrid) -> list[Distribution]:
    """Five orthonormal directions spanning the macroscopic subspace of ``M``."""
    M = _gauss(grid.nodes, params)
    c = (grid.nodes - params.velocity) / params.thermal_speed
    rho = params.rho
    chis = [M / np.sqrt(rho)]
    chis += [c[:, i] * M / np.sqrt(rho) for i in range(3)]
    chis.append((np.einsum("ij,ij->i", c, c) - 3.0) * M / np.sqrt(6.0 * rho))
    return [Distribution(v, grid) for v in chis]


def _p0_values(g: np.ndarray, params: MaxwellParams, grid: VelocityGrid) -> np.ndarray:
    chis = np.vstack([c.values for c in chi_basis(params, grid)])
    wm = grid.weights / _gauss(grid.nodes, params)
    # discrete Gram matrix: identity on matched Hermite grids, and using it
    # keeps the projector exact when the quadrature is not
    gram = (chis * wm) @ chis.T
    coef = np.linalg.solve(gram, chis @ (wm * g))
    return coef @ chis


def project_P0(g: Distribution, params: MaxwellParams) -> Distribution:
    return Distribution(_p0_values(g.values, params, g.grid), g.grid)


def project_P1(g: Distribution, params: MaxwellParams) -> Distribution:
    return Distribution(g.values - _p0_values(g.values, params, g.grid), g.grid)


def project_Pc(g: Distribution, params: MaxwellParams) -> Distribution:
    """Remove the mass of ``g`` along ``M``."""
    M = _gauss(g.grid.nodes, params)
    return Distribution(g.values - (g.integral() / params.rho) * M, g.grid)


def fit_maxwellian(F: Distribution, iterations: int = 8) -> MaxwellParams:
    """Maxwellian whose quadrature moments match those of ``F``.

    Starts from the continuous formulas and applies Newton corrections so the
    match holds for the grid's own quadrature, not just in the limit.
    """
    target = moments(F)
    p = target.params()
    phi = collision_invariants(F.grid)
    w = F.grid.weights
    want = np.r_[target.rho, target.momentum, target.energy]
    for _ in range(iterations):
        M = _gauss(F.grid.nodes, p)
        r = want - phi @ (w * M)
        if np.max(np.abs(r)) <= 1e-15 * abs(want[0]):
            break
        # dM/d(log rho, u, theta)
        c = F.grid.nodes - p.velocity
        cc = np.einsum("ij,ij->i", c, c)
        dirs = np.vstack([M, (c / (R_GAS * p.theta)).T * M,
                          (cc / (2 * R_GAS * p.theta**2) - 1.5 / p.theta) * M])
        J = (phi * w) @ dirs.T
        d = np.linalg.solve(J, r)
        p = MaxwellParams(p.rho * np.exp(d[0]), tuple(p.velocity + d[1:4]), p.theta + d[4])
    return p


def micro_macro_split(F: Distribution) -> tuple[MaxwellParams, Distribution]:
    """``F = M + G`` with ``M`` the Maxwellian sharing the moments of ``F``."""
    p = fit_maxwellian(F)
    return p, Distribution(F.values - _gauss(F.grid.nodes, p), F.grid)
