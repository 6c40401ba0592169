"""Velocity grids and the Maxwellian parameter type."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from ..errors import ValidationError

#: Gas constant; with R = 2/3 the internal energy equals the temperature.
R_GAS = 2.0 / 3.0


@dataclass(frozen=True)
class MaxwellParams:
    """Density, bulk velocity and temperature of a local Maxwellian."""

    rho: float
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    theta: float = 1.0

    def __post_init__(self) -> None:
        u = tuple(float(c) for c in np.broadcast_to(np.asarray(self.u, dtype=float), (3,)))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "theta", float(self.theta))
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise ValidationError(f"theta must be positive, got {self.theta}")
        if not all(np.isfinite(u)):
            raise ValidationError("u must be finite")

    @property
    def velocity(self) -> np.ndarray:
        return np.asarray(self.u)

    @property
    def thermal_speed(self) -> float:
        """sqrt(R theta), the standard deviation of each velocity component."""
        return float(np.sqrt(R_GAS * self.theta))

    @property
    def peak(self) -> float:
        return self.rho * (2.0 * np.pi * R_GAS * self.theta) ** -1.5


@dataclass(frozen=True, eq=False)
class VelocityGrid:
    """Quadrature nodes in velocity space.

    ``kind`` is ``"hermite"`` (tensor Gauss-Hermite, exact on polynomial times
    Gaussian integrands of matching centre and width) or ``"box"`` (uniform
    nodes on ``center + [-W, W]^3`` with trapezoid weights, needed wherever
    values between nodes must be interpolated).
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    n: int
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    half_width: float = float("nan")
    spacing: float = float("nan")
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def origin(self) -> np.ndarray:
        """Corner node of a box grid."""
        return np.asarray(self.center) - self.half_width

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def spec(self) -> dict:
        """JSON-ready description from which the grid can be rebuilt."""
        d = {"kind": self.kind, "n": int(self.n), "center": [float(c) for c in self.center]}
        if self.kind == "box":
            d["half_width"] = float(self.half_width)
        else:
            # Hermite nodes are centre + sqrt(R theta) x_k; recover theta from the spread
            x, _ = hermegauss(self.n)
            s = (self.nodes[-1, 2] - self.center[2]) / x[-1]
            d["theta"] = float(s**2 / R_GAS)
        return d


def hermite_grid(params: MaxwellParams | None = None, order: int = 24, *,
                 center=(0.0, 0.0, 0.0), theta: float = 1.0) -> VelocityGrid:
    """Tensor Gauss-Hermite grid adapted to a Maxwellian.

    Nodes are ``u + sqrt(R theta) x_k`` with probabilists' Hermite abscissae;
    weights absorb the Gaussian so that ``sum(w f)`` approximates ``int f``.
    """
    if order < 2:
        raise ValidationError("order must be at least 2")
    if params is not None:
        center, theta = params.u, params.theta
    if theta <= 0:
        raise ValidationError("theta must be positive")
    x, wx = hermegauss(order)
    s = np.sqrt(R_GAS * theta)
    # w e^{x^2/2} in log form, the raw weights underflow near the outer nodes
    logw = np.log(wx) + 0.5 * x**2 + np.log(s)
    X = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3)
    L = np.add.outer(np.add.outer(logw, logw), logw).ravel()
    c = np.asarray(center, dtype=float)
    return VelocityGrid(c + s * X, np.exp(L), "hermite", order, tuple(c))


def box_grid(n: int = 24, half_width: float | None = None, *,
             center=(0.0, 0.0, 0.0), theta: float = 1.0) -> VelocityGrid:
    """Uniform ``n^3`` box; the default half-width is ``8 sqrt(theta)``."""
    if n < 4:
        raise ValidationError("box grids need at least 4 nodes per axis")
    W = 8.0 * np.sqrt(theta) if half_width is None else float(half_width)
    if W <= 0:
        raise ValidationError("half_width must be positive")
    x = np.linspace(-W, W, n)
    h = x[1] - x[0]
    w1 = np.full(n, h)
    w1[[0, -1]] *= 0.5
    c = np.asarray(center, dtype=float)
    X = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3) + c
    w = np.multiply.outer(np.multiply.outer(w1, w1), w1).ravel()
    return VelocityGrid(X, w, "box", n, tuple(c), W, h)
