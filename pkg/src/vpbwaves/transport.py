"""Temperature-dependent transport coefficients.

Only smoothness in ``theta`` is assumed by the analysis; the default is the
hard-sphere scaling ``c * theta**0.5`` for viscosity, heat conductivity and
the charge-diffusion coefficient ``kappa_1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class TransportModel:
    mu0: float = 1.0
    kappa0: float = 1.0
    kappa1_0: float = 1.0
    exponent: float = 0.5

    def __post_init__(self) -> None:
        for name in ("mu0", "kappa0", "kappa1_0"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not np.isfinite(self.exponent):
            raise ValidationError("exponent must be finite")

    def mu(self, theta):
        return self.mu0 * np.asarray(theta, dtype=float) ** self.exponent

    def kappa(self, theta):
        return self.kappa0 * np.asarray(theta, dtype=float) ** self.exponent

    def kappa1(self, theta):
        return self.kappa1_0 * np.asarray(theta, dtype=float) ** self.exponent

    def dkappa(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.exponent * self.kappa0 * theta ** (self.exponent - 1.0)

    def max_diffusivity(self, theta_lo: float, theta_hi: float) -> float:
        """Largest of ``4 mu / 3``, ``kappa``, ``kappa_1`` on ``[theta_lo, theta_hi]``
        (power laws are monotone, so the endpoints suffice)."""
        th = np.array([theta_lo, theta_hi], dtype=float)
        return float(max((4.0 / 3.0 * self.mu(th)).max(), self.kappa(th).max(),
                         self.kappa1(th).max()))
