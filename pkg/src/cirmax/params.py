"""Parameter containers shared by all routes."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DimensionlessArgs:
    """Reduced arguments (lam, b, x, y) of the running-maximum tail I(lam, b, x, y)."""

    lam: float
    b: float
    x: float
    y: float = 0.0

    def __post_init__(self):
        for name in ("lam", "b", "x", "y"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.lam <= 0 or self.b <= 0 or self.x <= 0:
            raise ValueError("lam, b and x must be positive")
        if not 0.0 <= self.y < self.x:
            raise ValueError(f"need 0 <= y < x, got y={self.y}, x={self.x}")


@dataclass(frozen=True)
class CirParams:
    """CIR diffusion dX = (alpha - beta X) dt + sigma sqrt(X) dW started at x0.

    ``t`` is the horizon and ``z`` the level of the running maximum.
    """

    alpha: float
    beta: float
    sigma: float
    x0: float
    t: float
    z: float

    def __post_init__(self):
        for name in ("alpha", "beta", "sigma", "x0", "t", "z"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def scale(self) -> float:
        """2 beta / sigma^2, the factor turning levels into Kummer arguments."""
        return 2.0 * self.beta / self.sigma**2

    def dimensionless(self) -> DimensionlessArgs:
        if self.z <= self.x0:
            raise ValueError(f"need z > x0, got z={self.z}, x0={self.x0}")
        return DimensionlessArgs(
            lam=self.beta * self.t,
            b=2.0 * self.alpha / self.sigma**2,
            x=self.scale * self.z,
            y=self.scale * self.x0,
        )

    def replace(self, **kw) -> "CirParams":
        d = {k: getattr(self, k) for k in ("alpha", "beta", "sigma", "x0", "t", "z")}
        d.update(kw)
        return CirParams(**d)


def marginal_tail_rate(beta: float, sigma: float, t: float) -> float:
    """Exponential decay rate -(beta/sigma^2)(1 + coth(beta t / 2)) of the tail in z."""
    return -(beta / sigma**2) * (1.0 + 1.0 / math.tanh(beta * t / 2.0))
