"""Closed-form large-level asymptotics of the running-maximum tail.

Everything is carried in log space; the ``log=True`` variants return natural
logarithms, which stay finite where the probabilities underflow.

The fixed-y form rests on an unproven monotonicity property of the
quotient |M((u0+iv)x, b, y) / M((u0+iv)x, b, x)| in v (see
:func:`cirmax.positivity.conjecture_scan`).  It is evaluated unconditionally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize, special

from .params import CirParams, DimensionlessArgs

__all__ = [
    "NoRootError",
    "SaddleData",
    "chi",
    "cir_tail_asymp",
    "phi",
    "phi_prime",
    "saddle_data",
    "solve_u_hat",
    "tail_asymp_fixed_y",
    "tail_asymp_small_y",
]


class NoRootError(ValueError):
    """The saddle equation has no positive root in the search bracket."""


def _log_ratio(r: float) -> float:
    # log((r+1)/(r-1)) without cancellation for r near 1
    return math.log1p(2.0 / (r - 1.0))


def phi(u: float, lam: float) -> float:
    """lam*u - (1+r)/2 - u*log((r+1)/(r-1)) with r = sqrt(1+4u)."""
    if not u > 0:
        raise ValueError("phi needs u > 0")
    r = math.sqrt(1.0 + 4.0 * u)
    return lam * u - (1.0 + r) / 2.0 - u * _log_ratio(r)


def phi_prime(u: float, lam: float) -> float:
    """d phi / du = lam - log((r+1)/(r-1))."""
    r = math.sqrt(1.0 + 4.0 * u)
    return lam - _log_ratio(r)


@dataclass(frozen=True)
class SaddleData:
    lam: float
    b: float
    y: float | None
    u0: float
    phi_u0: float
    phi2_u0: float
    root1p4u0: float
    log_C1: float
    log_C2: float | None

    @property
    def C1(self) -> float:
        return math.exp(self.log_C1)

    @property
    def C2(self) -> float:
        if self.log_C2 is None:
            raise ValueError("C2 needs y > 0")
        return math.exp(self.log_C2)


def saddle_data(lam: float, b: float, y: float | None = None, literal: bool = False) -> SaddleData:
    """Saddle point u0 of phi and the constants C1, C2 of the two tail forms.

    By default C2 uses the constant Gamma(b)/(2 sqrt(pi)) in the large-|a|
    approximation of the numerator M(a, b, y), which is what the series
    actually does.  ``literal=True`` keeps Gamma(b)/sqrt(2 pi) instead, making
    C2 larger by sqrt(2).
    """
    if not (lam > 0 and b > 0):
        raise ValueError("need lam > 0 and b > 0")
    h = lam / 2.0
    sh = math.sinh(h)
    u0 = 1.0 / (4.0 * sh * sh)
    coth = 1.0 / math.tanh(h)
    phi0 = -(1.0 + coth) / 2.0
    phi2 = math.tanh(h) / u0
    r0 = coth
    log_core = (
        -b * math.log((r0 - 1.0) / 2.0)
        + 0.25 * math.log(1.0 + 4.0 * u0)
    )
    log_c1 = (
        (b - 1.5) * math.log(u0)
        - special.gammaln(b)
        - 0.5 * math.log(phi2)
        + log_core
    )
    log_c2 = None
    if y is not None:
        if not y > 0:
            raise ValueError("C2 is undefined at y = 0; use the small-y form")
        log_c2 = (
            (b / 2.0 - 1.25) * math.log(u0)
            - 0.5 * math.log(2.0 * math.pi * phi2)
            + log_core
            + y / 2.0
            + (0.25 - b / 2.0) * math.log(y)
            + 0.5 * phi2 * y * u0 * (1.0 + 4.0 * u0)
            - y * r0
        )
        if not literal:
            log_c2 -= 0.5 * math.log(2.0)
    return SaddleData(lam, b, y, u0, phi0, phi2, r0, float(log_c1), log_c2)


def chi(u: float, x: float, lam: float, y: float) -> float:
    """x*phi(u) + 2*sqrt(u*x*y)."""
    if not (u > 0 and x > 0 and y >= 0):
        raise ValueError("need u > 0, x > 0, y >= 0")
    return x * phi(u, lam) + 2.0 * math.sqrt(u * x * y)


def solve_u_hat(lam: float, b: float, x: float, y: float, xtol: float = 1e-14) -> float:
    """Root of lam - log((r+1)/(r-1)) + sqrt(y/(u x)) = 0, the stationary point of chi.

    ``b`` does not enter the equation; it is accepted for a uniform signature.
    """
    if not y > 0:
        raise ValueError("need y > 0 (at y = 0 the root is u0)")
    u0 = saddle_data(lam, b).u0

    def g(u):
        return phi_prime(u, lam) + math.sqrt(y / (u * x))

    lo, hi = u0 / 2.0, 2.0 * u0
    if g(lo) * g(hi) > 0:
        raise NoRootError(f"no sign change of the saddle equation in [{lo:.6g}, {hi:.6g}] at x={x}")
    return optimize.brentq(g, lo, hi, xtol=xtol * u0, rtol=4 * 2.0**-52, maxiter=200)


def tail_asymp_small_y(d: DimensionlessArgs, log: bool = False) -> float:
    """C1 x^(b-1) exp(x phi(u0)), the tail when y(x) shrinks faster than 1/(x log x)."""
    sd = saddle_data(d.lam, d.b)
    w = sd.log_C1 + (d.b - 1.0) * math.log(d.x) + d.x * sd.phi_u0
    return w if log else math.exp(w)


def tail_asymp_fixed_y(d: DimensionlessArgs, log: bool = False, literal: bool = False) -> float:
    """C2 x^(b/2-3/4) exp(x phi(u0) + 2 sqrt(y u0 x)) for fixed y > 0."""
    if not d.y > 0:
        raise ValueError("fixed-y form needs y > 0; use tail_asymp_small_y")
    sd = saddle_data(d.lam, d.b, d.y, literal=literal)
    w = (
        sd.log_C2
        + (d.b / 2.0 - 0.75) * math.log(d.x)
        + d.x * sd.phi_u0
        + 2.0 * math.sqrt(d.y * sd.u0 * d.x)
    )
    return w if log else math.exp(w)


def cir_tail_asymp(p: CirParams, mode: str, log: bool = False, literal: bool = False) -> float:
    """Asymptotic P[max_{s<=t} X_s >= z] written in the CIR parameters.

    ``mode`` is ``"small_y"`` (start level negligible) or ``"fixed_y"``.
    """
    bt = p.beta * p.t
    b = 2.0 * p.alpha / p.sigma**2
    k = p.beta / p.sigma**2
    rate = -k * (1.0 + 1.0 / math.tanh(bt / 2.0))
    if mode == "small_y":
        sd = saddle_data(bt, b)
        w = sd.log_C1 + (b - 1.0) * math.log(2.0 * k * p.z) + rate * p.z
    elif mode == "fixed_y":
        sd = saddle_data(bt, b, 2.0 * k * p.x0, literal=literal)
        e = p.alpha / p.sigma**2 - 0.75
        w = (
            sd.log_C2
            + e * math.log(2.0 * k)
            + e * math.log(p.z)
            + rate * p.z
            + 2.0 * k * math.sqrt(p.x0) / math.sinh(bt / 2.0) * math.sqrt(p.z)
        )
    else:
        raise ValueError(f"mode must be 'small_y' or 'fixed_y', got {mode!r}")
    return w if log else math.exp(w)
