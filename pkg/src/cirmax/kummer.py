"""Kummer's confluent hypergeometric function M(a, b, x) with complex first parameter.

Two summation engines are used:

* :func:`float_series` sums many first parameters at once in numpy with
  Neumaier compensation and power-of-two rescaling (no overflow for large x).
  It also reports a relative error estimate, so callers can tell when
  cancellation has eaten the working precision.
* :func:`fixed_series` sums a single series on big integers scaled by 2**p,
  where p is sized from the peak term.  This is the extended-precision path;
  it is exact apart from one floor per multiplication.

The scalar public functions (:func:`kummer_m`, :func:`kummer_m_log`,
:func:`kummer_m_da`) always go through the fixed-point path with a precision
that adapts until the requested relative tolerance is met.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple

import mpmath
import numpy as np
from mpmath.libmp import MPZ
from scipy import special

__all__ = [
    "KummerArgs",
    "KummerConvergenceError",
    "LogComplex",
    "SaddlePhase",
    "digamma_diff",
    "float_series",
    "harmonic",
    "kummer_asymp_prop_a",
    "kummer_bessel_regime",
    "kummer_log_batch",
    "kummer_m",
    "kummer_m_da",
    "kummer_m_log",
    "kummer_m_mp",
    "pfq_2f2",
    "saddle_phase",
]

_LN2 = math.log(2.0)
_EPS = 2.0**-52
_RESCALE_BITS = 600
_MAX_BITS = 60000

#: |a| * y above which :func:`kummer_bessel_regime` picks the exponential form.
BESSEL_THRESHOLD = 100.0


class KummerConvergenceError(ArithmeticError):
    """The series did not reach its decaying regime within the term budget."""


@dataclass(frozen=True)
class LogComplex:
    """Nonzero complex number stored as ``exp(log_magnitude + 1j*phase)``."""

    log_magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        p = math.remainder(float(self.phase), 2.0 * math.pi)
        if p <= -math.pi:
            p += 2.0 * math.pi
        object.__setattr__(self, "phase", p)
        object.__setattr__(self, "log_magnitude", float(self.log_magnitude))

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            raise ValueError("LogComplex cannot represent zero")
        return cls(math.log(abs(z)), cmath.phase(z))

    @classmethod
    def from_log(cls, w: complex) -> "LogComplex":
        return cls(w.real, w.imag)

    @property
    def log(self) -> complex:
        return complex(self.log_magnitude, self.phase)

    def to_complex(self) -> complex:
        if self.log_magnitude > 709.0:
            raise OverflowError(f"|value| = exp({self.log_magnitude:.6g}) overflows a float")
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_magnitude, -self.phase)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_magnitude - other.log_magnitude, self.phase - other.phase)


@dataclass(frozen=True)
class KummerArgs:
    """Arguments of M(a, b, x).  ``x`` may be negative (Kummer transformation)."""

    a: complex
    b: float
    x: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b!r}")
        if not (cmath.isfinite(complex(self.a)) and math.isfinite(self.x)):
            raise ValueError("a and x must be finite")


@dataclass(frozen=True)
class SaddlePhase:
    """Saddle point of the contour integral for M(ux, b, x), large x."""

    t0: complex
    psi_t0: complex
    u: complex


# ---------------------------------------------------------------------------
# float engine


class FloatSeries(NamedTuple):
    log_m: np.ndarray  # complex log of M
    err_m: np.ndarray  # relative error estimate of M
    log_d: np.ndarray | None  # complex log of dM/da
    err_d: np.ndarray | None
    n_terms: int


def _n_safe(abs_a, abs_x):
    # beyond this index every term ratio is below 1/2
    return np.ceil(abs_x + np.sqrt(abs_x * abs_x + 2.0 * abs_a * abs_x)) + 1.0


def _budget(abs_a, abs_x):
    return 10.0 * (abs_a + abs_x + 50.0)


def _neumaier(s, c, t):
    tot = s + t
    c += np.where(np.abs(s) >= np.abs(t), (s - tot) + t, (t - tot) + s)
    return tot, c


def float_series(a, b: float, x: float, deriv: bool = False, budget: float | None = None) -> FloatSeries:
    """Sum M(a, b, x) (and optionally dM/da) in double precision for an array of ``a``.

    Results are returned as complex logarithms so that values far beyond the
    float range are representable.  ``err_m`` is a running-error estimate of
    the relative error; it is large when terms cancel.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    m = a.size
    abs_a = np.abs(a)
    ax = abs(float(x))
    if ax == 0.0:
        zero = np.zeros(m)
        d = np.full(m, -np.inf + 0j) if deriv else None
        return FloatSeries(np.zeros(m, complex), zero, d, zero.copy() if deriv else None, 0)
    n_safe = _n_safe(abs_a, ax)
    limit = _budget(abs_a, ax) if budget is None else np.full(m, float(budget))

    t = np.ones(m, complex)
    sr, si = np.ones(m), np.zeros(m)
    cr, ci = np.zeros(m), np.zeros(m)
    wsum = np.ones(m)
    asum = np.ones(m)
    if deriv:
        td = np.zeros(m, complex)
        dr, di = np.zeros(m), np.zeros(m)
        dcr, dci = np.zeros(m), np.zeros(m)
        dwsum = np.zeros(m)
        dasum = np.zeros(m)
    shift = np.zeros(m)
    active = np.ones(m, bool)
    scale = 2.0**-_RESCALE_BITS
    n = 0
    while active.any():
        if np.any(active & (n > limit)):
            raise KummerConvergenceError(
                f"series not converged after {n} terms (b={b}, x={x})"
            )
        an = a + n
        f = x / ((b + n) * (n + 1.0))
        if deriv:
            td = (td * an + t) * f
        t = t * an * f
        n += 1
        sr, cr = _neumaier(sr, cr, t.real)
        si, ci = _neumaier(si, ci, t.imag)
        at = np.abs(t)
        asum += at
        wsum += at * (1.0 + math.sqrt(n))
        big = (at > 2.0**_RESCALE_BITS) | (np.hypot(sr, si) > 2.0**_RESCALE_BITS)
        if deriv:
            sd = np.abs(td)
            dr, dcr = _neumaier(dr, dcr, td.real)
            di, dci = _neumaier(di, dci, td.imag)
            dasum += sd
            dwsum += sd * (1.0 + math.sqrt(n))
            big |= (sd > 2.0**_RESCALE_BITS) | (np.hypot(dr, di) > 2.0**_RESCALE_BITS)
        if big.any():
            k = np.where(big, scale, 1.0)
            t = t * k
            at = at * k
            sr, si, cr, ci = sr * k, si * k, cr * k, ci * k
            wsum, asum = wsum * k, asum * k
            if deriv:
                td = td * k
                sd = sd * k
                dr, di, dcr, dci = dr * k, di * k, dcr * k, dci * k
                dwsum, dasum = dwsum * k, dasum * k
            shift = shift + np.where(big, _RESCALE_BITS, 0)
        done = (n >= n_safe) & (at <= 2.0**-56 * asum)
        if deriv:
            done &= sd <= 2.0**-56 * np.maximum(dasum, 1e-300)
        active &= ~done

    def finish(r, i, c_r, c_i, w):
        v = (r + c_r) + 1j * (i + c_i)
        mag = np.abs(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            logv = np.log(v) + shift * _LN2
            err = np.where(mag > 0, 2.0 * _EPS * w / mag, np.inf)
        return logv, err

    log_m, err_m = finish(sr, si, cr, ci, wsum)
    if deriv:
        log_d, err_d = finish(dr, di, dcr, dci, dwsum)
        return FloatSeries(log_m, err_m, log_d, err_d, n)
    return FloatSeries(log_m, err_m, None, None, n)


# ---------------------------------------------------------------------------
# fixed-point engine


def _to_fixed(v, p: int) -> int:
    """Round a real number (int, float, Fraction or mpf) to an integer times 2**-p."""
    if isinstance(v, mpmath.mpf):
        sign, man, exp, _ = v._mpf_
        if sign:
            man = -man
        sh = exp + p
        return MPZ(man << sh) if sh >= 0 else MPZ(man >> -sh)
    if isinstance(v, (int, np.integer)):
        return MPZ(int(v) << p)
    q = v if isinstance(v, Rational) else Fraction(float(v))
    return MPZ((int(q.numerator) << p) // int(q.denominator))


def _split(a):
    if isinstance(a, mpmath.mpc):
        return a.real, a.imag
    if isinstance(a, (mpmath.mpf, Rational, int)):
        return a, 0
    z = complex(a)
    return z.real, z.imag


def _peak_log2(a: complex, b: float, x: float) -> tuple[float, int]:
    """log2 of the largest term bound (factors floored at 1) and the index reached."""
    ax = abs(x)
    if ax == 0.0:
        return 0.0, 0
    lx = math.log(ax)
    n_safe = float(_n_safe(abs(a), ax))
    acc = peak = 0.0
    n = 0
    while True:
        acc += math.log(max(abs(a + n), 1.0)) + lx - math.log(b + n) - math.log(n + 1.0)
        n += 1
        if acc > peak:
            peak = acc
        if n >= n_safe and acc < peak - 40.0:
            return peak / _LN2, n


class FixedSeries(NamedTuple):
    m: tuple[int, int]
    d: tuple[int, int] | None
    p: int  # scale: value = int * 2**-p
    err_log2: float  # log2 of the absolute error bound
    n_terms: int


def fixed_series(a, b, x, p: int, deriv: bool = False, budget: float | None = None) -> FixedSeries:
    """Sum the Kummer series on integers scaled by ``2**p``.

    ``a`` may be complex, mpmath or rational; ``b`` and ``x`` real.  Every
    product is floored once, so the absolute error is about
    ``n_terms * 2**(peak - p)`` where ``peak`` bounds the terms.
    """
    ar, ai = _split(a)
    af = complex(float(ar), float(ai))
    bf, xf = float(b), float(x)
    if xf == 0.0:
        return FixedSeries((MPZ(1) << p, MPZ(0)), (MPZ(0), MPZ(0)) if deriv else None, p, -p, 0)
    one = MPZ(1) << p
    q = p + 64  # extra bits on the reciprocal factors
    Ar, Ai = _to_fixed(ar, p), _to_fixed(ai, p)
    B = _to_fixed(b, p)
    Xq = _to_fixed(x, p) << q
    n_safe = float(_n_safe(abs(af), abs(xf)))
    limit = _budget(abs(af), abs(xf)) if budget is None else float(budget)

    tr, ti = one, MPZ(0)
    sr, si = one, MPZ(0)
    dr = di = sdr = sdi = MPZ(0)
    peak = 0
    n = 0
    while True:
        if n > limit:
            raise KummerConvergenceError(f"series not converged after {n} terms (a={af}, b={bf}, x={xf})")
        anr = Ar + n * one
        F = Xq // ((B + n * one) * (n + 1))  # x/((b+n)(n+1)) * 2**q
        if deriv:
            ur = ((dr * anr - di * Ai) >> p) + tr
            ui = ((dr * Ai + di * anr) >> p) + ti
            dr, di = (ur * F) >> q, (ui * F) >> q
            sdr += dr
            sdi += di
        ur = (tr * anr - ti * Ai) >> p
        ui = (tr * Ai + ti * anr) >> p
        tr, ti = (ur * F) >> q, (ui * F) >> q
        sr += tr
        si += ti
        n += 1
        mag = max(abs(tr), abs(ti))
        if deriv:
            mag = max(mag, abs(dr), abs(di))
        bl = mag.bit_length()
        if bl > peak:
            peak = bl
        if n >= n_safe and mag <= 4:
            break
    err_log2 = math.log2(n + 2.0) + 3.0 - p
    return FixedSeries((sr, si), (sdr, sdi) if deriv else None, p, err_log2, n)


def _int_log2(pair: tuple[int, int], p: int) -> float:
    re, im = pair
    mag = max(abs(re), abs(im))
    if mag == 0:
        return -math.inf
    return mag.bit_length() - p


def _pair_to_log(pair: tuple[int, int], p: int) -> complex:
    re, im = pair
    mag = max(abs(re), abs(im))
    if mag == 0:
        return complex(-math.inf, 0.0)
    sh = max(mag.bit_length() - 60, 0)
    r = float(int(re >> sh)) if re >= 0 else -float(int((-re) >> sh))
    i = float(int(im >> sh)) if im >= 0 else -float(int((-im) >> sh))
    return cmath.log(complex(r, i)) + (sh - p) * _LN2


def _fixed_eval(a, b, x, rel_tol: float | None = None, deriv: bool = False, budget: float | None = None,
                bits: int | None = None, check: str = "all", p_start: int | None = None,
                p_max: int = _MAX_BITS, strict: bool = True) -> FixedSeries:
    """Fixed-point evaluation with precision raised until the target is met.

    The target is ``bits`` correct bits (or ``rel_tol``) in the outputs named
    by ``check`` (``"m"``, ``"d"`` or ``"all"``).  With ``strict=False`` the
    best result at ``p_max`` is returned instead of raising.
    """
    af = complex(*(float(v) for v in _split(a)))
    if bits is None:
        bits = max(math.ceil(-math.log2(rel_tol)), 1)
    want = bits + 4
    if p_start is None:
        peak, n_est = _peak_log2(af, float(b), float(x))
        p = int(want + peak + math.log2(n_est + 2) + 16)
    else:
        p = int(p_start)
    while True:
        res = fixed_series(a, b, x, p, deriv=deriv, budget=budget)
        mags = []
        if check in ("m", "all"):
            mags.append(_int_log2(res.m, p))
        if deriv and check in ("d", "all"):
            mags.append(_int_log2(res.d, p))
        deficit = max(want - (mg - res.err_log2) for mg in mags)
        if deficit <= 0:
            return res
        if not math.isfinite(deficit):
            deficit = p
        p = int(p + deficit + 16)
        if p > p_max:
            if not strict:
                return res
            raise KummerConvergenceError(
                f"cancellation too severe to reach {bits} bits (a={af}, b={b}, x={x})"
            )


def _check(a, b, x, tol):
    KummerArgs(complex(a), float(b), float(x))
    if not 0.0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol!r}")


def _pair_to_complex(pair, p) -> complex:
    re, im = pair
    mag = max(abs(re), abs(im))
    if mag.bit_length() - p > 1023:
        raise OverflowError("value overflows a float; use kummer_m_log")
    return complex(mpmath.mpf((re, -p)), mpmath.mpf((im, -p)))


def _terminating(a) -> int | None:
    """Degree of the polynomial M(a, b, .) when ``a`` is a modest nonpositive integer."""
    ac = complex(a)
    if ac.imag == 0.0 and ac.real <= 0.0 and ac.real == int(ac.real) and ac.real >= -5000:
        return -int(ac.real)
    return None


def _polynomial(deg: int, b, x) -> Fraction:
    # exact: floats are dyadic rationals
    bq, xq = Fraction(b), Fraction(x)
    t = s = Fraction(1)
    for n in range(deg):
        t = t * (n - deg) * xq / ((bq + n) * (n + 1))
        s += t
    return s


def _log_fraction(v: Fraction) -> float:
    # math.log accepts big ints, so this never overflows
    return math.log(v.numerator) - math.log(v.denominator)


def kummer_m(a: complex, b: float, x: float, tol: float = 1e-13, budget: float | None = None) -> complex:
    """M(a, b, x) = sum_n (a)_n x^n / ((b)_n n!) to relative accuracy ``tol``.

    Raises :class:`KummerConvergenceError` if the term budget (default
    ``10*(|a| + |x| + 50)``) is exhausted, and ``OverflowError`` when the
    value exceeds the float range (use :func:`kummer_m_log` there).
    For a nonpositive integer ``a`` the terminating sum is done in exact
    rationals, so polynomial zeros come back as 0.
    """
    _check(a, b, x, tol)
    deg = _terminating(a)
    if deg is not None:
        return complex(float(_polynomial(deg, b, x)), 0.0)
    res = _fixed_eval(a, b, x, tol, budget=budget)
    return _pair_to_complex(res.m, res.p)


def kummer_m_log(a: complex, b: float, x: float, tol: float = 1e-13, budget: float | None = None) -> LogComplex:
    """Same as :func:`kummer_m` in overflow-safe :class:`LogComplex` form."""
    _check(a, b, x, tol)
    deg = _terminating(a)
    if deg is not None:
        v = _polynomial(deg, b, x)
        if v == 0:
            raise ValueError("M(a, b, x) vanishes exactly")
        return LogComplex(_log_fraction(abs(v)), 0.0 if v > 0 else math.pi)
    res = _fixed_eval(a, b, x, tol, budget=budget)
    w = _pair_to_log(res.m, res.p)
    if w.real == -math.inf:
        raise ValueError("M(a, b, x) vanishes to working precision")
    return LogComplex.from_log(w)


def kummer_m_da(a: complex, b: float, x: float, tol: float = 1e-13, budget: float | None = None) -> complex:
    """Derivative of M(a, b, x) with respect to ``a``.

    Uses the pole-free product-rule recurrence for d/da (a)_n, which sums the
    same series as sum_r (a)_r x^r/((b)_r r!) * sum_{m<=r} 1/(m-1+a) but stays
    finite when ``a`` is a nonpositive integer.
    """
    _check(a, b, x, tol)
    res = _fixed_eval(a, b, x, min(tol, 1e-10), deriv=True, budget=budget, check="d")
    return _pair_to_complex(res.d, res.p)


def kummer_m_mp(a, b, x, bits: int = 160, deriv: bool = False, check: str = "all",
                p_start: int | None = None, strict: bool = True, return_p: bool = False,
                return_err: bool = False):
    """M(a, b, x) (and dM/da) as mpmath numbers for real or complex mpmath ``a``.

    Precision adapts until the outputs named by ``check`` carry ``bits``
    correct bits.  Near an a-zero M itself cannot be resolved relatively, so
    root finders use ``check="d"``.  ``return_p`` also returns the final
    scale, which can seed ``p_start`` on the next nearby call; ``return_err``
    appends an absolute error bound shared by both outputs.
    """
    res = _fixed_eval(a, b, x, deriv=deriv, bits=bits, check=check, p_start=p_start,
                      strict=strict, p_max=max(_MAX_BITS, 8 * bits))
    p = res.p
    cplx = isinstance(a, mpmath.mpc) or (
        not isinstance(a, (mpmath.mpf, int, Rational)) and complex(a).imag != 0
    )

    def conv(pair):
        re, im = pair
        r = mpmath.mpf((re, -p))
        return mpmath.mpc(r, mpmath.mpf((im, -p))) if cplx else r

    out = (conv(res.m), conv(res.d)) if deriv else conv(res.m)
    extra = ()
    if return_p:
        extra += (p,)
    if return_err:
        extra += (mpmath.mpf(2) ** math.ceil(res.err_log2),)
    return (out, *extra) if extra else out


def kummer_log_batch(a, b: float, x: float, rel_tol: float = 1e-12) -> np.ndarray:
    """Complex log M(a_j, b, x) for an array of first parameters.

    Entries whose float evaluation misses ``rel_tol`` are recomputed on the
    fixed-point path.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    fs = float_series(a, b, x)
    out = fs.log_m.copy()
    for j in np.flatnonzero(~(fs.err_m <= rel_tol)):
        res = _fixed_eval(complex(a[j]), b, x, rel_tol)
        out[j] = _pair_to_log(res.m, res.p)
    return out


# ---------------------------------------------------------------------------
# finite sums


def digamma_diff(a, r: int):
    """psi(a + r) - psi(a) written as the finite sum  sum_{m=1}^r 1/(m - 1 + a).

    Exact (a :class:`~fractions.Fraction`) for rational ``a``.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    exact = isinstance(a, Rational)
    if exact:
        a = Fraction(a)
    for m in range(r):
        if a + m == 0:
            raise ZeroDivisionError(f"pole: a = {-m} hits the digamma difference")
    if exact:
        return sum((Fraction(1) / (a + m) for m in range(r)), Fraction(0))
    return sum(1.0 / (complex(a) + m) for m in range(r))


def harmonic(n: int, order: int = 1) -> Fraction:
    """Harmonic number H_n^(order) as an exact rational; H_0 = 0."""
    if n < 0 or order < 1:
        raise ValueError("need n >= 0 and order >= 1")
    return sum((Fraction(1, k**order) for k in range(1, n + 1)), Fraction(0))


def pfq_2f2(b: float, k: int, x: float, log: bool = False) -> float:
    """2F2(1, 1; b + k + 1, k + 2 | x) = sum_n n! x^n / ((b+k+1)_n (k+2)_n).

    With ``log=True`` the natural log is returned (needed above x ~ 700).
    Summation is plain for x >= 0; negative x is summed directly and loses
    accuracy when |x| is large.
    """
    if not b > 0 or k < 0:
        raise ValueError("need b > 0 and k >= 0")
    c1, c2 = b + k + 1.0, k + 2.0
    t, s, shift = 1.0, 1.0, 0.0
    n = 0
    while True:
        t *= (n + 1.0) * x / ((c1 + n) * (c2 + n))
        s += t
        n += 1
        if abs(s) > 1e280:
            s *= 1e-280
            t *= 1e-280
            shift += 280.0 * math.log(10.0)
        if n > abs(x) + 10 and abs(t) <= 1e-17 * abs(s):
            break
    if log:
        return math.log(s) + shift
    if shift:
        return math.exp(math.log(s) + shift)
    return s


# ---------------------------------------------------------------------------
# asymptotic forms


def saddle_phase(u: complex) -> SaddlePhase:
    """Saddle t0 = (1 + sqrt(1+4u))/2 and phase value psi(t0), principal branches."""
    u = complex(u)
    r = cmath.sqrt(1.0 + 4.0 * u)
    t0 = (1.0 + r) / 2.0
    psi = t0 + u * cmath.log((r + 1.0) / (r - 1.0))
    return SaddlePhase(t0, psi, u)


def kummer_asymp_prop_a(u: complex, b: float, x: float, eps: float = 0.01) -> LogComplex:
    """Leading large-x behaviour of M(ux, b, x) for Re u > 0.

    Gamma(b) / (sqrt(2 pi) (1+4u)^(1/4)) * ((sqrt(1+4u)-1)/2)^b * (ux)^(1/2-b) * exp(x psi(t0)).
    """
    u = complex(u)
    if u.real <= 0:
        raise ValueError("need Re(u) > 0")
    if abs(cmath.phase(u)) > math.pi / 2 - eps:
        raise ValueError(f"|arg u| must not exceed pi/2 - {eps}")
    if x < 1:
        raise ValueError("need x >= 1")
    sp = saddle_phase(u)
    r = 2.0 * sp.t0 - 1.0
    w = (
        special.gammaln(b)
        - 0.5 * math.log(2.0 * math.pi)
        - 0.25 * cmath.log(1.0 + 4.0 * u)
        + b * cmath.log((r - 1.0) / 2.0)
        + (0.5 - b) * cmath.log(u * x)
        + x * sp.psi_t0
    )
    return LogComplex.from_log(w)


def kummer_bessel_regime(
    a: complex,
    b: float,
    y: float,
    mode: str = "auto",
    threshold: float = BESSEL_THRESHOLD,
    refined: bool = True,
) -> tuple[LogComplex, str]:
    """Large-``a`` approximations of M(a, b, y) for fixed y.

    ``mode="bessel"``: Gamma(b) e^{y/2} (a'y)^{(1-b)/2} I_{b-1}(2 sqrt(a'y)) with
    a' = a - b/2.  With ``refined=False`` the factor e^{y/2} and the shift are
    dropped, which is the small-y form Gamma(b) (ay)^{(1-b)/2} I_{b-1}(2 sqrt(ay)).

    ``mode="exponential"``: Gamma(b) / (2 sqrt(pi)) e^{y/2 + 2 sqrt(ay)} (ay)^{1/4 - b/2}.

    ``mode="auto"`` picks the exponential form once |a| y >= ``threshold``.
    Returns the value and the mode used.
    """
    a = complex(a)
    if mode == "auto":
        mode = "exponential" if abs(a) * y >= threshold else "bessel"
    if mode == "bessel":
        if y == 0:
            return LogComplex(0.0, 0.0), mode
        ap = a - b / 2.0 if refined else a
        z = 2.0 * cmath.sqrt(ap * y)
        iv = complex(special.ive(b - 1.0, z))
        w = (
            special.gammaln(b)
            + (y / 2.0 if refined else 0.0)
            + (1.0 - b) / 2.0 * cmath.log(ap * y)
            + cmath.log(iv)
            + abs(z.real)
        )
        return LogComplex.from_log(w), mode
    if mode == "exponential":
        if y <= 0:
            raise ValueError("exponential form needs y > 0")
        w = (
            special.gammaln(b)
            - math.log(2.0 * math.sqrt(math.pi))
            + y / 2.0
            + 2.0 * cmath.sqrt(a * y)
            + (0.25 - b / 2.0) * cmath.log(a * y)
        )
        return LogComplex.from_log(w), mode
    raise ValueError(f"unknown mode {mode!r}")
