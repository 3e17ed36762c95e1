"""Residue (eigenfunction) expansion of I(lam, b, x, y).

The transform e^{lam s}/s * M(s,b,y)/M(s,b,x) has a simple pole at 0 and
simple poles at s = -s_k, where the s_k > 0 are the a-zeros of M(-s, b, x).
Summing residues gives

    I = 1 - sum_k e^{-lam s_k} / s_k * M(-s_k, b, y) / M_a(-s_k, b, x)

with M_a the derivative in the first parameter.  Zeros are refined in
mpmath precision; the k = 0 term nearly cancels the leading 1 for large x,
so the whole sum is carried at a precision set from the expected size of I.
"""

from __future__ import annotations

import csv
import io
import math
import threading
import warnings
from dataclasses import dataclass, field

import mpmath
from scipy import integrate, special

from .kummer import KummerConvergenceError, kummer_m, kummer_m_mp, pfq_2f2
from .params import DimensionlessArgs

__all__ = [
    "BracketError",
    "ResidueTerm",
    "SimplicityError",
    "ZeroTable",
    "eigen_I",
    "eigen_terms",
    "find_zeros",
    "mprime_asymp",
    "net_k0_contribution",
    "summand_asymp",
    "wronskian_residual",
    "zero_asymp_large_x",
]


class BracketError(RuntimeError):
    """Fewer zeros than requested were bracketed within the scan budget."""


class SimplicityError(RuntimeError):
    """Newton stalled on a nearly vanishing derivative."""


@dataclass(frozen=True)
class ZeroTable:
    b: float
    x: float
    zeros: tuple  # mpf, ascending
    residuals: tuple  # |M(-s_k)| / (|M_a(-s_k)| s_k)
    refine_tol: float
    bits: int

    def __len__(self):
        return len(self.zeros)

    def to_rows(self) -> list[dict]:
        return [
            {
                "k": k,
                "s_k": mpmath.nstr(s, 17, strip_zeros=False),
                "s_minus_k": mpmath.nstr(s - k, 17, strip_zeros=False),
                "residual": repr(float(r)),
            }
            for k, (s, r) in enumerate(zip(self.zeros, self.residuals))
        ]

    def to_csv(self, stream=None) -> str:
        buf = stream if stream is not None else io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["k", "s_k", "s_minus_k", "residual"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.to_rows())
        return buf.getvalue() if stream is None else ""


@dataclass(frozen=True)
class ResidueTerm:
    k: int
    s_k: object  # mpf
    numerator: object  # M(-s_k, b, y)
    mprime: object  # M_a(-s_k, b, x)
    summand: object  # e^{-lam s_k}/s_k * numerator/mprime
    term: object = field(init=False)  # -summand, the contribution to I

    def __post_init__(self):
        object.__setattr__(self, "term", -self.summand)


# ---------------------------------------------------------------------------
# zeros


class _ZeroState:
    """Incrementally extended zero list for one (b, x, bits)."""

    def __init__(self, b, x, bits):
        self.b, self.x, self.bits = b, x, bits
        self.zeros: list = []
        self.residuals: list = []
        self.s = mpmath.mpf(0)
        self.f = mpmath.mpf(1)  # M(0, b, x) = 1
        self.lock = threading.Lock()


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _state(b, x, bits):
    key = (float(b), float(x), int(bits))
    with _CACHE_LOCK:
        st = _CACHE.get(key)
        if st is None:
            st = _CACHE[key] = _ZeroState(float(b), float(x), int(bits))
    return st


def _scan_step(s: float, b: float, x: float, frac: float) -> float:
    # local zero spacing is ~1 for s << x and ~pi sqrt((s+b/2)/x) beyond
    return frac * max(0.5, math.pi * math.sqrt((s + b / 2.0) / x))


def _m_and_da(s, b, x, bits, with_err=False):
    try:
        (m, ma), err = kummer_m_mp(-s, b, x, bits=bits, deriv=True, check="d", return_err=True)
        return (m, ma, err) if with_err else (m, ma)
    except KummerConvergenceError as exc:
        raise SimplicityError(f"a-derivative vanishes to working precision at s={mpmath.nstr(s, 12)}") from exc


def _refine(lo, hi, flo, fhi, b, x, bits):
    """Safeguarded Newton on f(s) = M(-s, b, x) inside a sign-change bracket."""
    with mpmath.workprec(bits + 32):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        # regula falsi start
        s = lo + (hi - lo) * flo / (flo - fhi) if fhi != flo else (lo + hi) / 2
        if not lo < s < hi:
            s = (lo + hi) / 2
        stop = mpmath.mpf(2) ** -(bits - 24)
        for _ in range(400):
            m, ma, err = _m_and_da(s, b, x, bits, with_err=True)
            if abs(m) <= 4 * err:
                return s, m, ma
            if (m > 0) == (flo > 0):
                lo = s
            else:
                hi = s
            # f'(s) = -M_a(-s); steps below the evaluation noise are meaningless
            step = m / ma
            if abs(step) <= max(stop * abs(s), 4 * err / abs(ma)):
                return s + step, m, ma
            cand = s + step
            if not lo < cand < hi:
                cand = (lo + hi) / 2
            s = cand
            if hi - lo <= stop * abs(s):
                return s, m, ma
    raise SimplicityError(f"Newton did not converge near s={mpmath.nstr(s, 10)} (b={b}, x={x})")


def find_zeros(b: float, x: float, K: int, tol: float = 1e-30, bits: int | None = None,
               step_frac: float = 0.1, max_scan: int = 200000) -> ZeroTable:
    """First ``K`` positive zeros s_k of s -> M(-s, b, x).

    Sign changes are bracketed by marching from s = 0 with a step tied to
    the local zero spacing, then refined by Newton with bisection fallback.
    Every zero is checked to be simple.
    """
    if not (b > 0 and x > 0 and K >= 1):
        raise ValueError("need b > 0, x > 0, K >= 1")
    if bits is None:
        bits = max(160, int(-math.log2(tol)) + 64)
    st = _state(b, x, bits)
    with st.lock:
        scans = 0
        with mpmath.workprec(bits + 32):
            while len(st.zeros) < K:
                if scans > max_scan:
                    raise BracketError(f"only {len(st.zeros)} of {K} zeros found (b={b}, x={x})")
                scans += 1
                s_next = st.s + _scan_step(float(st.s), b, x, step_frac)
                f_next = kummer_m_mp(-s_next, b, x, bits=48, check="m", strict=False)
                if f_next == 0 or (f_next > 0) != (st.f > 0):
                    z, m, ma = _refine(st.s, s_next, st.f, f_next, b, x, bits)
                    m, ma = _m_and_da(z, b, x, bits)
                    scale = abs(ma) * max(z, mpmath.mpf(2) ** -bits)
                    if st.zeros and z <= st.zeros[-1]:
                        raise SimplicityError("zeros not strictly increasing; scan step too coarse")
                    st.zeros.append(z)
                    st.residuals.append(abs(m) / scale)
                st.s, st.f = s_next, f_next
        return ZeroTable(b, x, tuple(st.zeros[:K]), tuple(st.residuals[:K]), tol, bits)


# ---------------------------------------------------------------------------
# expansion


def _bits_for(d: DimensionlessArgs, tol: float) -> int:
    from .asymptotics import tail_asymp_small_y

    # rough size of I; the k = 0 term cancels down to it
    try:
        logI = min(0.0, tail_asymp_small_y(d, log=True))
    except (ValueError, OverflowError):
        logI = 0.0
    digits = -logI / math.log(10) - math.log10(tol) + 25
    return max(160, int(digits * 3.33) + 32)


def eigen_terms(d: DimensionlessArgs, K: int, bits: int = 192) -> list[ResidueTerm]:
    """The first ``K`` residue terms at working precision ``bits``."""
    zt = find_zeros(d.b, d.x, K, bits=bits)
    out = []
    with mpmath.workprec(bits):
        lam = mpmath.mpf(d.lam)
        for k, s in enumerate(zt.zeros):
            _, ma = _m_and_da(s, d.b, d.x, bits)
            num = kummer_m_mp(-s, d.b, d.y, bits=bits, check="m", strict=False) if d.y > 0 else mpmath.mpf(1)
            summand = mpmath.exp(-lam * s) / s * num / ma
            out.append(ResidueTerm(k, s, num, ma, summand))
    return out


def eigen_I(d: DimensionlessArgs, K: int | None = None, tol: float = 1e-12,
            return_terms: bool = False, bits: int | None = None):
    """I(lam, b, x, y) by the residue series.

    With ``K=None`` terms are added until one is below ``tol`` times the
    running value while the terms are shrinking.  The result is clamped to
    [0, 1] with a warning if that moves it by more than ``tol``.
    """
    if bits is None:
        bits = _bits_for(d, tol)
    terms: list[ResidueTerm] = []
    with mpmath.workprec(bits):
        total = mpmath.mpf(1)
        chunk = 8 if K is None else K
        n = 0
        while True:
            new = eigen_terms(d, n + chunk, bits=bits)[n:]
            done = False
            for t in new:
                total += t.term
                terms.append(t)
                n += 1
                if K is None and n >= 3:
                    a1, a0 = abs(terms[-1].term), abs(terms[-2].term)
                    if a1 <= a0 and a1 < tol * abs(total) * 1e-2:
                        done = True
                        break
            if K is not None or done:
                break
            chunk = min(2 * chunk, 64)
            if n > 20000:
                raise RuntimeError("residue series did not settle")
        if total != 0 and abs(total) < mpmath.mpf(2) ** -(bits - 64):
            # cancellation reached the working precision: redo with more bits
            return eigen_I(d, K=K, tol=tol, return_terms=return_terms, bits=2 * bits)
        raw = float(total)
    value = min(max(raw, 0.0), 1.0)
    if abs(value - raw) > tol * max(abs(value), 1e-300):
        warnings.warn(f"residue series value {raw!r} clamped to [0, 1]", RuntimeWarning, stacklevel=2)
    if return_terms:
        return value, terms
    return value


# ---------------------------------------------------------------------------
# large-x formulas


def zero_asymp_large_x(k: int, b: float, x: float, log: bool = False) -> float:
    """k + x^(b+2k) e^(-x) / (k! Gamma(b+k)); with ``log=True`` the log of the correction."""
    if k < 0:
        raise ValueError("k must be >= 0")
    w = (b + 2 * k) * math.log(x) - x - special.gammaln(k + 1.0) - special.gammaln(b + k)
    return w if log else k + math.exp(w)


def _ab_sums(b: float, x: float) -> tuple[float, float]:
    """A = sum_r x^r/((b)_r r),  B = sum_r H_{r-1} x^r/((b)_r r), common scale removed."""
    c = 1.0  # x^r/(b)_r
    A = B = 0.0
    H = 0.0
    r = 1
    while True:
        c *= x / (b + r - 1)
        A += c / r
        B += H * c / r
        if c > 1e250:
            c, A, B = c * 1e-250, A * 1e-250, B * 1e-250
        H += 1.0 / r
        if r > x + 20 and c / r < 1e-18 * A:
            return A, B
        r += 1


def mprime_asymp(k: int, b: float, x: float, refine: bool = False) -> float:
    """Large-x form of M_a(-s_k, b, x).

    (-1)^k x^(k+1) / ((b)_(k+1) (k+1)) * 2F2(1,1; b+k+1, k+2 | x).  For k = 0
    and ``refine=True`` the term -2 s_0 sum_r H_(r-1) x^r/((b)_r r) is added,
    with s_0 from :func:`zero_asymp_large_x`.
    """
    if k < 0 or not x > 0:
        raise ValueError("need k >= 0 and x > 0")
    logpoch = special.gammaln(b + k + 1.0) - special.gammaln(b)
    w = (k + 1) * math.log(x) - logpoch - math.log(k + 1.0) + pfq_2f2(b, k, x, log=True)
    val = (-1.0) ** k * math.exp(w)
    if refine and k == 0:
        A, B = _ab_sums(b, x)
        s0 = zero_asymp_large_x(0, b, x)
        val *= 1.0 - 2.0 * s0 * B / A
    return val


def summand_asymp(k: int, d: DimensionlessArgs) -> float:
    """Leading form of e^{-lam s_k}/s_k * M(-s_k,b,y)/M_a(-s_k,b,x) for large x.

    1 for k = 0, else (-1)^k M(-k,b,y) x^(k+b) e^(-x) / (e^(lam k) k k! Gamma(b)).
    """
    if k == 0:
        return 1.0
    num = kummer_m(-k, d.b, d.y).real if d.y > 0 else 1.0
    w = (k + d.b) * math.log(d.x) - d.x - d.lam * k - math.log(k) - special.gammaln(k + 1.0) - special.gammaln(d.b)
    return (-1.0) ** k * num * math.exp(w)


def net_k0_contribution(d: DimensionlessArgs, form: str = "corrected") -> float:
    """Large-x form of 1 - e^{-lam s_0}/s_0 * M(-s_0,b,y)/M_a(-s_0,b,x).

    ``form="paper"`` gives s_0 (lam + (y/b) 2F2(1,1; b+1, 2 | y)).
    ``form="corrected"`` also keeps the shift -s_0 B/A coming from the
    harmonic-number part of M_a and of the zero condition, where
    A = sum_r x^r/((b)_r r) and B = sum_r H_(r-1) x^r/((b)_r r).
    B/A grows like log x, so this shift dominates and makes the value
    negative once log x exceeds lam + (y/b) 2F2.
    """
    s0 = zero_asymp_large_x(0, d.b, d.x)
    fy = d.y / d.b * pfq_2f2(d.b, 0, d.y) if d.y > 0 else 0.0
    if form == "paper":
        return s0 * (d.lam + fy)
    if form == "corrected":
        A, B = _ab_sums(d.b, d.x)
        return s0 * (d.lam + fy - B / A)
    raise ValueError(f"form must be 'corrected' or 'paper', got {form!r}")


# ---------------------------------------------------------------------------
# integral identity


def wronskian_residual(a: complex, b: float, x: float, epsrel: float = 1e-12) -> float:
    """Relative mismatch of the weighted-norm identity for M(a, b, .) with Im a != 0.

    int_0^x t^(b-1) e^(-t) |M(a,b,t)|^2 dt
        = x^b e^(-x) / (conj(a) - a) * (M(a) d/dx M(conj a) - M(conj a) d/dx M(a)).

    The left side is integrated in tau = t^b, which removes the t^(b-1)
    endpoint singularity; d/dx M(a,b,x) = (a/b) M(a+1,b+1,x).
    """
    a = complex(a)
    if a.imag == 0:
        raise ValueError("identity needs Im(a) != 0")
    if not (b > 0 and x > 0):
        raise ValueError("need b > 0 and x > 0")

    def integrand(tau):
        t = tau ** (1.0 / b)
        return math.exp(-t) * abs(kummer_m(a, b, t)) ** 2 / b

    lhs, _ = integrate.quad(integrand, 0.0, x**b, epsabs=0.0, epsrel=epsrel, limit=400)
    m = kummer_m(a, b, x)
    dm = a / b * kummer_m(a + 1, b + 1, x)
    ac = a.conjugate()
    rhs = x**b * math.exp(-x) / (ac - a) * (m * dm.conjugate() - m.conjugate() * dm)
    return abs(lhs - rhs) / abs(lhs)
