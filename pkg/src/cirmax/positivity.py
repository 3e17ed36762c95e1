"""Exact checks on the power series of f(t, x) = |M(a+it, b, x)|^2.

Writing f = sum v_{mn} t^m/m! x^n/n!, this module

* builds the v_{mn} exactly from the Cauchy product of the two Kummer series,
* checks the four-term x-recurrence (and its differenced form) with zero
  rational residual,
* checks nonnegativity of v, v', v'', v''' (differences in n), which makes
  |M(a+it, b, x)| increasing in t for a >= b > 0, x > 0,
* samples the coefficient polynomials of the differenced recurrence,
* scans |M((u0+iv)x, b, y) / M((u0+iv)x, b, x)| in v numerically.

Everything except the two scans and :func:`ode_residual_f` is exact.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

import mpmath
import numpy as np

from .kummer import kummer_m_log

__all__ = [
    "CoeffTable",
    "DepthError",
    "a_coeffs",
    "conjecture_scan",
    "g_coeffs",
    "g_positivity",
    "monotonicity_scan",
    "ode_residual_f",
    "p_polys",
    "recA_check",
    "recA_residual",
    "recG_check",
    "recG_residual",
    "u_prime",
    "v_table_direct",
    "verify_nonneg",
]

DEFAULT_DEPTH_CAP = 80


class DepthError(ValueError):
    """Requested depth exceeds the configured cap or the table."""


def _q(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**9) if v != int(v) else Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True)
class CoeffTable:
    """v[m][n] = v_{mn} for 0 <= m, n <= N, exact."""

    a: Fraction
    b: Fraction
    N: int
    v: tuple

    def get(self, m: int, n: int) -> Fraction:
        if m < 0 or n < 0:
            return Fraction(0)
        if m > self.N or n > self.N:
            raise DepthError(f"v[{m}][{n}] is beyond depth {self.N}")
        return self.v[m][n]

    def d1(self, m, n):
        return self.get(m, n) - self.get(m, n - 1)

    def d2(self, m, n):
        return self.d1(m, n) - self.d1(m, n - 1)

    def d3(self, m, n):
        return self.d2(m, n) - self.d2(m, n - 1)

    def bumped(self, m: int, n: int, delta=1) -> "CoeffTable":
        """Copy with one coefficient changed (negative control for the checkers)."""
        rows = [list(r) for r in self.v]
        rows[m][n] += Fraction(delta)
        return CoeffTable(self.a, self.b, self.N, tuple(tuple(r) for r in rows))


def _rising_int(p: int, q: int, k_max: int) -> list[list[int]]:
    """Integer coefficients of prod_{m<k} ((p + m q) + q T) in T, for k <= k_max."""
    polys = [[1]]
    cur = [1]
    for m in range(k_max):
        c0, c1 = p + m * q, q
        nxt = [0] * (len(cur) + 1)
        for j, c in enumerate(cur):
            nxt[j] += c * c0
            nxt[j + 1] += c * c1
        cur = nxt
        polys.append(cur)
    return polys


def v_table_direct(a, b, N: int, cap: int = DEFAULT_DEPTH_CAP) -> CoeffTable:
    """v_{mn} for m, n <= N from the Cauchy product of the series of M(a+it) and M(a-it).

    With (a+it)_k = sum_j r_{kj} (it)^j (r real), the t^m coefficient of
    (a+it)_k (a-it)_l is i^m sum_{j+i=m} (-1)^i r_{kj} r_{li}, real for even m.
    Denominators are cleared with a = p/q, b = r/s and B_n = prod_{m<n}(r+ms),
    so the inner work is integer-only.
    """
    a, b = _q(a), _q(b)
    if not b > 0:
        raise ValueError("need b > 0")
    if N > cap:
        raise DepthError(f"depth {N} exceeds cap {cap}; raise cap explicitly")
    p, q = a.numerator, a.denominator
    r, s = b.numerator, b.denominator
    R = _rising_int(p, q, N)
    B = [1]
    for m in range(N):
        B.append(B[-1] * (r + m * s))
    # signed copies: coefficient i of R_l times (-1)^i
    Rs = [[c if i % 2 == 0 else -c for i, c in enumerate(poly)] for poly in R]
    v = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
    fact = [math.factorial(m) for m in range(N + 1)]
    for n in range(N + 1):
        acc = [0] * (n + 1)
        Bn = B[n]
        for k in range(n + 1):
            w = comb(n, k) * (Bn // B[k]) * (Bn // B[n - k])
            P, Q = R[k], Rs[n - k]
            for j, pj in enumerate(P):
                if pj == 0:
                    continue
                pw = pj * w
                for i, qi in enumerate(Q):
                    acc[j + i] += pw * qi
        den = q**n * Bn * Bn
        num_scale = s**n
        for m in range(0, n + 1, 2):
            sign = -1 if (m // 2) % 2 else 1
            v[m][n] = Fraction(sign * fact[m] * num_scale * acc[m], den)
    return CoeffTable(a, b, N, tuple(tuple(row) for row in v))


# ---------------------------------------------------------------------------
# recurrences


def a_coeffs(a, b, n) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """A_{-1,n}, A_{0,n}, A_{1,n}, A_{2,n} of the four-term recurrence in n."""
    a, b, n = _q(a), _q(b), Fraction(n)
    am1 = b - 3 * b**2 + 2 * b**3 + (1 - 5 * b + 5 * b**2) * n + (-2 + 4 * b) * n**2 + n**3
    a0 = (
        6 * a * b - 4 * a * b**2 - 2 * a
        + (6 * a + 11 * b - 5 - 8 * a * b - 6 * b**2) * n
        + (9 - 4 * a - 10 * b) * n**2
        - 4 * n**3
    )
    a1 = (8 - 10 * a - 6 * b + 8 * a * b) * n + (-13 + 8 * a + 6 * b) * n**2 + 5 * n**3
    a2 = (-4 + 4 * a) * n + (6 - 4 * a) * n**2 - 2 * n**3
    return am1, a0, a1, a2


def g_coeffs(a, b, n) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
    """G_{-1,n}, ..., G_{3,n} of the differenced recurrence."""
    a, b, n = _q(a), _q(b), Fraction(n)
    gm1 = b - 3 * b**2 + 2 * b**3 + (1 - 5 * b + 5 * b**2) * n + (-2 + 4 * b) * n**2 + n**3
    g0 = (
        2 * a + 7 * b - 4 - 6 * a * b + b**2 + 4 * a * b**2 - 4 * b**3
        + (10 - 6 * a - 9 * b + 8 * a * b - 4 * b**2) * n
        + (4 * a + 2 * b - 8) * n**2
        + 2 * n**3
    )
    g1 = (
        6 - 6 * a + 3 * b - 4 * a * b + 8 * a * b**2 - 6 * b**3
        + (6 * a - 5 * b + 8 * a * b - 3 * b**2 - 10) * n
        + (4 + 2 * b) * n**2
    )
    g2 = -2 - 4 * b + 2 * a * b + 4 * a * b**2 - 2 * b**3 + (2 + 4 * b + b**2) * n
    g3 = b**2
    return gm1, g0, g1, g2, g3


def u_prime(tbl: CoeffTable, m: int, n: int) -> Fraction:
    """4 n m (m-1) v_{m-2,n-1} - 4 (n-1) m (m-1) v_{m-2,n-2}."""
    c = 4 * m * (m - 1)
    return c * n * tbl.get(m - 2, n - 1) - c * (n - 1) * tbl.get(m - 2, n - 2)


def recA_residual(tbl: CoeffTable, m: int, n: int) -> Fraction:
    am1, a0, a1, a2 = a_coeffs(tbl.a, tbl.b, n)
    lhs = am1 * tbl.get(m, n + 1) + a0 * tbl.get(m, n) + a1 * tbl.get(m, n - 1) + a2 * tbl.get(m, n - 2)
    return lhs - 4 * n * m * (m - 1) * tbl.get(m - 2, n - 1)


def recG_residual(tbl: CoeffTable, m: int, n: int) -> Fraction:
    gm1, g0, g1, g2, g3 = g_coeffs(tbl.a, tbl.b, n)
    rhs = g0 * tbl.d3(m, n) + g1 * tbl.d2(m, n - 1) + g2 * tbl.d1(m, n - 2) + g3 * tbl.get(m, n - 3)
    return gm1 * tbl.d3(m, n + 1) - rhs - u_prime(tbl, m, n)


def _check(tbl, fn, n_lo):
    bad = []
    for m in range(tbl.N + 1):
        for n in range(n_lo, tbl.N):
            res = fn(tbl, m, n)
            if res != 0:
                bad.append({"m": m, "n": n, "residual": str(res)})
    return bad


def recA_check(tbl: CoeffTable, violations: bool = False):
    """True iff the four-term recurrence has zero residual for 0 <= m <= N, 0 <= n < N."""
    bad = _check(tbl, recA_residual, 0)
    return bad if violations else not bad


def recG_check(tbl: CoeffTable, violations: bool = False):
    """True iff the differenced recurrence has zero residual for 0 <= m <= N, 1 <= n < N."""
    bad = _check(tbl, recG_residual, 1)
    return bad if violations else not bad


# ---------------------------------------------------------------------------
# positivity


def _default_grid(n_points: int = 50) -> list[tuple[Fraction, Fraction]]:
    """Rational (a, b) with a >= b > 0: boundary a = b, small b, and interior points."""
    bs = [Fraction(1, 1000), Fraction(1, 100), Fraction(1, 10), Fraction(1, 3), Fraction(1, 2),
          Fraction(1), Fraction(3, 2), Fraction(2), Fraction(7, 3), Fraction(5), Fraction(10)]
    pts: list[tuple[Fraction, Fraction]] = [(b, b) for b in bs]
    ratios = [Fraction(1001, 1000), Fraction(11, 10), Fraction(3, 2), Fraction(2), Fraction(10)]
    for b in bs:
        for rr in ratios:
            pts.append((b * rr, b))
    seen, out = set(), []
    for pt in pts:
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out[:n_points]


@dataclass
class GPositivityReport:
    n_max: int
    samples: list
    n_evaluations: int
    negatives: list = field(default_factory=list)
    min_values: dict = field(default_factory=dict)
    note: str = (
        "exact evaluation on sampled rational points; sampled coverage, not a proof"
    )

    @property
    def ok(self) -> bool:
        return not self.negatives


def g_positivity(n_max: int = 200, samples=None) -> GPositivityReport:
    """Evaluate G_{-1,n}..G_{3,n} exactly for 2 <= n <= n_max at every sample (a, b)."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    pts = [(_q(a), _q(b)) for a, b in (samples if samples is not None else _default_grid())]
    names = ["G_-1", "G_0", "G_1", "G_2", "G_3"]
    mins = {k: None for k in names}
    rep = GPositivityReport(n_max, [[str(a), str(b)] for a, b in pts], 0)
    for a, b in pts:
        if not (a >= b > 0):
            raise ValueError(f"sample ({a}, {b}) violates a >= b > 0")
        for n in range(2, n_max + 1):
            gs = g_coeffs(a, b, n)
            rep.n_evaluations += 5
            for name, g in zip(names, gs):
                if mins[name] is None or g < mins[name]:
                    mins[name] = g
                if g < 0:
                    rep.negatives.append({"coeff": name, "a": str(a), "b": str(b), "n": n, "value": str(g)})
    rep.min_values = {k: str(v) for k, v in mins.items()}
    return rep


@dataclass
class NonnegReport:
    a: str
    b: str
    M: int
    N: int
    region_verified: bool
    exempt_v3_01: str
    exempt_sign_matches: bool
    base_cases: dict
    violations: list
    checked: int
    seconds: float

    @property
    def ok(self) -> bool:
        return self.region_verified and not self.violations and all(self.base_cases.values())

    def to_json(self) -> str:
        d = asdict(self)
        d["schema"] = 1
        d["ok"] = self.ok
        return json.dumps(d, indent=2)


def verify_nonneg(a, b, M: int = 40, N: int = 40, tbl: CoeffTable | None = None) -> NonnegReport:
    """Check v, v', v'', v''' >= 0 for m <= M, n <= N, with v'''_{0,1} = 2a/b - 3 exempt.

    The closed forms of the m = 0, n <= 2 base cases are compared with the table.
    Outside a >= b > 0 the checks still run but ``region_verified`` is False.
    """
    t0 = time.perf_counter()
    a, b = _q(a), _q(b)
    depth = max(M, N)
    if tbl is None or tbl.N < depth or tbl.a != a or tbl.b != b:
        tbl = v_table_direct(a, b, depth, cap=max(depth, DEFAULT_DEPTH_CAP))
    v01 = 2 * a / b
    v02 = 2 * a * (2 * a * b + a + b) / (b**2 * (b + 1))
    base = {
        "v_00 = 1": tbl.get(0, 0) == 1,
        "v_01 = 2a/b": tbl.get(0, 1) == v01,
        "v'_01 = 2a/b - 1": tbl.d1(0, 1) == v01 - 1,
        "v''_01 = 2a/b - 2": tbl.d2(0, 1) == v01 - 2,
        "v'''_01 = 2a/b - 3": tbl.d3(0, 1) == v01 - 3,
        "v_02 = 2a(2ab+a+b)/(b^2(b+1))": tbl.get(0, 2) == v02,
        "v'_02": tbl.d1(0, 2) == v02 - 2 * a / b,
        "v''_02": tbl.d2(0, 2) == v02 - 4 * a / b + 1,
        "v'''_02": tbl.d3(0, 2) == v02 - 6 * a / b + 3,
    }
    viol = []
    checked = 0
    for m in range(M + 1):
        for n in range(N + 1):
            for name, val in (("v", tbl.get(m, n)), ("v'", tbl.d1(m, n)),
                              ("v''", tbl.d2(m, n)), ("v'''", tbl.d3(m, n))):
                checked += 1
                if val < 0 and not (name == "v'''" and m == 0 and n == 1):
                    viol.append({"which": name, "m": m, "n": n, "value": str(val)})
    ex = tbl.d3(0, 1)
    sign_ok = (ex > 0) == (v01 - 3 > 0) and (ex == 0) == (v01 - 3 == 0)
    return NonnegReport(
        a=str(a), b=str(b), M=M, N=N,
        region_verified=bool(a >= b > 0),
        exempt_v3_01=str(ex),
        exempt_sign_matches=sign_ok,
        base_cases=base,
        violations=viol,
        checked=checked,
        seconds=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# the x-ODE of f


def p_polys(a, b, x):
    """p_0(x), ..., p_4(x) of the fourth-order x-ODE satisfied by f."""
    p0 = -2 * a * (1 - 3 * b + 2 * b**2) - 2 * a * (1 - 4 * b) * x - 4 * a * x**2
    p1 = (b - 3 * b**2 + 2 * b**3 + (2 * a + b - 8 * a * b - 6 * b**2) * x
          + (2 + 8 * a + 6 * b) * x**2 - 2 * x**3)
    p2 = (5 * b**2 - b) * x + (-3 - 4 * a - 10 * b) * x**2 + 5 * x**3
    p3 = (1 + 4 * b) * x**2 - 4 * x**3
    p4 = x**3
    return p0, p1, p2, p3, p4


def ode_residual_f(a, b, t: float, x: float, N: int = 60, tbl: CoeffTable | None = None) -> float:
    """Relative residual of -4 t^2 x f + sum_k p_k(x) d^k f/dx^k at (t, x).

    f and its x-derivatives are summed from the exact table in 50-digit
    arithmetic; the residual is scaled by the largest single term.
    """
    if abs(t) > 2 or abs(x) > 2:
        raise DepthError("truncated series is only trusted for |t|, |x| <= 2")
    if tbl is None or tbl.N < N:
        tbl = v_table_direct(a, b, N, cap=max(N, DEFAULT_DEPTH_CAP))
    with mpmath.workdps(50):
        tm = mpmath.mpf(t)
        xm = mpmath.mpf(x)
        am, bm = mpmath.mpf(tbl.a.numerator) / tbl.a.denominator, mpmath.mpf(tbl.b.numerator) / tbl.b.denominator
        derivs = []
        for k in range(5):
            tot = mpmath.mpf(0)
            for m in range(0, N + 1, 2):
                tw = tm**m / mpmath.factorial(m)
                for n in range(0, N + 1 - k):
                    c = tbl.v[m][n + k]
                    if c:
                        tot += mpmath.mpf(c.numerator) / c.denominator * tw * xm**n / mpmath.factorial(n)
            derivs.append(tot)
        # truncation check: the last retained x-order must be negligible
        terms = [-4 * tm**2 * xm * derivs[0]] + [pk * dk for pk, dk in zip(p_polys(am, bm, xm), derivs)]
        res = abs(mpmath.fsum(terms))
        scale = max(abs(v) for v in terms)
        return float(res / scale) if scale else 0.0


# ---------------------------------------------------------------------------
# numeric scans


@dataclass
class ScanReport:
    params: dict
    grid: list
    values: list
    monotone: bool
    worst_violation: float
    worst_at: float | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = 1
        return d


def monotonicity_scan(a: float, b: float, x: float, t_grid, rtol: float = 1e-10) -> ScanReport:
    """|M(a+it, b, x)| along ``t_grid``; non-decrease is expected for a >= b > 0."""
    t_grid = [float(t) for t in t_grid]
    if any(t1 < t0 for t0, t1 in zip(t_grid, t_grid[1:])):
        raise ValueError("t_grid must be ascending")
    logs = [kummer_m_log(complex(a, t), b, x).log_magnitude for t in t_grid]
    diffs = np.diff(logs)
    worst = float(diffs.min()) if diffs.size else 0.0
    at = t_grid[int(np.argmin(diffs)) + 1] if diffs.size else None
    vals = [math.exp(v) if v < 700 else math.inf for v in logs]
    return ScanReport(
        params={"a": a, "b": b, "x": x, "region": bool(a >= b > 0)},
        grid=t_grid,
        values=vals,
        monotone=bool(worst >= -rtol),
        worst_violation=worst,
        worst_at=at,
        extra={"log_values": logs, "min_forward_log_difference": worst},
    )


def conjecture_scan(u0: float, b: float, x: float, y: float, v_grid, rtol: float = 1e-10) -> ScanReport:
    """|M((u0+iv)x, b, y) / M((u0+iv)x, b, x)| along ``v_grid``.

    The quotient is conjectured to decrease in v >= 0.  The report records
    the largest increase seen (a finding, not a failure) and whether the
    denominator alone increases, which is a proved fact.
    """
    if not x > y > 0:
        raise ValueError("need x > y > 0")
    v_grid = [float(v) for v in v_grid]
    num, den = [], []
    for v in v_grid:
        a = complex(u0, v) * x
        num.append(kummer_m_log(a, b, y).log_magnitude)
        den.append(kummer_m_log(a, b, x).log_magnitude)
    q = np.array(num) - np.array(den)
    dq = np.diff(q)
    worst = float(dq.max()) if dq.size else 0.0
    at = v_grid[int(np.argmax(dq)) + 1] if dq.size else None
    dd = np.diff(den)
    return ScanReport(
        params={"u0": u0, "b": b, "x": x, "y": y},
        grid=v_grid,
        values=[float(math.exp(v)) for v in q],
        monotone=bool(worst <= rtol),
        worst_violation=worst,
        worst_at=at,
        extra={
            "log_quotient": q.tolist(),
            "denominator_increasing": bool(dd.size == 0 or dd.min() >= -rtol),
            "min_denominator_log_step": float(dd.min()) if dd.size else 0.0,
        },
    )
