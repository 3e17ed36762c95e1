"""Bromwich inversion of the hitting-time transform.

I(lam, b, x, y) = (1/2 pi i) int_{c-i inf}^{c+i inf} e^{lam s}/s * M(s,b,y)/M(s,b,x) ds
                = (1/pi) int_0^inf Re g(c + i v) dv

with g the integrand.  The abscissa c is the real minimiser of
h(s) = log(e^{lam s} M(s,b,y) / (s M(s,b,x))), i.e. the saddle of the
integrand on the real axis.  There the integrand does not oscillate much
and we can scale it by exp(-h(c)), which keeps everything in range even when
I is far below the float minimum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .kummer import _fixed_eval, _pair_to_log, float_series
from .params import CirParams, DimensionlessArgs

__all__ = [
    "BromwichResult",
    "ClampWarning",
    "ContourSpec",
    "QuadratureError",
    "bromwich",
    "bromwich_I",
    "bromwich_log_I",
    "cir_running_max_cdf",
    "log_integrand",
    "saddle_abscissa",
]


class QuadratureError(RuntimeError):
    pass


class ClampWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ContourSpec:
    """Vertical contour Re s = abscissa, truncated at Im s = im_cut.

    ``None`` fields are chosen automatically (abscissa at the real saddle,
    width and cut-off adaptively).
    """

    abscissa: float | None = None
    im_cut: float | None = None
    step: float | None = None
    tol: float = 1e-10

    def __post_init__(self):
        if self.abscissa is not None and not self.abscissa > 0:
            raise ValueError("abscissa must be positive (all poles lie on (-inf, 0])")
        if self.im_cut is not None and not self.im_cut > 0:
            raise ValueError("im_cut must be positive")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")


@dataclass(frozen=True)
class BromwichResult:
    value: float  # clamped to [0, 1]
    log_value: float  # natural log of the unclamped value
    abscissa: float
    width: float
    im_cut: float
    error_estimate: float  # relative
    n_evals: int
    n_escalated: int
    raw_value: float = field(default=math.nan)


# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WKF = np.concatenate([_WK[:-1], _WK[::-1]])
_WGF = np.zeros(15)
_WGF[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class _Integrand:
    """Scaled integrand exp(log g(c + i v) - h(c)) with accuracy bookkeeping."""

    def __init__(self, d: DimensionlessArgs, c: float, hc: float, abs_target: float):
        self.d, self.c, self.hc = d, c, hc
        self.abs_target = abs_target
        self.n_evals = 0
        self.n_escalated = 0

    def __call__(self, v: np.ndarray) -> np.ndarray:
        d = self.d
        s = self.c + 1j * np.asarray(v, dtype=float)
        self.n_evals += s.size
        fx = float_series(s, d.b, d.x)
        lx, ex = fx.log_m, fx.err_m
        if d.y > 0:
            fy = float_series(s, d.b, d.y)
            ly, ey = fy.log_m, fy.err_m
        else:
            ly, ey = np.zeros_like(lx), np.zeros(s.size)
        logg = d.lam * s - np.log(s) + ly - lx - self.hc
        with np.errstate(over="ignore", invalid="ignore"):
            g = np.exp(logg)
            err = (ex + ey) * np.abs(g)
        bad = ~(err <= self.abs_target) | ~np.isfinite(g)
        tight = max(self.abs_target, 1e-300)
        for j in np.flatnonzero(bad):
            sj = complex(s[j])
            # relative accuracy needed on this point, given its size
            mag = abs(g[j]) if np.isfinite(g[j]) and ex[j] < 0.5 and ey[j] < 0.5 else 1.0
            rel = min(1e-6, max(tight / max(mag, 1e-300) * 0.5, 1e-17))
            rx = _fixed_eval(sj, d.b, d.x, rel)
            lxj = _pair_to_log(rx.m, rx.p)
            if d.y > 0:
                ry = _fixed_eval(sj, d.b, d.y, rel)
                lyj = _pair_to_log(ry.m, ry.p)
            else:
                lyj = 0j
            g[j] = np.exp(d.lam * sj - np.log(sj) + lyj - lxj - self.hc)
            self.n_escalated += 1
        return g


def _h_real(d: DimensionlessArgs, s: np.ndarray) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lx = float_series(s, d.b, d.x).log_m.real
    ly = float_series(s, d.b, d.y).log_m.real if d.y > 0 else 0.0
    return d.lam * s - np.log(s) + ly - lx


def saddle_abscissa(d: DimensionlessArgs) -> tuple[float, float, float]:
    """Real minimiser c of h, h(c), and the Gaussian width 1/sqrt(h''(c))."""
    hi = 10.0 * (d.x + 1.0) / min(d.lam, 1.0) ** 2 + 10.0
    grid = np.geomspace(1e-6, hi, 80)
    hv = _h_real(d, grid)
    j = int(np.argmin(hv))
    lo_b = grid[max(j - 1, 0)]
    hi_b = grid[min(j + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda s: float(_h_real(d, s)[0]),
        bounds=(lo_b, hi_b),
        method="bounded",
        options={"xatol": 1e-10 * hi_b},
    )
    c = float(res.x)
    hc = float(_h_real(d, c)[0])
    dh = 1e-3 * c
    h3 = _h_real(d, np.array([c - dh, c, c + dh]))
    h2 = (h3[0] - 2.0 * h3[1] + h3[2]) / (dh * dh)
    width = 1.0 / math.sqrt(h2) if h2 > 0 else c
    return c, hc, width


def log_integrand(d: DimensionlessArgs, s: complex) -> complex:
    """log(e^{lam s}/s * M(s,b,y)/M(s,b,x)) at one point, on the fixed-point path."""
    rx = _fixed_eval(complex(s), d.b, d.x, 1e-15)
    val = d.lam * s - np.log(s) - _pair_to_log(rx.m, rx.p)
    if d.y > 0:
        ry = _fixed_eval(complex(s), d.b, d.y, 1e-15)
        val += _pair_to_log(ry.m, ry.p)
    return complex(val)


def _gk(f, a: np.ndarray, b: np.ndarray, fold: bool):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    v = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    vals = f(v).reshape(a.size, 15)
    if fold:
        vals = vals.real
    else:
        vals = 0.5 * (vals + f(-v).reshape(a.size, 15)).real
    k = half * (vals @ _WKF)
    g = half * (vals @ _WGF)
    mx = np.max(np.abs(vals), axis=1)
    return k, np.abs(k - g), mx


def bromwich(d: DimensionlessArgs, contour: ContourSpec | None = None, fold: bool = True,
             max_panels: int = 4000) -> BromwichResult:
    """Evaluate I(lam, b, x, y) by adaptive Gauss-Kronrod on the Bromwich line.

    ``fold=False`` integrates g(s) and g(conj s) separately instead of using
    g(conj s) = conj g(s); it exists as a self-test of the folding.
    """
    contour = contour or ContourSpec()
    tol = contour.tol
    if contour.abscissa is None:
        c, hc, width = saddle_abscissa(d)
    else:
        c = contour.abscissa
        hc = float(_h_real(d, c)[0])
        width = c
    # near the real axis the scaled integrand is ~1, so J is of order width
    scale = min(width, 1.0)
    f = _Integrand(d, c, hc, abs_target=1e-2 * tol * scale)

    w0 = contour.step if contour.step is not None else min(width, math.pi / d.lam) / 2.0
    cut = contour.im_cut
    edges = [0.0]
    while edges[-1] < 4.0 * width and (cut is None or edges[-1] < cut):
        edges.append(edges[-1] + w0)
    a = np.array(edges[:-1])
    b = np.array(edges[1:])
    k, e, mx = _gk(f, a, b, fold)
    # extend until two consecutive panels are negligible
    quiet = 0
    while cut is None or b[-1] < cut:
        total = abs(k.sum())
        last = abs(k[-1]) + mx[-1] * (b[-1] - a[-1])
        quiet = quiet + 1 if last < 1e-3 * tol * max(total, 1e-300) else 0
        if quiet >= 2:
            break
        if a.size > max_panels:
            raise QuadratureError(f"contour did not decay after {a.size} panels (v up to {b[-1]:.4g})")
        wid = min((b[-1] - a[-1]) * 1.25, 50.0 * w0 + b[-1] * 0.1)
        na = np.array([b[-1]])
        nb = na + wid
        if cut is not None:
            nb = np.minimum(nb, cut)
        nk, ne, nmx = _gk(f, na, nb, fold)
        a, b = np.append(a, na), np.append(b, nb)
        k, e, mx = np.append(k, nk), np.append(e, ne), np.append(mx, nmx)
    v_cut = float(b[-1])
    n_osc = d.lam * v_cut / (2.0 * math.pi)
    if n_osc > max_panels:
        raise QuadratureError(
            f"about {n_osc:.3g} oscillations of e^(lam s) before the integrand decays; "
            "the residue series (method='eigen') converges fast in this regime"
        )
    # pointwise noise integrates over the whole line; if that could swamp
    # the target, tighten the acceptance threshold and redo the panels
    need = 1e-2 * tol * max(abs(k.sum()), 1e-300) / max(v_cut, 1.0)
    if need < f.abs_target:
        f.abs_target = need
        k, e, mx = _gk(f, a, b, fold)

    # refine
    for _ in range(60):
        total = k.sum()
        target = 0.1 * tol * max(abs(total), 1e-300)
        if e.sum() <= target:
            break
        split = e > target / a.size
        if not split.any():
            split = e >= e.max()
        keep = ~split
        mids = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mids])
        nb = np.concatenate([mids, b[split]])
        nk, ne, nmx = _gk(f, na, nb, fold)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        k = np.concatenate([k[keep], nk])
        e = np.concatenate([e[keep], ne])
        mx = np.concatenate([mx[keep], nmx])
        if a.size > max_panels:
            raise QuadratureError(f"refinement exceeded {max_panels} panels")
    else:
        raise QuadratureError("Gauss-Kronrod refinement did not converge")

    total = float(k.sum())
    rel_err = float(e.sum()) / abs(total) if total != 0 else math.inf
    if total > 0:
        log_val = hc + math.log(total / math.pi)
        raw = math.exp(log_val) if log_val < 709 else math.inf
    else:
        log_val = -math.inf
        raw = total / math.pi * math.exp(min(hc, 709.0))
    value = min(max(raw, 0.0), 1.0)
    excursion = abs(value - raw)
    if excursion > tol * max(abs(value), 1e-300):
        warnings.warn(f"Bromwich value {raw!r} clamped to [0, 1]", ClampWarning, stacklevel=2)
    return BromwichResult(
        value=value,
        log_value=log_val,
        abscissa=c,
        width=width,
        im_cut=v_cut,
        error_estimate=rel_err,
        n_evals=f.n_evals,
        n_escalated=f.n_escalated,
        raw_value=raw,
    )


def bromwich_I(d: DimensionlessArgs, contour: ContourSpec | None = None) -> float:
    return bromwich(d, contour).value


def bromwich_log_I(d: DimensionlessArgs, contour: ContourSpec | None = None) -> float:
    return bromwich(d, contour).log_value


def cir_running_max_cdf(p: CirParams, method: str = "bromwich", log: bool = False, tol: float = 1e-10) -> float:
    """P[max_{0<=s<=t} X_s >= z] by ``bromwich``, ``eigen``, ``asymp_small_y`` or ``asymp_fixed_y``."""
    if p.z <= p.x0:
        return 0.0 if log else 1.0
    d = p.dimensionless()
    if method == "bromwich":
        r = bromwich(d, ContourSpec(tol=tol))
        return r.log_value if log else r.value
    if method == "eigen":
        from .eigen import eigen_I

        v = eigen_I(d, tol=tol)
        return math.log(v) if log else v
    if method in ("asymp_small_y", "asymp_fixed_y"):
        from .asymptotics import cir_tail_asymp

        return cir_tail_asymp(p, method.removeprefix("asymp_"), log=log)
    raise ValueError(f"unknown method {method!r}")
