"""Monte Carlo estimate of P[max_{0<=s<=t} X_s >= z] for the CIR diffusion.

Paths are simulated in fixed-size blocks.  Block j draws from a Philox
stream keyed by the seed with j in the counter's top word, so results do not
depend on how blocks are scheduled across threads.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .params import CirParams, marginal_tail_rate

__all__ = [
    "McEstimate",
    "RateReport",
    "SimConfig",
    "default_threads",
    "mc_running_max_tail",
    "mc_terminal_mean",
    "rate_check",
    "simulate",
]

BLOCK = 8192
THREADS_ENV = "CIRMAX_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return 1


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 100_000
    n_steps: int = 4096
    seed: int = 20240611
    scheme: str = "exact_transition"

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ValueError("n_paths and n_steps must be >= 1")
        if self.scheme not in ("exact_transition", "full_truncation_euler"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    stderr: float
    n_hits: int
    n_paths: int

    @classmethod
    def from_hits(cls, hits: int, n: int) -> "McEstimate":
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), int(hits), int(n))


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))


def _block(p: CirParams, cfg: SimConfig, levels: np.ndarray, block: int, n: int):
    """Simulate ``n`` paths; return hit counts per level and the sum/sumsq of X_t."""
    rng = _rng(cfg.seed, block)
    dt = p.t / cfg.n_steps
    x = np.full(n, p.x0)
    running = np.full(n, p.x0)
    if cfg.scheme == "exact_transition":
        e = math.exp(-p.beta * dt)
        c = 4.0 * p.beta / (p.sigma**2 * (1.0 - e))
        df = 4.0 * p.alpha / p.sigma**2
        for _ in range(cfg.n_steps):
            x = rng.noncentral_chisquare(df, c * e * x) / c
            np.maximum(running, x, out=running)
    else:
        sq = math.sqrt(dt)
        for _ in range(cfg.n_steps):
            xp = np.maximum(x, 0.0)
            x = x + (p.alpha - p.beta * xp) * dt + p.sigma * np.sqrt(xp) * sq * rng.standard_normal(n)
            np.maximum(running, x, out=running)
    hits = (running[None, :] >= levels[:, None]).sum(axis=1)
    return hits, float(x.sum()), float((x * x).sum())


def simulate(p: CirParams, cfg: SimConfig, levels=None, threads: int | None = None):
    """Hit counts for every level in ``levels`` (default: p.z) and terminal moments."""
    levels = np.atleast_1d(np.asarray(levels if levels is not None else [p.z], dtype=float))
    threads = threads or default_threads()
    sizes = [BLOCK] * (cfg.n_paths // BLOCK)
    if cfg.n_paths % BLOCK:
        sizes.append(cfg.n_paths % BLOCK)
    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            out = list(ex.map(lambda j: _block(p, cfg, levels, j[0], j[1]), jobs))
    else:
        out = [_block(p, cfg, levels, j, n) for j, n in jobs]
    hits = sum(o[0] for o in out)
    s1 = sum(o[1] for o in out)
    s2 = sum(o[2] for o in out)
    return hits, s1, s2


def mc_running_max_tail(p: CirParams, cfg: SimConfig, levels=None, threads: int | None = None):
    """Fraction of paths whose monitored running maximum reaches z.

    With ``levels`` given, a list of estimates (one per level) from the same
    paths is returned.  Levels at or below x0 give p_hat = 1.
    """
    hits, _, _ = simulate(p, cfg, levels, threads)
    ests = [McEstimate.from_hits(int(h), cfg.n_paths) for h in hits]
    return ests if levels is not None else ests[0]


def mc_terminal_mean(p: CirParams, cfg: SimConfig) -> tuple[float, float, float]:
    """Sample mean of X_t, its standard error, and the exact mean."""
    _, s1, s2 = simulate(p, cfg)
    n = cfg.n_paths
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    e = math.exp(-p.beta * p.t)
    exact = p.x0 * e + p.alpha / p.beta * (1.0 - e)
    return mean, math.sqrt(var / n), exact


def run_json(p: CirParams, cfg: SimConfig, levels=None) -> str:
    t0 = time.perf_counter()
    ests = mc_running_max_tail(p, cfg, levels=levels if levels is not None else [p.z])
    lv = levels if levels is not None else [p.z]
    return json.dumps(
        {
            "schema": 1,
            "params": asdict(p),
            "config": asdict(cfg),
            "estimates": [dict(asdict(e), z=float(z)) for e, z in zip(ests, lv)],
            "wall_seconds": time.perf_counter() - t0,
        },
        indent=2,
    )


@dataclass
class RateReport:
    z: list
    log_p: list
    slopes: list
    target: float
    rel_error: float
    approaching: bool
    ok: bool
    tolerance: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = 1
        return d


def rate_check(p: CirParams, z_grid, tol: float = 0.05, method: str = "bromwich") -> RateReport:
    """Fit log P[max >= z] against z and compare the slope with the marginal-tail rate.

    Slopes are finite differences between neighbouring grid points; the last
    one is compared with -(beta/sigma^2)(1 + coth(beta t / 2)).
    """
    from .inversion import cir_running_max_cdf

    z = sorted(float(v) for v in z_grid)
    if len(z) < 2:
        raise ValueError("need at least two grid points")
    logs = [cir_running_max_cdf(p.replace(z=zi), method=method, log=True) for zi in z]
    slopes = [(l1 - l0) / (z1 - z0) for z0, z1, l0, l1 in zip(z, z[1:], logs, logs[1:])]
    target = marginal_tail_rate(p.beta, p.sigma, p.t)
    errs = [abs(s / target - 1.0) for s in slopes]
    rel = errs[-1]
    approaching = all(e1 <= e0 for e0, e1 in zip(errs, errs[1:]))
    return RateReport(z, logs, slopes, target, rel, approaching, bool(rel < tol), tol)
