"""Optional figures for the CLI report commands.  Needs matplotlib (extra ``plot``)."""

from __future__ import annotations

import math


def _plt():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("figure output needs matplotlib: pip install 'cirmax[plot]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"figure.figsize": (6.0, 4.0), "axes.grid": True, "grid.alpha": 0.3,
                         "savefig.dpi": 150, "savefig.bbox": "tight"})
    return plt


def _log10(v):
    return math.log10(v) if v and v > 0 else math.nan


def tail_figure(rows: list[dict], path: str, title: str = "") -> str:
    """log10 tail probability against z for every method column present in ``rows``."""
    plt = _plt()
    fig, ax = plt.subplots()
    z = [r["z"] for r in rows]
    styles = {"p_bromwich": "-", "p_eigen": "--", "p_asymp": ":"}
    for col, ls in styles.items():
        if any(col in r and r[col] is not None for r in rows):
            ax.plot(z, [r.get("log10_" + col[2:], _log10(r.get(col))) for r in rows], ls, label=col[2:])
    mc = [(r["z"], r["p_mc"], r["stderr"]) for r in rows if r.get("p_mc")]
    if mc:
        zz, pp, ee = zip(*mc)
        lo = [_log10(p - 2 * e) if p > 2 * e else _log10(p) - 1 for p, e in zip(pp, ee)]
        hi = [_log10(p + 2 * e) for p, e in zip(pp, ee)]
        mid = [_log10(p) for p in pp]
        ax.errorbar(zz, mid, yerr=[[m - l for m, l in zip(mid, lo)], [h - m for m, h in zip(mid, hi)]],
                    fmt="o", ms=3, capsize=2, label="monte carlo (2 se)")
    ax.set_xlabel("level z")
    ax.set_ylabel("log10 P[max X >= z]")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)
    return path


def ratio_figure(rows: list[dict], path: str, key: str = "ratio", xkey: str = "z") -> str:
    plt = _plt()
    fig, ax = plt.subplots()
    ax.plot([r[xkey] for r in rows], [r[key] for r in rows], "o-")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_xlabel(xkey)
    ax.set_ylabel("numeric / asymptotic")
    fig.savefig(path)
    plt.close(fig)
    return path


def scan_figure(reports: list[dict], path: str) -> str:
    plt = _plt()
    fig, ax = plt.subplots()
    for rep in reports:
        p = rep["params"]
        ax.plot(rep["grid"], rep["extra"]["log_quotient"], lw=1,
                label=f"b={p['b']:g}, x={p['x']:g}, y={p['y']:g}")
    ax.set_xlabel("v")
    ax.set_ylabel("log |quotient|")
    ax.legend(fontsize=6)
    fig.savefig(path)
    plt.close(fig)
    return path
