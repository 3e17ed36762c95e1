"""Command-line interface: ``cirmax <command> [options]``.

Exit codes: 0 success, 1 a numerical check failed, 2 usage error.
Numbers are written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

from .params import CirParams

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
METHODS = ("bromwich", "eigen", "asymp_small_y", "asymp_fixed_y")

# ten parameter sets for the quotient scan: (lam, b, x, y)
SCAN_PRESETS = [
    (1.0, 1.0, 10.0, 1.0), (1.0, 0.5, 10.0, 1.0), (1.0, 2.5, 10.0, 1.0), (0.5, 1.0, 10.0, 1.0),
    (2.0, 1.0, 10.0, 1.0), (1.0, 1.0, 20.0, 1.0), (1.0, 1.0, 10.0, 5.0), (1.0, 1.0, 5.0, 0.1),
    (0.25, 1.0, 30.0, 3.0), (3.0, 2.0, 15.0, 0.5),
]


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _methods(text: str) -> list[str]:
    ms = [t.strip() for t in text.split(",") if t.strip()]
    bad = [m for m in ms if m not in METHODS]
    if bad or not ms:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return ms


def _write(rows: list[dict], args, payload: dict | None = None) -> None:
    """Rows as CSV, or rows plus ``payload`` as schema-1 JSON."""
    if args.format == "json":
        doc = {"schema": 1, "command": args.command}
        if payload:
            doc.update(payload)
        doc.setdefault("rows", rows)
        text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            cols = list(rows[0])
            for r in rows[1:]:
                cols += [c for c in r if c not in cols]
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: fmt(r.get(k)) for k in cols})
        text = buf.getvalue()
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    try:
        return float(o)
    except (TypeError, ValueError):
        return str(o)


def _cir(args, z=None) -> CirParams:
    return CirParams(args.alpha, args.beta, args.sigma, args.x0, args.t, z if z is not None else args.z[0])



# ---------------------------------------------------------------------------
# commands


def cmd_tail(args) -> int:
    from .inversion import cir_running_max_cdf

    rows, status = [], EXIT_OK
    for z in args.z:
        p = _cir(args, z)
        vals = {}
        for m in args.method:
            lv = cir_running_max_cdf(p, method=m, log=True, tol=args.tol)
            vals[m] = lv
            rows.append({"z": z, "method": m, "value": math.exp(lv) if lv > -745 else 0.0, "log_value": lv})
        if "bromwich" in vals and "eigen" in vals:
            dev = abs(math.expm1(vals["eigen"] - vals["bromwich"]))
            if dev > args.agree:
                status = EXIT_CHECK
                print(f"bromwich and eigen differ by {dev:.3g} at z={z}", file=sys.stderr)
    _write(rows, args)
    return status


def cmd_zeros(args) -> int:
    from .eigen import find_zeros

    zt = find_zeros(args.b, args.x, args.count)
    rows = zt.to_rows()
    worst = max(float(r) for r in zt.residuals)
    _write(rows, args, {"b": args.b, "x": args.x, "max_residual": worst})
    return EXIT_OK if worst < args.max_residual else EXIT_CHECK


def cmd_asymp(args) -> int:
    from .asymptotics import cir_tail_asymp
    from .inversion import cir_running_max_cdf

    modes = ["small_y", "fixed_y"] if args.mode == "both" else [args.mode]
    rows = []
    for z in args.z:
        p = _cir(args, z)
        lb = cir_running_max_cdf(p, "bromwich", log=True, tol=args.tol)
        row = {"z": z, "log_p_bromwich": lb}
        for m in modes:
            la = cir_tail_asymp(p, m, log=True, literal=args.literal)
            row[f"log_p_{m}"] = la
            row[f"ratio_{m}"] = math.exp(lb - la)
        rows.append(row)
    _write(rows, args)
    if args.plot:
        from .plotting import ratio_figure

        ratio_figure(rows, args.plot, key=f"ratio_{modes[0]}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .positivity import g_positivity, recA_check, recG_check, v_table_direct, verify_nonneg

    tbl = v_table_direct(args.a, args.b, args.depth, cap=max(args.depth, 80))
    ra = recA_check(tbl, violations=True)
    rg = recG_check(tbl, violations=True)
    nn = verify_nonneg(args.a, args.b, args.depth, args.depth, tbl=tbl)
    report = {
        "a": str(tbl.a), "b": str(tbl.b), "depth": args.depth,
        "recA_violations": ra, "recG_violations": rg,
        "nonneg": json.loads(nn.to_json()),
    }
    if args.g_nmax:
        g = g_positivity(args.g_nmax)
        report["g_positivity"] = {"n_max": g.n_max, "samples": len(g.samples),
                                  "negatives": g.negatives, "min_values": g.min_values, "note": g.note}
    failed = bool(ra or rg) or (nn.region_verified and not nn.ok) or bool(report.get("g_positivity", {}).get("negatives"))
    report["ok"] = not failed
    args.format = "json"
    _write([], args, report)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_mc(args) -> int:
    from .mc_oracle import SimConfig, mc_running_max_tail

    cfg = SimConfig(args.paths, args.steps, args.seed, args.scheme)
    p = _cir(args, max(args.z))
    ests = mc_running_max_tail(p, cfg, levels=args.z, threads=args.threads)
    rows = [dict(z=z, **asdict(e)) for z, e in zip(args.z, ests)]
    _write(rows, args, {"config": asdict(cfg), "params": {k: v for k, v in asdict(p).items() if k != "z"}})
    return EXIT_OK


def cmd_compare(args) -> int:
    from .asymptotics import cir_tail_asymp
    from .inversion import cir_running_max_cdf

    mc = None
    if args.mc_paths:
        from .mc_oracle import SimConfig, mc_running_max_tail

        cfg = SimConfig(args.mc_paths, args.mc_steps, args.seed)
        mc = mc_running_max_tail(_cir(args, max(args.z)), cfg, levels=args.z, threads=args.threads)
    rows, status = [], EXIT_OK
    for i, z in enumerate(args.z):
        p = _cir(args, z)
        lb = cir_running_max_cdf(p, "bromwich", log=True, tol=args.tol)
        le = cir_running_max_cdf(p, "eigen", log=True, tol=args.tol)
        la = cir_tail_asymp(p, args.asymp, log=True)
        row = {
            "z": z,
            "p_bromwich": math.exp(lb), "p_eigen": math.exp(le), "p_asymp": math.exp(la),
            "log10_bromwich": lb / math.log(10), "log10_eigen": le / math.log(10), "log10_asymp": la / math.log(10),
            "dev_eigen_bromwich": abs(math.expm1(le - lb)),
            "ratio_bromwich_asymp": math.exp(lb - la),
        }
        if mc is not None:
            row.update(p_mc=mc[i].p_hat, stderr=mc[i].stderr,
                       z_score_mc=(mc[i].p_hat - math.exp(lb)) / mc[i].stderr if mc[i].stderr else None)
        if row["dev_eigen_bromwich"] > args.agree:
            status = EXIT_CHECK
        rows.append(row)
    _write(rows, args)
    if args.plot:
        from .plotting import tail_figure

        tail_figure(rows, args.plot, title=f"alpha={args.alpha:g} beta={args.beta:g} sigma={args.sigma:g} "
                                             f"x0={args.x0:g} t={args.t:g}")
    return status


def cmd_scan(args) -> int:
    from .asymptotics import saddle_data
    from .positivity import conjecture_scan

    sets = SCAN_PRESETS if args.preset else [(args.lam, args.b, args.x, args.y)]
    if not args.preset and None in sets[0]:
        raise UsageError("give --lam, --b, --x and --y, or --preset")
    n = int(round(args.vmax / args.vstep))
    grid = [i * args.vstep for i in range(n + 1)]
    reports = []
    for lam, b, x, y in sets:
        u0 = saddle_data(lam, b).u0
        rep = conjecture_scan(u0, b, x, y, grid).to_dict()
        rep["params"]["lam"] = lam
        reports.append(rep)
    findings = [
        {"params": r["params"], "worst_increase": r["worst_violation"], "at_v": r["worst_at"]}
        for r in reports if not r["monotone"]
    ]
    rows = [
        dict(lam=r["params"]["lam"], b=r["params"]["b"], x=r["params"]["x"], y=r["params"]["y"],
             u0=r["params"]["u0"], monotone=r["monotone"], worst_increase=r["worst_violation"],
             denominator_increasing=r["extra"]["denominator_increasing"])
        for r in reports
    ]
    _write(rows, args, {"reports": reports, "findings": findings, "gating": False})
    for f in findings:
        print(f"finding: quotient increased by {f['worst_increase']:.3g} (log) at v={f['at_v']} for {f['params']}",
              file=sys.stderr)
    if args.plot:
        from .plotting import scan_figure

        scan_figure(reports, args.plot)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _cir_args(sp, z_required=True):
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--x0", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--z", type=_floats, required=z_required, help="level(s), comma-separated")


def _out_args(sp, default="csv"):
    sp.add_argument("--format", choices=("csv", "json"), default=default)
    sp.add_argument("-o", "--output", default="-", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    from .mc_oracle import default_threads

    ap = argparse.ArgumentParser(prog="cirmax", description="Running-maximum tail of the CIR diffusion.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tail", help="P[max X >= z] by one or more methods")
    _cir_args(sp)
    sp.add_argument("--method", type=_methods, default=["bromwich"])
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--agree", type=float, default=1e-6, help="bromwich/eigen relative agreement")
    _out_args(sp)
    sp.set_defaults(func=cmd_tail)

    sp = sub.add_parser("zeros", help="a-zeros s_k of M(-s, b, x)")
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--max-residual", type=float, default=1e-10)
    _out_args(sp)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("asymp", help="closed-form asymptotics next to numeric values")
    _cir_args(sp)
    sp.add_argument("--mode", choices=("small_y", "fixed_y", "both"), default="both")
    sp.add_argument("--literal", action="store_true", help="use the uncorrected fixed-y constant")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--plot", help="also write a ratio figure (PNG/PDF) to this path")
    _out_args(sp)
    sp.set_defaults(func=cmd_asymp)

    sp = sub.add_parser("verify-positivity", help="exact recurrence and nonnegativity checks")
    sp.add_argument("--a", required=True, help="rational, e.g. 3/2")
    sp.add_argument("--b", required=True, help="rational, e.g. 1/3")
    sp.add_argument("--depth", type=int, default=40)
    sp.add_argument("--g-nmax", type=int, default=0, help="also sample G-coefficients up to this n")
    _out_args(sp, default="json")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("mc", help="Monte Carlo estimate of the tail")
    _cir_args(sp)
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--steps", type=int, default=4096)
    sp.add_argument("--seed", type=int, default=20240611)
    sp.add_argument("--scheme", choices=("exact_transition", "full_truncation_euler"), default="exact_transition")
    sp.add_argument("--threads", type=int, default=default_threads())
    _out_args(sp)
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("compare", help="all methods on a grid of levels")
    _cir_args(sp)
    sp.add_argument("--asymp", choices=("small_y", "fixed_y"), default="fixed_y")
    sp.add_argument("--mc-paths", type=int, default=0)
    sp.add_argument("--mc-steps", type=int, default=4096)
    sp.add_argument("--seed", type=int, default=20240611)
    sp.add_argument("--threads", type=int, default=default_threads())
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--agree", type=float, default=1e-6)
    sp.add_argument("--plot", help="also write a tail figure to this path")
    _out_args(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("scan-conjecture", help="monotonicity scan of the Kummer quotient in Im(a)")
    sp.add_argument("--lam", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--y", type=float)
    sp.add_argument("--preset", action="store_true", help="scan the ten built-in parameter sets")
    sp.add_argument("--vmax", type=float, default=5.0)
    sp.add_argument("--vstep", type=float, default=0.1)
    sp.add_argument("--plot", help="also write a scan figure to this path")
    _out_args(sp, default="json")
    sp.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"cirmax {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
