"""Command-line front end: ``psi-hilfer``.

Subcommands::

    solve <config> [--out DIR] [--N INT] [--tol FLOAT] [--max-iter INT] [--relax FLOAT]
    check <config>
    identities [--psi KIND] [--N INT] [--tol FLOAT]
    convergence [--psi KIND] [--mu LIST] [--N LIST] [--delta FLOAT]
    list-examples

``<config>`` is a file path or the name of a built-in example. ``solve``
and ``check`` accept ``--set section.key=value`` (repeatable) to override
configuration entries. Logging on stderr is controlled by the
``PSI_HILFER_LOG`` environment variable (``quiet``, ``info``, ``debug``).

Exit codes: 0 success; 1 error (bad configuration, solver failure or
failed identity checks); 2 solver did not converge; 3 existence
condition inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import PsiHilferError
from .existence import check_bvp_condition, check_ivp_condition
from .frac_calculus import convergence_study, identity_suite
from .hybrid_bvp import solve_coupled_bvp
from .hybrid_ivp import solve_coupled_ivp
from .psi_core import PsiFunction
from .registry import BUILTINS, DESCRIPTIONS

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CSV_HEADER = ("t", "psi_t", "weight", "z_y", "y", "z_x", "x")

log = logging.getLogger("psi_hilfer")

PSI_CHOICES = ("identity", "log-shift", "power", "exponential")


def _psi_from_name(kind: str) -> PsiFunction:
    return {
        "identity": PsiFunction.identity,
        "log-shift": PsiFunction.log_shift,
        "power": PsiFunction.power,
        "exponential": PsiFunction.exponential,
    }[kind]()


def _setup_logging():
    level = os.environ.get("PSI_HILFER_LOG", "quiet").lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.WARNING))
    log.propagate = False


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _overrides(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise PsiHilferError(f"--set expects section.key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _stem(name: str) -> str:
    stem = Path(name).stem if Path(name).suffix else Path(name).name
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", stem) or "problem"


def write_solution_csv(path, pair, psi) -> None:
    """Write the solution table with header ``t,psi_t,weight,z_y,y,z_x,x``."""
    t = pair.y.mesh.nodes
    tau = psi.tau(t)
    xi = pair.y.xi
    weight = tau ** (1.0 - xi)
    y, x = pair.y.unweighted(), pair.x.unweighted()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for j in range(len(t)):
            yy = "" if np.isnan(y[j]) else repr(float(y[j]))
            xx = "" if np.isnan(x[j]) else repr(float(x[j]))
            w.writerow(
                [repr(float(t[j])), repr(float(psi.eval(t[j]))), repr(float(weight[j])),
                 repr(float(pair.y.values[j])), yy, repr(float(pair.x.values[j])), xx]
            )


def _existence(cfg, problem):
    data = cfg.hypothesis_data(problem)
    rep = check_ivp_condition(data) if cfg.kind == "ivp" else check_bvp_condition(data)
    return data, rep


def _existence_lines(rep, prefix="") -> list[tuple[str, object]]:
    rows = [
        (f"{prefix}lhs", float(rep.lhs)),
        (f"{prefix}margin", float(rep.margin)),
        (f"{prefix}satisfied", bool(rep.satisfied)),
        (f"{prefix}verdict", rep.verdict),
    ]
    rows += [(f"{prefix}term.{k}", float(v)) for k, v in rep.breakdown.items()]
    return rows


def cmd_solve(args) -> int:
    cfg = load_config(args.config, _overrides(args.set))
    problem = cfg.build_problem()
    sc = cfg.solver_config(N=args.N, tol=args.tol, max_iter=args.max_iter, relaxation=args.relax)
    log.info("solving %s (%s) with N=%d", cfg.name, cfg.kind, sc.mesh.N)
    solve = solve_coupled_ivp if cfg.kind == "ivp" else solve_coupled_bvp
    pair = solve(problem, sc)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = _stem(cfg.name)
    csv_path = out / f"{stem}_solution.csv"
    rep_path = out / f"{stem}_report.txt"
    write_solution_csv(csv_path, pair, cfg.psi)

    rows = [
        ("problem", cfg.name),
        ("kind", cfg.kind),
        ("psi", cfg.psi.describe()),
        ("mu", cfg.order.mu),
        ("nu", cfg.order.nu),
        ("xi", cfg.order.xi),
        ("T", cfg.T),
        ("N", sc.mesh.N),
        ("r", sc.mesh.r),
        ("relaxation", sc.relaxation),
        ("converged", pair.converged),
        ("stop_reason", pair.stop_reason),
        ("iterations", pair.iterations),
        ("final_update_norm", pair.final_update_norm),
        ("tolerance", pair.tolerance),
        ("residual_y", pair.residual_y),
        ("residual_x", pair.residual_x),
        ("z_y_at_T", float(pair.y.values[-1])),
        ("z_x_at_T", float(pair.x.values[-1])),
    ]
    if pair.omega is not None:
        om = pair.omega
        rows += [
            ("omega1", om.omega1),
            ("omega2", om.omega2),
            ("denominator1", om.denominator1),
            ("denominator2", om.denominator2),
            ("boundary_defect_y", pair.boundary_defect[0]),
            ("boundary_defect_x", pair.boundary_defect[1]),
        ]
    if cfg.hypothesis is not None:
        _, rep = _existence(cfg, problem)
        rows += _existence_lines(rep, "existence.")
    rows += [("solution_csv", str(csv_path)), ("report_file", str(rep_path))]
    text = "".join(f"{k}: {_fmt(v)}\n" for k, v in rows)
    rep_path.write_text(text)
    sys.stdout.write(text)
    if not pair.converged:
        print(f"warning: no convergence ({pair.stop_reason})", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = load_config(args.config, _overrides(args.set))
    problem = cfg.build_problem()
    _, rep = _existence(cfg, problem)
    rows = [("problem", cfg.name), ("condition", cfg.kind)] + _existence_lines(rep)
    sys.stdout.write("".join(f"{k}: {_fmt(v)}\n" for k, v in rows))
    if rep.heuristic:
        print("note: sampled estimates were used; this is not a certificate", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK if rep.satisfied else EXIT_INCONCLUSIVE


def cmd_identities(args) -> int:
    psi = _psi_from_name(args.psi)
    reports = identity_suite(psi, N=args.N, tolerance=args.tol)
    for r in reports:
        print(r.line())
    failed = sum(not r.passed for r in reports)
    print(f"summary: {len(reports) - failed}/{len(reports)} checks passed (psi={psi.describe()}, N={args.N})")
    return EXIT_OK if failed == 0 else EXIT_ERROR


def _floats(text):
    return [float(s) for s in text.split(",") if s.strip()]


def cmd_convergence(args) -> int:
    psi = _psi_from_name(args.psi)
    rows = convergence_study(psi, _floats(args.mu), [int(n) for n in _floats(args.N)], delta=args.delta)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("mu", "N", "max_rel_err", "estimated_order"))
    for mu, N, err, order in rows:
        w.writerow((repr(mu), N, repr(err), "" if math.isnan(order) else repr(order)))
    return EXIT_OK


def cmd_list(args) -> int:
    for name in BUILTINS:
        print(f"{name:<14} {DESCRIPTIONS.get(name, '')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="psi-hilfer",
        description="Psi-Hilfer fractional calculus and coupled hybrid equation solvers.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a configured problem and write CSV + report")
    s.add_argument("config", help="config file or built-in example name")
    s.add_argument("--out", default=".", help="output directory (default: current)")
    s.add_argument("--N", type=int, default=None, help="mesh intervals")
    s.add_argument("--tol", type=float, default=None, help="update tolerance")
    s.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    s.add_argument("--relax", type=float, default=None, help="damping factor in (0, 1]")
    s.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="evaluate the existence condition")
    c.add_argument("config")
    c.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("identities", help="run the operator identity suite")
    i.add_argument("--psi", choices=PSI_CHOICES, default="identity")
    i.add_argument("--N", type=int, default=1024)
    i.add_argument("--tol", type=float, default=1e-3)
    i.set_defaults(func=cmd_identities)

    v = sub.add_parser("convergence", help="quadrature error table as CSV")
    v.add_argument("--psi", choices=PSI_CHOICES, default="identity")
    v.add_argument("--mu", default="0.3,0.5,0.7", help="comma-separated orders")
    v.add_argument("--N", default="256,512,1024", help="comma-separated increasing N")
    v.add_argument("--delta", type=float, default=1.5, help="power exponent of the test function")
    v.set_defaults(func=cmd_convergence)

    lst = sub.add_parser("list-examples", help="list built-in examples")
    lst.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PsiHilferError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
