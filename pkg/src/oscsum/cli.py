"""Command-line front end: ``oscsum <subcommand> [options]``.

Every subcommand writes CSV (to ``--output`` or standard output) whose
first line is ``# config: ...`` echoing the resolved options. Exit codes:
0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import acceptance, exppair, forms, parallel
from .deltamethod import DeltaScheme, dfi_delta
from .errors import OscsumError
from .quad import PhaseSpec, make_window, plateau_window

log = logging.getLogger("oscsum")

# Options that only affect execution, not results; left out of the echoed config.
_EXECUTION_ONLY = {"threads", "output", "func"}


class CheckFailed(Exception):
    """Raised by a subcommand whose own check did not pass."""


def fmt(x) -> str:
    """17 significant digits; integers and fractions unchanged."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer, Fraction, str)):
        return str(x)
    return f"{float(x):.17g}"


class Output:
    """CSV sink with the ``# config:`` line first."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.buffer = io.StringIO()
        items = sorted((k, v) for k, v in vars(args).items() if k not in _EXECUTION_ONLY)
        self.buffer.write("# config: " + " ".join(f"{k}={v}" for k, v in items) + "\n")
        self.writer = csv.writer(self.buffer, lineterminator="\n")

    def header(self, *names: str) -> None:
        self.writer.writerow(names)

    def row(self, *values) -> None:
        self.writer.writerow([fmt(v) for v in values])

    def flush(self) -> None:
        text = self.buffer.getvalue()
        if self.args.output:
            Path(self.args.output).write_text(text)
        else:
            sys.stdout.write(text)


def _weights(text: str) -> tuple[int, int]:
    try:
        k, kappa = (int(s) for s in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("weights must look like 12,16") from exc
    return k, kappa


def _phase(text: str, alpha: float) -> PhaseSpec:
    if text == "log":
        return PhaseSpec("log", alpha)
    if text.startswith("pow:"):
        return PhaseSpec("power", alpha, float(Fraction(text[4:])))
    raise argparse.ArgumentTypeError("phase must be 'log' or 'pow:<beta>'")


def _grid(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _table(weight: int, N: float) -> forms.FourierTable:
    return forms.load_eigenform(weight, int(math.ceil(N)))


# ---------------------------------------------------------------- subcommands


def cmd_coeffs(args, out: Output) -> None:
    table = _table(args.weight, args.N)
    out.header("n", "lambda")
    for n in range(1, table.N + 1):
        out.row(n, table.values[n])


def cmd_twist(args, out: Output) -> None:
    from .twist import TwistSpec, default_window, eval_twist_sum

    k, kappa = args.weights
    window = default_window(args.t)
    length = math.ceil(max(3.0, window.support[1]) * args.X)
    spec = TwistSpec(_phase(args.phase, args.alpha), args.t, args.X, window)
    S = eval_twist_sum(_table(k, length), _table(kappa, length), spec)
    out.header("t", "X", "S_re", "S_im", "abs_S", "in_regime")
    out.row(args.t, args.X, S.real, S.imag, abs(S), spec.in_regime)


def _read_grid_file(path: str) -> list[tuple[float, float]]:
    import pandas as pd

    frame = pd.read_csv(path, comment="#")
    if not {"t", "X"} <= set(frame.columns):
        raise argparse.ArgumentTypeError("grid file needs columns t and X")
    return [(float(t), float(X)) for t, X in zip(frame["t"], frame["X"])]


def cmd_harness(args, out: Output) -> None:
    from .twist import harness_grid, harness_window, theorem1_harness

    k, kappa = args.weights
    grid = _read_grid_file(args.grid) if args.grid else harness_grid()
    Xmax = max(X for _, X in grid)
    length = math.ceil(max(3.0, harness_window().support[1]) * Xmax)
    rep = theorem1_harness(_table(k, length), _table(kappa, length), _phase(args.phase, args.alpha), grid)
    out.header("t", "X", "S_re", "S_im", "c_star", "c_star_log")
    for p in rep.points:
        out.row(p.t, p.X, p.S.real, p.S.imag, p.c_star, p.c_star_log)
    for t, X in rep.skipped:
        log.warning("skipped (t=%g, X=%g): outside t^(8/5) < X < t^(12/5)", t, X)
    print(f"max C* = {rep.max_c_star:.6g}, P90 growth exponent = {rep.growth_exponent:.4f}", file=sys.stderr)


def cmd_gl5(args, out: Output) -> None:
    from .twist import gl5_partial_sum_check, l_value_rankin

    f, g = acceptance.pair_tables(max(acceptance.PAIR_LENGTH, args.Xmax))
    lv = l_value_rankin(f, g)
    Xs = [args.Xmax / 4**j for j in range(8) if args.Xmax / 4**j >= 1000][::-1]
    rep = gl5_partial_sum_check(f, g, Xs, lv.value)
    out.header("X", "A", "L1_X", "E", "E_over_X_two_thirds")
    for X, A, E, ratio in zip(rep.Xs, rep.A, rep.E, rep.ratios):
        out.row(X, A, lv.value * X, E, ratio)
    print(f"fitted error exponent {rep.fitted_exponent:.4f}", file=sys.stderr)


def cmd_lvalue(args, out: Output) -> None:
    from .twist import L_SCHEDULES, l_value_rankin

    k, kappa = args.weights
    length = acceptance.PAIR_LENGTH
    lv = l_value_rankin(_table(k, length), _table(kappa, length), target=args.tol or 1e-4)
    out.header("T", "exponential", "gaussian")
    for T, e, g in zip(L_SCHEDULES, lv.exponential, lv.gaussian):
        out.row(T, e, g)
    out.header("L1", "exponential_limit", "gaussian_limit", "agreement")
    out.row(lv.value, lv.exponential_limit, lv.gaussian_limit, lv.agreement)


def cmd_voronoi(args, out: Output) -> None:
    from .voronoi import VoronoiInstance, voronoi_check

    table = _table(args.weight, max(200_000, 3 * args.X))
    res = voronoi_check(VoronoiInstance(table, args.q, args.a, args.X, acceptance.VORONOI_WINDOW))
    out.header("lhs_re", "lhs_im", "rhs_re", "rhs_im", "defect")
    out.row(res.lhs.real, res.lhs.imag, res.rhs.real, res.rhs.imag, res.defect)
    if res.defect > (args.tol or 1e-6):
        raise CheckFailed(f"voronoi.voronoi_check: defect {res.defect:.3e} exceeds {args.tol or 1e-6:.0e}")


def cmd_resonance(args, out: Output) -> None:
    from .voronoi import resonance_sum

    table = _table(args.weight, 3 * args.X)
    res = resonance_sum(table, args.q, args.X, make_window(1.0, 2.0, 4.0))
    out.header("X", "sum_re", "sum_im", "main_re", "main_im", "residual")
    out.row(args.X, res.sum.real, res.sum.imag, res.main_term.real, res.main_term.imag, res.residual)


def cmd_delta(args, out: Output) -> None:
    scheme = DeltaScheme.standard(args.Q)
    tol = args.tol or 1e-7
    out.header("n", "value", "defect")
    worst = 0.0
    for n in range(-args.nmax, args.nmax + 1):
        value = dfi_delta(n, scheme)
        defect = abs(value - (1.0 if n == 0 else 0.0))
        worst = max(worst, defect)
        out.row(n, value, defect)
    if worst > tol:
        raise CheckFailed(f"deltamethod.dfi_delta: defect {worst:.3e} exceeds {tol:.0e}")


def cmd_phase(args, out: Output) -> None:
    from . import phase as ph

    grid = _grid(args.grid) if args.grid else None
    kind = PHASE_CHECKS[args.lemma]
    w = make_window(1.0, 2.0, 4.0)
    out.header("check", "parameter", "measured", "predicted")
    if kind == "nonstationary":
        for R in grid or [1e2, 1e3, 1e4]:
            rep = ph.nonstationary_decay_check(
                w, lambda y: R * y, lambda y: np.full_like(y, R), ph.DecayParams(1, 0.25, 1, 1, R), A=3
            )
            out.row(kind, R, abs(rep.integral), rep.bound)
    elif kind == "stationary":
        for H in grid or [1e3, 1e4, 1e5]:
            rep = ph.stationary_leading_term(w, *acceptance.cubic_phase(H))
            out.row(kind, H, rep.ratio_defect, 1.0 / H)
    elif kind == "second-derivative":
        w0 = make_window(-1.0, 1.0, 4.0)
        for lam in grid or [1e1, 1e2, 1e3, 1e4]:
            rep = ph.second_derivative_bound_check(
                w0, lambda y: lam * y * y / 2, lambda y: lam * y, lambda y: np.full_like(y, lam), lam
            )
            out.row(kind, lam, abs(rep.integral), rep.bound)
    elif kind == "stationary-value":
        t, X, q = 1e4, 1e6, 100
        for frac in grid or [0.01, 0.02, 0.05]:
            ctx = ph.PhaseContext(
                q=q, Q=100.0, zeta=1.0, t=t, X=X, m=(3098.0 * q / 2) ** 2 / X, n=(frac * t * q / 2) ** 2 / X,
                phase=PhaseSpec("log", 1 / (2 * np.pi)),
            )
            quad = ph.eval_paper_integrals(ctx, "Ifrak", tol=1e-12)
            out.row(kind, frac, abs(quad - ph.i_frak_leading(ctx)), 20 * t**-1.5)
    else:
        ctx = acceptance.h_context(625)
        for x in grid or [0.0, 1.0, 4.0, 16.0, 64.0]:
            val = abs(ph.eval_H(x, ctx))
            out.row(kind, x, val, acceptance.H_CONSTANT / (ctx.t * max(1.0, np.sqrt(abs(x)))))


def cmd_exppair(args, out: Output) -> None:
    objective = exppair.LinearFractional.parse(args.objective)
    res = exppair.optimize(objective, exppair.generate(args.depth))
    out.header("p", "q", "value", "derivation")
    for pair in sorted(res.values):
        out.row(pair.p, pair.q, res.values[pair], pair.word())
    out.header("best_p", "best_q", "best_value")
    out.row(res.best.p, res.best.q, res.value)


def cmd_verify(args, out: Output) -> None:
    from .verify import run_fast

    out.header("criterion", "check", "measured", "threshold", "passed")
    if args.level == "fast":
        results = run_fast(fault=args.fault)
    else:
        results = acceptance.run_criteria()
    failures = []
    for res in results:
        for c in res.checks:
            out.row(res.number, c.name, c.measured, c.threshold, c.passed)
        print(res.line(), file=sys.stderr)
        if not res.passed and not failures:
            failures.append(res)
    if failures:
        res = failures[0]
        bad = next((c for c in res.checks if not c.passed), None)
        detail = f"{bad.name}: expected <= {bad.threshold:.6g}, got {bad.measured:.6g}" if bad else "over time budget"
        where = res.title if args.level == "fast" else f"{acceptance.OPERATIONS[res.number]} (criterion {res.number})"
        raise CheckFailed(f"first failure: {where}: {detail}")


# ---------------------------------------------------------------- parser

PHASE_CHECKS = {
    "nonstationary": "nonstationary", "stationary": "stationary", "second-derivative": "second-derivative",
    "stationary-value": "stationary-value", "correlation": "correlation",
    "3.5": "nonstationary", "3.6": "stationary", "3.7": "second-derivative", "4.1": "stationary-value",
    "4.2": "correlation",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--output", default=None, help="CSV path (default: standard output)")
    common.add_argument("--cache-dir", default=None, help="coefficient cache directory")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")

    parser = argparse.ArgumentParser(prog="oscsum", description="Oscillatory-sum verification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="normalized Hecke eigenvalues")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("twist", parents=[common], help="one twisted sum S(X, t)")
    p.add_argument("--weights", type=_weights, default=(12, 16))
    p.add_argument("--phase", default="log")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--X", type=float, required=True)
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("harness-thm1", parents=[common], help="normalized twisted sums over a (t, X) grid")
    p.add_argument("--grid", default=None, help="CSV file with columns t,X")
    p.add_argument("--weights", type=_weights, default=(12, 16))
    p.add_argument("--phase", default="log")
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(func=cmd_harness)

    p = sub.add_parser("gl5", parents=[common], help="degree-five partial sums against L(1) X")
    p.add_argument("--Xmax", type=int, required=True)
    p.set_defaults(func=cmd_gl5)

    p = sub.add_parser("lvalue", parents=[common], help="L(1, f x g) with its certificate")
    p.add_argument("--weights", type=_weights, default=(12, 16))
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("voronoi-check", parents=[common], help="both sides of the Voronoi identity")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--X", type=float, required=True)
    p.set_defaults(func=cmd_voronoi)

    p = sub.add_parser("resonance", parents=[common], help="resonance sum against its main term")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--X", type=float, required=True)
    p.set_defaults(func=cmd_resonance)

    p = sub.add_parser("delta-check", parents=[common], help="delta-method identity for |n| <= nmax")
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("phase-check", parents=[common], help="stationary-phase estimates on a grid")
    p.add_argument("--lemma", choices=list(PHASE_CHECKS), required=True)
    p.add_argument("--grid", default=None, help="comma-separated parameter values")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("exppair", parents=[common], help="exponent pairs minimizing an objective")
    p.add_argument("--objective", default=str(exppair.BALANCE_OBJECTIVE))
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_exppair)

    p = sub.add_parser("verify-all", parents=[common], help="fast self-test or the full release criteria")
    p.add_argument("level", choices=["fast", "full"], nargs="?", default="fast")
    p.add_argument("--fault", choices=["coefficients"], default=None, help="inject a fault to exercise the gate")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.cache_dir:
        os.environ[forms.CACHE_ENV] = args.cache_dir
    try:
        parallel.set_threads(args.threads)
    except ValueError as exc:
        parser.error(str(exc))
    out = Output(args)
    try:
        args.func(args, out)
    except CheckFailed as exc:
        out.flush()
        print(f"FAIL {exc}", file=sys.stderr)
        return 1
    except (argparse.ArgumentTypeError, OscsumError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.flush()
    return 0


def verify_all(level: str = "fast", threads: int = 1, output: str | None = None) -> int:
    """Run ``verify-all`` in process and return its exit code."""
    argv = ["verify-all", level, "--threads", str(threads)]
    if output:
        argv += ["--output", output]
    return run(argv)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
