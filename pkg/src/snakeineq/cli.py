"""Command-line front end.

Exit codes: 0 when every verification holds, 1 when a mathematical check
fails, 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from typing import Sequence

import numpy as np

from . import extremal, scans
from ._parallel import ordered_map
from .snake import MajorantError, SnakeError, catalog_majorant

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- value parsing ------------------------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``"7"``, ``"3..50"`` (inclusive) or ``"21,41,81"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not an integer list: {text!r}") from None


def parse_doubling(text: str) -> list[int]:
    """``"A..B"`` as the doubling sequence ``(A - r) 2^j + r <= B`` (``r`` = 1 or 2 keeps
    the parity of ``A``); anything else as in :func:`parse_int_list`."""
    text = str(text).strip()
    if ".." not in text:
        return parse_int_list(text)
    lo, hi = parse_int_list(text)[0], parse_int_list(text)[-1]
    r = 1 if lo % 2 else 2
    if lo <= r:
        raise UsageError(f"doubling range needs A > {r}: {text!r}")
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n = 2 * (n - r) + r
    return out


def parse_floats(text: str):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"not a number list: {text!r}") from None
    return vals[0] if len(vals) == 1 else tuple(vals)


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)  # no "-0.0" in output
    return str(v)


# --- config file ----------------------------------------------------------------

CONFIG_KEYS = {
    "case", "a", "b", "c", "l", "m", "coeffs", "n", "k", "format", "out", "grid", "csv_points",
    "expect", "seed", "count", "t",
}


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` comments, blank lines and ``[section]`` headers ignored."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    out = {}
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        if len(val) >= 2 and val[0] == val[-1] and val[0] in "\"'":
            val = val[1:-1]
        out[key] = val
    return out


def apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    for key, val in read_config(args.config).items():
        if not hasattr(args, key):
            raise UsageError(f"key {key!r} does not apply to this command")
        if getattr(args, key) is None:
            setattr(args, key, val)


def case_params(args) -> dict:
    params = {}
    for key in ("a", "b", "c", "l", "m", "coeffs"):
        val = getattr(args, key, None)
        if val is None:
            continue
        if key in ("l", "m"):
            try:
                params[key] = int(val)
            except ValueError:
                raise UsageError(f"--{key} must be an integer") from None
        else:
            params[key] = parse_floats(val)
    return params


# --- output -------------------------------------------------------------------

def emit(header: Sequence[str], rows: list[Sequence], fmt_name: str, out=None) -> None:
    out = out or sys.stdout
    cells = [[fmt(v) for v in row] for row in rows]
    if fmt_name == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(cells)
        return
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


# --- commands -------------------------------------------------------------------

def cmd_snake(args) -> int:
    params = case_params(args)
    for n in parse_int_list(args.n or "8"):
        mu, snake = catalog_majorant(args.case or "unit", params, n)
        prof = extremal.positivity_profile(snake.omega)
        print(f"case={args.case or 'unit'} n={n} s={mu.s} endpoint_orders={mu.endpoint_orders}")
        print("coefficients=" + ",".join(fmt(c) for c in snake.omega.coeffs))
        rows = [(nd.index, nd.x, nd.sign, nd.multiplicity, float(mu(nd.x))) for nd in snake.nodes]
        emit(("index", "x", "sign", "multiplicity", "mu"), rows, args.format or "table")
        k0 = "none up to degree" if prof.k0 is None else prof.k0
        print(f"positivity_k0={k0}")
        print("positivity_margins=" + ",".join(fmt(v) for v in prof.margins))
    return EXIT_OK


def _verify_theorem_main(args) -> int:
    case = args.case or "unit"
    params = case_params(args)
    cells = [(n, k) for n in parse_int_list(args.n or "8") for k in parse_int_list(args.k or "1")]
    for n, _ in cells:
        catalog_majorant(case, params, n)  # surface constraint errors before the sweep
    reports = ordered_map(lambda c: extremal.verify_theorem_main(case, params, *c), cells)
    expect = args.expect or extremal.Verdict.CONFIRMS.value
    rows = [r.csv_row() for r in reports]
    emit(extremal.ExtremalReport.CSV_FIELDS, rows, args.format or "table")
    return EXIT_OK if all(r.verdict.value == expect for r in reports) else EXIT_FAIL


def _tau_max_row(n):
    r = scans.tau_scan(n, extrema=False)
    x, t = r.argmax
    Tt = math.cos(n * math.acos(max(-1.0, min(1.0, t))))
    ok = (n * n - 1e-5 <= r.global_max <= n * n * (1 + 1e-9) and abs(x) == 1.0
          and abs(Tt - 1.0) <= 1e-6)
    return (n, r.global_max, x, t, r.interior_max, ok)


def _verify_tau_max(args) -> int:
    rows = ordered_map(_tau_max_row, parse_int_list(args.n or "3..20"))
    emit(("n", "global_max", "x", "t", "interior_max", "pass"), rows, args.format or "table")
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_FAIL


def _check_rows(fn, ns):
    out = []
    for n in ns:
        res = fn(n)
        out.append((n, res.passed, res.margin, res.details))
    return out


def _verify_fg(args) -> int:
    rows = _check_rows(scans.fg_bound_check, parse_int_list(args.n or "3"))
    emit(("n", "pass", "margin", "details"), rows, args.format or "table")
    return EXIT_OK if all(r[1] for r in rows) else EXIT_FAIL


def _verify_tau_second(args) -> int:
    rows = _check_rows(scans.tau_second_deriv_check, parse_int_list(args.n or "3..50"))
    emit(("n", "pass", "margin", "details"), rows, args.format or "table")
    return EXIT_OK if all(r[1] for r in rows) else EXIT_FAIL


def _verify_prop_dd(args) -> int:
    reps = ordered_map(scans.verify_prop_DD, parse_int_list(args.n or "3..16"))
    rows = [(r.n, r.critical_points, r.worst_margin_a, r.d23_roots, r.max_abs_tau_dx, r.passed)
            for r in reps]
    emit(("n", "critical_points", "margin_a", "d23_roots", "max_abs_tau_dx", "pass"), rows,
         args.format or "table")
    return EXIT_OK if all(r.passed for r in reps) else EXIT_FAIL


def random_rooted_polys(count: int, seed: int, max_degree: int = 12):
    """Random polynomials with all roots in [-1, 1] (degree 2..max_degree)."""
    from .chebcore import from_roots

    rng = np.random.default_rng(seed)
    for _ in range(count):
        deg = int(rng.integers(2, max_degree + 1))
        yield from_roots(np.sort(rng.uniform(-1.0, 1.0, deg))[::-1])


def _verify_psi(args) -> int:
    count = int(args.count or 100)
    seed = int(args.seed or 0)
    rows = []
    from .chebcore import roots

    for i, om in enumerate(random_rooted_polys(count, seed)):
        worst = 0.0
        for r, _ in roots(om):
            worst = max(worst, scans.psi_identity_check(om, r).max)
        rows.append((i, om.degree, worst, worst <= scans.IDENTITY_RTOL))
    emit(("poly", "degree", "residual", "pass"), rows, args.format or "table")
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_FAIL


def _verify_interlacing(args) -> int:
    ts = ([float(v) for v in str(args.t).split(",")] if args.t else
          [s * v / 10 for v in range(1, 10) for s in (1, -1)])
    rows = []
    for n in parse_int_list(args.n or "3..20"):
        for t in ts:
            res = scans.interlacing_check(n, t)
            rows.append((n, t, res.passed, res.margin, res.details))
    emit(("n", "t", "pass", "margin", "details"), rows, args.format or "table")
    return EXIT_OK if all(r[2] for r in rows) else EXIT_FAIL


VERIFY = {
    "theorem-main": _verify_theorem_main,
    "tau-max": _verify_tau_max,
    "fg": _verify_fg,
    "tau-second": _verify_tau_second,
    "prop-dd": _verify_prop_dd,
    "psi": _verify_psi,
    "interlacing": _verify_interlacing,
}


def cmd_verify(args) -> int:
    return VERIFY[args.what](args)


def cmd_growth(args) -> int:
    try:
        m, k = int(args.m or 2), int(args.k or 1)
    except ValueError:
        raise UsageError("--m and --k must be integers") from None
    ns = parse_doubling(args.n or "22..322")
    bad = []
    for n in ns:
        try:
            extremal.check_parity(m, k, n)
        except extremal.ParityError:
            bad.append(n)
    if bad:
        rule = "n ≢ k (mod 2)" if m % 2 == 0 else "n ≡ k (mod 2)"
        hint = ",".join(str(n + 1) for n in ns)
        print(f"error: parity condition violated for n={','.join(map(str, bad))} "
              f"(m={m}, k={k} needs {rule}); try --n {hint}", file=sys.stderr)
        return EXIT_USAGE
    fit = extremal.md_growth_fit(m, k, ns)
    emit(("n", "markov", "ds_lower", "ds_lower_over_nk_logn", "ds_lower_over_nk_half"),
         list(fit.rows()), args.format or "csv")
    print(f"# markov_exponent={fmt(fit.markov_exponent)} target={2 * k - m}")
    print(f"# ds_lower_exponent={fmt(fit.lower_exponent)} log_factor={fit.log_factor}")
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.what != "tau":
        raise UsageError(f"unknown scan {args.what!r}")
    ns = parse_int_list(args.n or "6")
    grid = int(args.grid) if args.grid else None
    if grid is not None and grid < 1001:
        raise UsageError("scan grids need at least 1001 points")
    csv_points = int(args.csv_points or 201)
    if csv_points < 2:
        raise UsageError("--csv-points must be at least 2")
    if args.out and len(ns) != 1:
        raise UsageError("--out needs a single n")
    for n in ns:
        if n < 1:
            raise UsageError("n must be >= 1")
        r = scans.tau_scan(n, grid, grid)
        print(f"n={n} global_max={fmt(r.global_max)} argmax_x={fmt(r.argmax[0])} "
              f"argmax_t={fmt(r.argmax[1])} boundary_max={fmt(r.boundary_max)} "
              f"interior_max={fmt(r.interior_max)} interior_ratio={fmt(r.interior_ratio)} "
              f"local_extrema={len(r.local_extrema)}")
        if args.out:
            rows = scans.write_scan_csv(args.out, n, csv_points, csv_points)
            print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, case=True):
    p.add_argument("--config", help="key = value file; explicit flags win")
    p.add_argument("--format", choices=("table", "csv"), default=None)
    p.add_argument("--n", help="degree: N, A..B or a comma list")
    p.add_argument("--k", help="derivative order(s): N, A..B or a comma list")
    if case:
        p.add_argument("--case", help="catalog id (unit, sqrt1mx2, case1..case10, mu_m, custom)")
        p.add_argument("--a")
        p.add_argument("--b")
        p.add_argument("--c")
        p.add_argument("--l")
        p.add_argument("--m")
        p.add_argument("--coeffs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snakeineq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snake", help="construct a snake-polynomial and list its nodes")
    _common(p)
    p.set_defaults(func=cmd_snake)

    p = sub.add_parser("verify", help="run a verification")
    p.add_argument("what", choices=sorted(VERIFY))
    _common(p)
    p.add_argument("--expect", choices=[v.value for v in extremal.Verdict])
    p.add_argument("--seed")
    p.add_argument("--count")
    p.add_argument("--t", help="comma list of t values (interlacing)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("growth", help="growth rates for mu_m = (1 - x^2)^(m/2)")
    _common(p, case=False)
    p.add_argument("--m")
    p.set_defaults(func=cmd_growth)
    for a in p._actions:
        if a.dest == "n":
            a.help = "comma list, or A..B for the doubling sequence A, 2A-r, ... (same parity)"

    p = sub.add_parser("scan", help="square scans")
    p.add_argument("what", choices=["tau"])
    _common(p, case=False)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--grid", help="scan points per axis (>= 1001)")
    p.add_argument("--csv-points", dest="csv_points", help="CSV grid points per axis")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        apply_config(args)
        return args.func(args)
    except (UsageError, MajorantError, SnakeError, extremal.ParityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
