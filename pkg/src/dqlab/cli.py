"""Command-line driver: construction, verification, and data export.

Commands:

* ``construct``    build the staircase ledger; writes staircase.json and
                   geometry.csv, prints the per-level measure table.
* ``verify``       run the named checks (default: all); writes report.json.
* ``dqcloud``      sample difference quotients of a function over a set;
                   writes dqcloud.csv.
* ``certificate``  produce a DQ-interior certificate for a pair; writes
                   certificate.json.

Exit codes: 0 success, 1 check failure, 2 precondition/guard violation,
3 I/O or schema error.  All rationals in outputs are "p/q" strings; runs
with identical configuration (including seed) produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

from .analysis import (
    dq_cloud,
    dq_interior,
    find_admissible_pair,
    no_interval_image,
    porcupine_check,
    verify_positive_image,
    verify_witness,
)
from .errors import DqlabError, SchemaError
from .intervals import Interval, IntervalSet, fat_cantor, normalize, rat, rat_str
from .piecewise import (
    Piece,
    PiecewiseFn,
    affine_conjugate,
    image_measure_bounds,
    preimage,
)
from .staircase import GapConvention, StaircaseLedger, build_ledger, deriv_g_bound, level_set_check

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_GUARD = 2
EXIT_IO = 3

DEFAULT_DEPTH_CAP = 16


def _depth_cap() -> int:
    raw = os.environ.get("DQLAB_MAX_DEPTH")
    if raw is None:
        return DEFAULT_DEPTH_CAP
    try:
        return int(raw)
    except ValueError:
        raise SchemaError("DQLAB_MAX_DEPTH", f"not an integer: {raw!r}")


def _atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".dqlab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(what, f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError(what, f"invalid JSON in {path}: {exc}")


def _load_fn(path: str) -> PiecewiseFn:
    d = _load_json(path, "fn")
    if "pieces" not in d:
        raise SchemaError("pieces", f"{path} has no 'pieces' field")
    try:
        return PiecewiseFn.from_json(d)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError("pieces", f"{path}: {exc}")


def _load_set(path: str) -> IntervalSet:
    d = _load_json(path, "set")
    if "intervals" not in d:
        raise SchemaError("intervals", f"{path} has no 'intervals' field")
    try:
        return IntervalSet.from_json(d)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError("intervals", f"{path}: {exc}")


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    conv = GapConvention(args.gap_convention)
    led = build_ledger(args.depth, conv, depth_cap=_depth_cap())
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    _write_json(os.path.join(out, "staircase.json"), led.to_json())
    _atomic_write(os.path.join(out, "geometry.csv"), led.geometry_csv())
    if conv is GapConvention.LITERAL_AFFINE:
        lo, hi = led.literal_limit_bounds()
        print("convention: literal-affine (gap fractions applied to the")
        print("  current scale, so the x-measure ledger converges to a")
        print(f"  positive limit in [{rat_str(lo)}, {rat_str(hi)}], not 1/4)")
    print(f"{'k':>3}  {'lambda(X_k)':>24}  {'y-bound (2/3)^(k+1)':>24}")
    for k in range(led.depth + 1):
        print(f"{k:>3}  {rat_str(led.x_measures[k]):>24}  "
              f"{rat_str(Fraction(2**(k+1), 3**(k+1))):>24}")
    print(f"wrote staircase.json and geometry.csv to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check_staircase_ledger(args):
    led = build_ledger(args.depth, GapConvention.PAPER_LEDGER, depth_cap=_depth_cap())
    rows = []
    ok = led.x_measures[0] == Fraction(3, 4)
    for k in range(led.depth + 1):
        want = Fraction(1, 4) + Fraction(1, 2 ** (k + 1))
        ok = ok and led.x_measures[k] == want
        rows.append({"k": k, "x_measure": rat_str(led.x_measures[k]),
                     "expected": rat_str(want)})
    return ok, {"rows": rows, "limit": "1/4"}


def _check_staircase_image(args):
    led = build_ledger(args.depth, GapConvention.PAPER_LEDGER, depth_cap=_depth_cap())
    rows = []
    ok = True
    for k in range(led.depth + 1):
        bound = Fraction(2 ** (k + 1), 3 ** (k + 1))
        got = led.y_measure_bounds[k]
        ok = ok and got <= bound
        rows.append({"k": k, "x_measure": rat_str(led.x_measures[k]),
                     "y_bound": rat_str(got), "limit_bound": rat_str(bound)})
        print(f"  k={k:<2} lambda(X_k) = {rat_str(led.x_measures[k]):>20}   "
              f"y-bound <= {rat_str(bound)}")
    d = led.depth
    ok = ok and led.x_measures[d] >= Fraction(1, 4)
    if d >= 10:
        ok = ok and led.y_measure_bounds[d] < Fraction(12, 1000)
    return ok, {"rows": rows}


def _check_derivative_tamping(args):
    led = build_ledger(args.depth, GapConvention.PAPER_LEDGER, depth_cap=_depth_cap())
    rows = []
    ok = True
    for k in range(1, min(8, led.depth) + 1):
        bound = deriv_g_bound(led, led.x_set(k), k)
        ok = ok and bound < Fraction(1, k)
        rows.append({"k": k, "deriv_bound": rat_str(bound), "required": f"1/{k}"})
    return ok, {"rows": rows}


def _check_level_set(args):
    led = build_ledger(args.depth, GapConvention.PAPER_LEDGER, depth_cap=_depth_cap())
    d = min(8, led.depth)
    tr = led.truncation(d)
    rng = random.Random(args.seed)
    ok = True
    worst = Fraction(0)
    for _ in range(100):
        t = Fraction(rng.getrandbits(48), 2**48)
        extent = preimage(tr, t, precision_bits=60)[1].measure()
        cap = level_set_check(led, t, d)
        worst = max(worst, extent)
        ok = ok and extent <= cap
    return ok, {"depth": d, "s_depth": rat_str(level_set_check(led, Fraction(1, 2), d)),
                "worst_extent": rat_str(worst)}


def _two_slope_spline() -> PiecewiseFn:
    half = Fraction(1, 2)
    return PiecewiseFn((
        Piece.sin_half(0, half, 0, Fraction(1, 4)),
        Piece.sin_half(half, 1, Fraction(1, 4), 1),
    ))


def _check_positive_image(args):
    e = fat_cantor(10)
    rep = verify_positive_image(_two_slope_spline(), e)
    lo, hi = rep.image_bounds
    ok = rep.lower_bound > 0 and rep.lower_bound <= hi
    iso = PiecewiseFn((Piece.affine(0, 1, 0, 1),))
    ib = image_measure_bounds(iso, e)
    ok = ok and ib[0] == ib[1] == e.measure()
    return ok, {"x0": rat_str(rep.x0), "lower_bound": rat_str(rep.lower_bound),
                "image_bounds": [rat_str(lo), rat_str(hi)],
                "isometry_exact": rat_str(ib[0])}


def _check_dq_interior(args):
    f = PiecewiseFn((Piece.sin_half(0, 1, 0, 1),))
    e = fat_cantor(10)
    pair = find_admissible_pair(f, e, seed=args.seed)
    cert = dq_interior(f, e, pair, grid=21, precision_bits=max(args.precision_bits, 120))
    lo, hi = cert.certified_interval
    g = affine_conjugate(f, *cert.transform)
    residual_ok = all(w.residual_bound <= Fraction(1, 2**60) and verify_witness(g, w)
                      for w in cert.witnesses)
    ok = len(cert.witnesses) >= 21 and hi > lo and residual_ok
    return ok, {"pair": [rat_str(pair[0]), rat_str(pair[1])],
                "certified_interval": [rat_str(lo), rat_str(hi)],
                "witnesses": len(cert.witnesses)}


def _check_porcupine(args):
    f = PiecewiseFn((Piece.sin_half(0, 1, 0, 1),))
    e = fat_cantor(10)
    rep = porcupine_check(f, e, args.samples, args.seed,
                          precision_bits=args.precision_bits)
    return rep.equality_hits == 0, {"pairs": rep.pairs,
                                    "equality_hits": rep.equality_hits,
                                    "tolerance": rat_str(rep.tolerance),
                                    "note": rep.note}


def _check_dense_omission(args):
    led = build_ledger(3, GapConvention.PAPER_LEDGER, depth_cap=_depth_cap())
    rep = no_interval_image(led.truncation(3), count=50, samples=100, seed=args.seed)
    ok = rep.survivor_set.measure() == 1 and rep.violations == 0
    return ok, {"survivor_measure": rat_str(rep.survivor_set.measure()),
                "omitted_count": len(rep.omitted),
                "violations": rep.violations}


def _check_literal_affine(args):
    led = build_ledger(args.depth, GapConvention.LITERAL_AFFINE, depth_cap=_depth_cap())
    lo, hi = led.literal_limit_bounds()
    ok = lo > 0 and (lo > Fraction(1, 4) or hi < Fraction(1, 4))
    note = ("literal-affine gap sizes shrink with the level scale, so the "
            "removed mass is summable and the limit differs from the "
            "paper-ledger value 1/4")
    print(f"  literal-affine limit in [{rat_str(lo)}, {rat_str(hi)}]; {note}")
    return ok, {"limit_bounds": [rat_str(lo), rat_str(hi)], "note": note}


CHECKS = [
    ("staircase-ledger", _check_staircase_ledger),
    ("staircase-image", _check_staircase_image),
    ("derivative-tamping", _check_derivative_tamping),
    ("level-set", _check_level_set),
    ("positive-image", _check_positive_image),
    ("dq-interior", _check_dq_interior),
    ("porcupine", _check_porcupine),
    ("dense-omission", _check_dense_omission),
    ("literal-affine", _check_literal_affine),
]


def cmd_verify(args) -> int:
    names = [n for n, _ in CHECKS]
    if args.only and args.only not in names:
        raise SchemaError("only", f"unknown check {args.only!r}; choices: {names}")
    results = []
    all_ok = True
    for name, fn in CHECKS:
        if args.only and name != args.only:
            continue
        try:
            ok, detail = fn(args)
        except DqlabError as exc:
            ok, detail = False, {"error": str(exc)}
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        results.append({"name": name, "passed": ok, "detail": detail})
        all_ok = all_ok and ok
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    _write_json(os.path.join(out, "report.json"), {
        "all_passed": all_ok,
        "config": {"depth": args.depth, "seed": args.seed,
                   "samples": args.samples, "precision_bits": args.precision_bits,
                   "gap_convention": args.gap_convention, "only": args.only},
        "checks": results,
    })
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# dqcloud / certificate
# ---------------------------------------------------------------------------


def cmd_dqcloud(args) -> int:
    f = _load_fn(args.fn)
    e = _load_set(args.set)
    samples, summary = dq_cloud(f, e, args.samples, args.seed,
                                precision_bits=args.precision_bits)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["x1", "x2", "dq_lo", "dq_hi"])
    for s in samples:
        w.writerow([rat_str(s.x1), rat_str(s.x2),
                    rat_str(s.dq_value.lo), rat_str(s.dq_value.hi)])
    path = args.out or "dqcloud.csv"
    _atomic_write(path, buf.getvalue())
    print(f"wrote {len(samples)} samples to {path}; "
          f"dq in [{float(summary['min']):.6f}, {float(summary['max']):.6f}]")
    return EXIT_OK


def cmd_certificate(args) -> int:
    f = _load_fn(args.fn)
    e = _load_set(args.set)
    if args.pair:
        try:
            p1, p2 = (rat(p.strip()) for p in args.pair.split(","))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError("pair", f"expected 'p/q,r/s': {exc}")
        pair = (p1, p2)
    else:
        pair = find_admissible_pair(f, e, seed=args.seed)
    cert = dq_interior(f, e, pair, precision_bits=max(args.precision_bits, 120))
    path = args.out or "certificate.json"
    _write_json(path, cert.to_json())
    lo, hi = cert.certified_interval
    print(f"certified open interval ({rat_str(lo)}, {rat_str(hi)}) "
          f"with {len(cert.witnesses)} witnesses; wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dqlab",
        description="exact-arithmetic difference-quotient-set laboratory",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sampling=False):
        p.add_argument("--depth", type=int, default=10)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--samples", type=int, default=20000)
        p.add_argument("--precision-bits", type=int, default=96)
        p.add_argument("--gap-convention", default="paper-ledger",
                       choices=["paper-ledger", "literal-affine"])
        p.add_argument("--out", default=None)
        p.add_argument("--format", default="json", choices=["json", "csv"])

    p = sub.add_parser("construct", help="build the staircase ledger")
    common(p)
    p.set_defaults(fn_impl=cmd_construct)

    p = sub.add_parser("verify", help="run named checks and write report.json")
    common(p)
    p.add_argument("--only", default=None, metavar="CHECK",
                   help="run a single check: " + ", ".join(n for n, _ in CHECKS))
    p.set_defaults(fn_impl=cmd_verify)

    p = sub.add_parser("dqcloud", help="sample difference quotients to CSV")
    common(p)
    p.add_argument("--fn", required=True, help="piecewise function JSON file")
    p.add_argument("--set", required=True, help="interval set JSON file")
    p.set_defaults(fn_impl=cmd_dqcloud)

    p = sub.add_parser("certificate", help="emit a DQ-interior certificate")
    common(p)
    p.add_argument("--fn", required=True, help="piecewise function JSON file")
    p.add_argument("--set", required=True, help="interval set JSON file")
    p.add_argument("--pair", default=None, help="pair as 'p/q,r/s' (default: seeded search)")
    p.set_defaults(fn_impl=cmd_certificate)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.depth < 0:
            raise SchemaError("depth", "depth must be >= 0")
        if args.depth > _depth_cap():
            raise SchemaError("depth", f"depth {args.depth} exceeds cap {_depth_cap()} "
                                       "(override with DQLAB_MAX_DEPTH)")
        if args.precision_bits < 53:
            raise SchemaError("precision-bits", "precision must be >= 53 bits")
        return args.fn_impl(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DqlabError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
