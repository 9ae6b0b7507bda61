"""Command-line front end.

Examples
--------
    expvol bessel --s 0 --z 1
    expvol crown --n 2 --K 1,1 --l 0
    expvol bfunction --g 1 --boundaries 1 --K 1 --s 0,0.5,1 --format csv
    expvol verify
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import acceptance
from .bessel import bessel_J
from .cluster import mcshane_partial_sum_A11
from .core_types import DecoratedSurface, ExpVolError, ParameterError
from .crown import crown_volume_result
from .quadrature import QuadConfig
from .recursion import LaplaceArgs, b_function, exp_volume_result, l_function
from .tropical import (tropical_crown_moment, tropical_crown_volume, tropical_exp_volume)

EXIT_COMPUTE, EXIT_ARGS, EXIT_VERIFY = 1, 2, 3


class _ArgError(Exception):
    pass


def _floats(text: str | None, what: str) -> list[float]:
    if text is None:
        return []
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _ArgError(f"--{what}: expected a comma-separated list of numbers, got {text!r}")


def _crowns(text: str | None) -> list[list[float]]:
    """``'1,2;3'`` -> ``[[1, 2], [3]]`` (crowns separated by semicolons)."""
    if not text:
        raise _ArgError("--K is required")
    return [_floats(part, "K") for part in text.split(";")]


def _surface(args) -> DecoratedSurface:
    if args.boundaries is None:
        raise _ArgError("--boundaries is required")
    try:
        b = [int(x) for x in args.boundaries.split(",")]
    except ValueError:
        raise _ArgError("--boundaries: expected comma-separated integers")
    return DecoratedSurface(args.g, tuple(b))


def _cfg(args) -> QuadConfig:
    kw = {}
    if args.tol_abs is not None:
        kw["abs_tol"] = args.tol_abs
    if args.tol_rel is not None:
        kw["rel_tol"] = args.tol_rel
    if args.seed is not None:
        kw["seed"] = args.seed
    return QuadConfig(**kw)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(type(o).__name__)


def _record(surface, K, lengths, s, value, err, method, **extra):
    rec = {"surface": surface, "K": K, "lengths": lengths, "s": s, "value": value,
           "error_estimate": err, "method": method}
    rec.update(extra)
    return rec


def _emit(args, records, sweep_key=None):
    """Write records as JSON, or as two-column CSV when a sweep variable is given."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for r in records:
            x = r.get(sweep_key) if sweep_key else None
            if isinstance(x, list):
                x = x[0] if len(x) == 1 else ";".join(map(repr, x))
            w.writerow([x, repr(r["value"])])
        text = buf.getvalue()
    else:
        payload = records[0] if len(records) == 1 else records
        text = json.dumps(payload, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _s_points(args):
    """Laplace points: comma list = sweep; colon inside an entry = per-boundary vector."""
    if args.s is None:
        raise _ArgError("--s is required")
    pts = []
    for item in args.s.split(","):
        try:
            vec = tuple(float(x) for x in item.split(":"))
        except ValueError:
            raise _ArgError(f"--s: bad entry {item!r}")
        pts.append(vec)
    return pts


# ---------------------------------------------------------------------------
# subcommands


def cmd_bessel(args):
    ss = _floats(args.s, "s")
    zs = _floats(args.z, "z")
    if not ss or not zs:
        raise _ArgError("bessel needs --s and --z")
    cfg = _cfg(args)
    recs = []
    for s in ss:
        for z in zs:
            v = bessel_J(s, z, cfg, check=not args.no_check)
            recs.append(_record("kernel", [z], [], [s], v, 0.0, "series_checked_by_quadrature"))
    key = "s" if len(ss) > 1 else "K"
    _emit(args, recs, key)


def cmd_crown(args):
    if args.n is None:
        raise _ArgError("crown needs --n")
    K = _floats(args.K, "K")
    ls = _floats(args.l, "l")
    lams = _floats(args.Lambda, "Lambda")
    if bool(ls) == bool(lams):
        raise _ArgError("give exactly one of --l and --Lambda")
    cfg = _cfg(args)
    recs = []
    for x in (ls or lams):
        r = crown_volume_result(args.n, K, l=x if ls else None, Lam=x if lams else None, cfg=cfg)
        recs.append(_record(DecoratedSurface.crown(args.n).label(), K, [x], [], r.value,
                            r.error_estimate, r.method_tag))
    _emit(args, recs, "lengths")


def cmd_bfunction(args, lfun=False):
    surf = _surface(args)
    K = _crowns(args.K)
    cfg = _cfg(args)
    recs = []
    for vec in _s_points(args):
        la = LaplaceArgs(vec, args.hbar)
        if lfun:
            v = l_function(surf, K, la, cfg)
            recs.append(_record(surf.label(), K, [], list(vec), v, 0.0, "neck_recursion"))
        else:
            r = b_function(surf, K, la, cfg, paths=args.paths)
            recs.append(_record(surf.label(), K, [], list(vec), r.value, r.error_estimate,
                                r.path_tag, other_value=r.other_value))
    _emit(args, recs, "s")


def cmd_expvol(args):
    surf = _surface(args)
    K = _crowns(args.K)
    lengths = _floats(args.l, "l")
    if args.Lambda:
        lengths = [math.log(x) for x in _floats(args.Lambda, "Lambda")]
    r = exp_volume_result(surf, K, lengths or None, _cfg(args))
    _emit(args, [_record(surf.label(), K, lengths, [], r.value, r.error_estimate, r.method_tag)])


def cmd_mcshane(args):
    K = _floats(args.K, "K")
    lam = _floats(args.Lambda, "Lambda")
    if len(K) != 2 or len(lam) != 1:
        raise _ArgError("mcshane needs --K K1,K2 and a single --Lambda")
    Ns = [args.N] if args.N is not None else list(range(0, 61))
    recs = []
    for N in Ns:
        part, target = mcshane_partial_sum_A11(K[0], K[1], lam[0], N)
        recs.append(_record("g=0;b=1,1", K, lam, [], part, target - part, "partial_sum",
                            N=N, target=target))
    _emit(args, recs, "N")


def cmd_tropical(args):
    kap = _crowns(args.K)
    if args.boundaries is not None:
        surf = _surface(args)
        v = tropical_exp_volume(surf, kap)
        rec = _record(surf.label(), kap, [], [], v, 0.0, "exact_rational")
    elif args.d is not None:
        v = tropical_crown_moment(kap[0], args.d)
        rec = _record("tropical_crown", kap[0], [], [], v, 0.0, "exact_rational", d=args.d)
    else:
        v = tropical_crown_volume(kap[0])
        rec = _record("tropical_crown", kap[0], [], [], v, 0.0, "closed_form")
    _emit(args, [rec])


def cmd_verify(args):
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(only, echo=print)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump([{"criterion": r.number, "name": r.name, "passed": r.passed,
                        "measured": r.measured, "tolerance": r.tolerance,
                        "seconds": round(r.seconds, 3)} for r in results], fh, indent=2)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed"
          + (f"; failing: {failed}" if failed else ""))
    return EXIT_VERIFY if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-abs", type=float, dest="tol_abs")
    common.add_argument("--tol-rel", type=float, dest="tol_rel")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH")

    p = argparse.ArgumentParser(prog="expvol", description="Exponential volumes of decorated surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bessel", parents=[common], help="J_s(z) = 2 K_s(2 sqrt z)")
    b.add_argument("--s", required=True)
    b.add_argument("--z", required=True)
    b.add_argument("--no-check", action="store_true", help="skip the quadrature cross-check")

    c = sub.add_parser("crown", parents=[common], help="fixed-length crown volume")
    c.add_argument("--n", type=int)
    c.add_argument("--K", required=True)
    c.add_argument("--l")
    c.add_argument("--Lambda")

    for name, helptext in (("bfunction", "B-function (signed lengths)"),
                           ("lfunction", "L-function (nonnegative lengths)")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("--g", type=int, default=0)
        q.add_argument("--boundaries", required=True,
                       help="marked points per boundary, e.g. 2,0 for a two-cusp crown disc")
        q.add_argument("--K", required=True, help="per crown, crowns separated by ';'")
        q.add_argument("--s", required=True,
                       help="comma list sweeps; use ':' to give one value per boundary")
        q.add_argument("--hbar", type=float, default=1.0)
        if name == "bfunction":
            q.add_argument("--paths", choices=("both", "operator", "recursion_integral"),
                           default="both")

    e = sub.add_parser("expvol", parents=[common], help="exponential volume")
    e.add_argument("--g", type=int, default=0)
    e.add_argument("--boundaries", required=True)
    e.add_argument("--K", required=True)
    e.add_argument("--l", help="circle lengths, or the neck length of a crown disc")
    e.add_argument("--Lambda")

    m = sub.add_parser("mcshane", parents=[common], help="McShane partial sums on A_{1,1}")
    m.add_argument("--K", required=True)
    m.add_argument("--Lambda", required=True)
    m.add_argument("--N", type=int, help="omit to sweep N = 0..60")

    t = sub.add_parser("tropical", parents=[common], help="tropical crown volumes and moments")
    t.add_argument("--K", required=True, help="tropical parameters kappa")
    t.add_argument("--d", type=int, help="moment degree")
    t.add_argument("--g", type=int, default=0)
    t.add_argument("--boundaries")

    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--only", help="comma list of criterion numbers")
    return p


_COMMANDS = {
    "bessel": cmd_bessel, "crown": cmd_crown, "bfunction": cmd_bfunction,
    "lfunction": lambda a: cmd_bfunction(a, lfun=True), "expvol": cmd_expvol,
    "mcshane": cmd_mcshane, "tropical": cmd_tropical, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGS if exc.code else 0
    try:
        rc = _COMMANDS[args.command](args)
    except (_ArgError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (ExpVolError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
