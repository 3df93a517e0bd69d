"""Command-line front end: ``affspec <command> [options]``.

Exit codes: 0 when everything requested was determined or passed, 1 when the
result is sound but incomplete, 2 on bad input or a violated hypothesis.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from typing import Optional

from . import __version__
from .exact import DomainError, Mat2, QVec2, is_prime, parse_matrix, parse_vec
from .nstar import exit_code, nstar, sharp_matrix
from .orbits import partition, verify_thm34
from .orders import char_poly_order, is_ergodic, order_mod, thm33_verify
from .serialize import SCHEMA_VERSION, dumps, to_jsonable
from .spectral import Frequency, ZeroTester, mu_hat_numeric, verify_orthogonal
from .suite import run_suite
from .transforms import classify
from .zeros import DigitSet3, zero_cosets_3digit

log = logging.getLogger("affspec")


class InputError(Exception):
    pass


def parse_int_list(text: str, primes_in_ranges: bool = False) -> list[int]:
    """``"3,5"`` or ``"3-7"``; ranges can be filtered to primes."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            vals = range(int(a), int(b) + 1)
            out.extend(v for v in vals if not primes_in_ranges or is_prime(v))
        else:
            out.append(int(part))
    return out


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InputError(f"--{n} is required for '{args.command}'")


def _matrix(args) -> Mat2:
    _require(args, "matrix")
    M = parse_matrix(args.matrix)
    if not M.is_integral():
        raise InputError("matrix entries must be integers")
    return M


def _digits(args) -> DigitSet3:
    _require(args, "digits")
    return DigitSet3.parse(args.digits)


def _frequencies(text: str) -> list[QVec2]:
    return [parse_vec(t) for t in text.replace(";", " ").split()]


def config_echo(args) -> dict:
    keys = ("matrix", "digits", "p", "s", "trials", "seed", "jmax", "xi", "depth",
            "freqs", "clique", "format")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_classify(args):
    M = _matrix(args)
    D = _digits(args)
    c = classify(M, D)
    return {"classification": c, "bound": c.bound}, 0


def _nstar_result(rep) -> dict:
    cert = rep.certificate
    return {
        "matrix": rep.M,
        "digits": rep.D,
        "classification": rep.classification,
        "upper_bound": rep.upper,
        "lower_bound": rep.lower,
        "determined": rep.determined,
        "nstar": rep.nstar,
        "bound_system": {"label": rep.bound_system.label, "matrix": rep.bound_system.M,
                         "digits": rep.bound_system.D},
        "bound_certificate": {
            "zero_excluded": rep.bound.zero_excluded,
            "zeros_covered": rep.bound.zeros_covered,
            "stable": rep.bound.stable,
            "valid": rep.bound.valid,
            "bound": rep.bound.bound,
            "zprime": rep.bound.zprime,
        },
        "method": rep.method or None,
        "working_system": None if rep.working is None else {
            "label": rep.working.label, "matrix": rep.working.M, "digits": rep.working.D,
            "transform": rep.working.P},
        "dichotomy": None if rep.dichotomy is None else {
            "q": rep.dichotomy.q, "reaches": rep.dichotomy.reaches,
            "union_size": len(rep.dichotomy.union)},
        "lambda": rep.lam,
        "lambda_original": rep.lam_original,
        "certificate": None if cert is None else {
            "complete": cert.complete, "counts": cert.counts(), "pairs": cert.pairs},
        "clique": None if rep.clique is None else {
            "q": rep.clique.q, "size": rep.clique.size, "members": rep.clique.members,
            "edges_tested": rep.clique.edges_tested,
            "inconclusive_edges": rep.clique.inconclusive_edges},
        "notes": rep.notes,
    }


def _matrix_or_sharp(args, D: DigitSet3) -> Mat2:
    return _matrix(args) if args.matrix is not None else sharp_matrix(D)


def cmd_nstar(args):
    D = _digits(args)
    M = _matrix_or_sharp(args, D)
    rep = nstar(M, D, clique=args.clique, j_max=args.jmax, workers=args.parallel)
    return _nstar_result(rep), exit_code(rep)


def cmd_lambda(args):
    D = _digits(args)
    M = _matrix_or_sharp(args, D)
    rep = nstar(M, D, clique=False, j_max=args.jmax, workers=args.parallel)
    res = {"matrix": M, "digits": D, "method": rep.method or None,
           "working_system": None if rep.working is None else {
               "label": rep.working.label, "matrix": rep.working.M, "digits": rep.working.D},
           "lambda": rep.lam, "lambda_original": rep.lam_original, "notes": rep.notes}
    return res, 0 if rep.lam else 1


def cmd_verify(args):
    M = _matrix(args)
    D = _digits(args)
    _require(args, "freqs")
    lam = [Frequency(1, v) for v in _frequencies(args.freqs)]
    cert = verify_orthogonal(lam, M, D, args.jmax, args.parallel)
    res = {"matrix": M, "digits": D, "frequencies": lam, "complete": cert.complete,
           "counts": cert.counts(), "pairs": cert.pairs}
    return res, 0 if cert.complete else 1


def cmd_muhat(args):
    M = _matrix(args)
    D = _digits(args)
    _require(args, "xi")
    xi = parse_vec(args.xi)
    value = mu_hat_numeric(xi, M, D, args.depth)
    res = {"xi": xi, "depth": args.depth, "value": value, "modulus": abs(value)}
    if xi != QVec2.zero():
        m = ZeroTester(M, zero_cosets_3digit(D)).test(xi, args.jmax)
        res["membership"] = m
    return res, 0


def cmd_order(args):
    M = _matrix(args)
    _require(args, "p")
    s = args.s or 1
    p = args.p
    r = order_mod(M, p**s, with_excess=True)
    res = {"modulus": p**s, "order": r.order, "excess": r.excess}
    if s == 1:
        res["minimal_poly_order"] = char_poly_order(M, p)
        res["ergodic"] = is_ergodic(M, p)
    elif p >= 2:
        rep = thm33_verify(M, p, s)
        res["order_mod_p"] = rep.iota
        res["lift_bound"] = rep.bound
        res["lift_bound_sharp_expected"] = rep.sharp_expected
        res["lift_ok"] = rep.holds
    return res, 0


def cmd_orbits(args):
    M = _matrix(args)
    _require(args, "p", "s")
    p, s = args.p, args.s
    P = partition(M, p, s)
    q = p**s
    ls = sorted(P.orbit_of)
    class_id = {l: i for i, cls in enumerate(P.classes) for l in cls}
    th = verify_thm34(M, p, s)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "class", "orbit_size"])
        for l in ls:
            w.writerow([l, class_id[l], len(P.orbit_of[l])])
        return buf.getvalue(), 0
    if args.format == "plot-points":
        lines = []
        for i, cls in enumerate(P.classes):
            for u, v in sorted(P.orbit_of[cls[0]]):
                lines.append(f"{u}/{q} {v}/{q} {i}")
        return "\n".join(lines) + "\n", 0
    res = {"p": p, "s": s, "order_mod_p": P.iota,
           "orbits": [{"l": l, "class": class_id[l], "size": len(P.orbit_of[l])} for l in ls],
           "classes": P.classes,
           "orbit_structure": {"status": th.status, "reason": th.reason,
                               "stratified_union": th.stratified_union,
                               "seed_union": th.seed_union}}
    return res, 0


def cmd_suite(args):
    ps = parse_int_list(args.p_range or "", primes_in_ranges=True)
    ss = parse_int_list(args.s_range or "")
    rep = run_suite(ps, ss, args.trials, args.seed, args.parallel)
    return rep, 1 if rep.failed else 0


COMMANDS = {
    "classify": cmd_classify,
    "nstar": cmd_nstar,
    "orbits": cmd_orbits,
    "order": cmd_order,
    "lambda": cmd_lambda,
    "verify": cmd_verify,
    "muhat": cmd_muhat,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", help='integer matrix "a,b;c,d"')
    common.add_argument("--digits", help='nonzero digits "x1,y1 x2,y2" (zero digit implied)')
    common.add_argument("--jmax", type=int, help="cap on inverse iterations per pair")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--format", choices=("json", "csv", "plot-points"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--parallel", type=int, default=os.cpu_count() or 1,
                        help="worker processes (default: CPU count)")
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall-clock timing so output is byte-reproducible")
    ap = argparse.ArgumentParser(prog="affspec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"affspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("classify", "nstar", "lambda", "verify", "muhat"):
        sp = sub.add_parser(name, parents=[common])
        if name == "nstar":
            sp.add_argument("--clique", action="store_true", help="also run the max-clique oracle")
        if name == "verify":
            sp.add_argument("--freqs", help='frequencies "x1,y1 x2,y2 ..."')
        if name == "muhat":
            sp.add_argument("--xi", help='frequency "x,y"')
            sp.add_argument("--depth", type=int, default=64)
    for name in ("orbits", "order"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--p", type=int)
        sp.add_argument("--s", "--eta", dest="s", type=int, help="level s (alias --eta)")
    sp = sub.add_parser("suite", parents=[common])
    sp.add_argument("--p", dest="p_range", default="3,5", help='primes, "3,5" or "3-7"')
    sp.add_argument("--s", dest="s_range", default="1,2", help='levels, "1,2" or "1-3"')
    return ap


def _envelope(args, result, code: int, elapsed: Optional[float]) -> dict:
    env = {"schema_version": SCHEMA_VERSION, "tool": "affspec", "version": __version__,
           "command": args.command, "config": config_echo(args), "exit_code": code,
           "result": to_jsonable(result)}
    if elapsed is not None:
        env["timing"] = {"wall_seconds": round(elapsed, 6)}
    return env


def _setup_logging() -> None:
    level = os.environ.get("AFFSPEC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "command", None) == "suite":
        args.p, args.s = args.p_range, args.s_range
    if args.parallel < 1:
        ap.error("--parallel must be at least 1")
    if args.trials < 0:
        ap.error("--trials must be non-negative")
    if args.jmax is not None and args.jmax < 1:
        ap.error("--jmax must be positive")
    t0 = time.perf_counter()
    try:
        result, code = COMMANDS[args.command](args)
    except (DomainError, InputError, ValueError, ZeroDivisionError) as e:
        print(f"affspec: error: {e}", file=sys.stderr)
        return 2
    elapsed = None if args.no_timing else time.perf_counter() - t0
    log.info("%s finished with exit code %d", args.command, code)
    if isinstance(result, str):
        text = result
    else:
        text = dumps(_envelope(args, result, code, elapsed))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
