"""Command-line front end.

Commands: ``validate``, ``derive``, ``homology``, ``tower``, ``chart``,
``verify`` and ``sweep``.  ``--coeff`` takes a built-in name or the path
of a JSON Mackey functor file.  ``verify`` and ``sweep`` exit with status 1
when any oracle disagrees; usage and input errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache

from .builtins import UnknownBuiltinError, builtin, builtin_list
from .chart import chart_for, simplify_symbols, verify_convergence
from .emit import emit_ascii, emit_json, emit_svg
from .mackey import (
    ALL_KEYS,
    SYMBOLS,
    UNSIGNED_KEYS,
    CpMackey,
    derived,
    describe_mackey,
    parse_mackey,
    validate,
)
from .spheres import VirtualRep, crosscheck, graded_to_json, homology_of_sphere, parse_rep
from .tower import slice_tower, tower_consistency_check


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs


def load_coefficient(spec: str, p: int | None, seed: int | None = None,
                     truncation: int | None = None) -> CpMackey:
    if spec == "random":
        if seed is None:
            raise UsageError("--coeff random needs --seed")
        spec = f"random:{seed}"
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
        try:
            M = parse_mackey(text)
        except ValueError as exc:
            raise UsageError(f"{spec}: {exc}") from None
        if p is not None and p != M.p:
            raise UsageError(f"{spec} is a C_{M.p}-functor but -p {p} was given")
        M.name = M.name or os.path.basename(spec)
        return M
    if p is None:
        raise UsageError("-p is required with a built-in coefficient")
    try:
        return builtin(spec, p, truncation)
    except UnknownBuiltinError as exc:
        raise UsageError(str(exc)) from None


def _rep(args, M: CpMackey) -> VirtualRep:
    if args.rep is None:
        raise UsageError("--rep is required")
    try:
        return parse_rep(args.rep, M.p)
    except ValueError as exc:
        raise UsageError(f"representation {args.rep!r}: {exc}") from None


def _write(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def _table(rows: list[tuple]) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() + "\n"
                   for r in rows)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, M: CpMackey) -> int:
    rep = validate(M)
    if args.format == "json":
        _write(args, _dump({"valid": rep.ok, "failures": rep.failures,
                            "levels": describe_mackey(M)}))
    else:
        _write(args, str(rep) + "\n")
    return 0 if rep.ok else 1


def cmd_derive(args, M: CpMackey) -> int:
    keys = ALL_KEYS if M.p == 2 else UNSIGNED_KEYS
    table = {}
    for k in keys:
        if k == "M":
            continue
        d = describe_mackey(derived(M, k).mackey)
        table[SYMBOLS[k]] = {"name": k, **d}
    if args.format == "json":
        _write(args, _dump({"p": M.p, "coefficient": M.name, "derived": table,
                            "simplified": simplify_symbols(M)}))
    else:
        rows = [("symbol", "functor", "fixed", "underlying")]
        rows += [(s, v["name"], v["fixed"], v["underlying"]) for s, v in table.items()]
        _write(args, _table(rows))
    return 0


def cmd_homology(args, M: CpMackey) -> int:
    V = _rep(args, M)
    H = homology_of_sphere(V, M)
    if args.format == "json":
        _write(args, _dump({"p": M.p, "V": str(V), "homology": graded_to_json(H)}))
    else:
        rows = [("degree", "fixed", "underlying")]
        rows += [(d, v["fixed"], v["underlying"]) for d, v in graded_to_json(H).items()]
        _write(args, _table(rows) if len(rows) > 1 else "(zero)\n")
    return 0


def cmd_tower(args, M: CpMackey) -> int:
    V = _rep(args, M)
    T = slice_tower(V, M, args.form)
    if args.format == "json":
        _write(args, _dump(T.to_json()))
    else:
        head = f"{T.direction} tower  r={T.r}  k={T.k}  slices in [{T.lo}, {T.hi}]\n"
        rows = [("t", "role", "slice", "coefficient")]
        rows += [(s.t, s.role, f"Σ^{{{s.d}{'+' if s.lam >= 0 else ''}{s.lam}λ}}", s.symbol)
                 for s in T.slices]
        _write(args, head + _table(rows))
    return 0


def cmd_chart(args, M: CpMackey) -> int:
    V = _rep(args, M)
    C = chart_for(V, M)
    fmt = args.format
    if fmt == "svg":
        _write(args, emit_svg(C, pitch=args.pitch, keep_zero=args.keep_zero))
    elif fmt in ("ascii", "table"):
        _write(args, emit_ascii(C, keep_zero=args.keep_zero))
    else:
        _write(args, emit_json(C, keep_zero=args.keep_zero))
    return 0


def verify_cell(V: VirtualRep, M: CpMackey) -> dict:
    """Run every oracle on one ``(V, M)``; failures are collected as strings."""
    failures = []
    cc = crosscheck(V, M)
    failures += [f"crosscheck degree {d}: {a} vs {b}" for d, a, b in cc.mismatches]
    tr = tower_consistency_check(slice_tower(V, M))
    failures += [f"tower: {f}" for f in tr.failures]
    conv = verify_convergence(chart_for(V, M))
    failures += [f"convergence: {f}" for f in conv.failures]
    return {"V": str(V), "coefficient": M.name, "ok": not failures, "failures": failures}


def cmd_verify(args, M: CpMackey) -> int:
    res = verify_cell(_rep(args, M), M)
    if args.format == "json":
        _write(args, _dump(res))
    else:
        lines = [f"{'PASS' if res['ok'] else 'FAIL'}  V={res['V']}  M={res['coefficient']}"]
        lines += ["  " + f for f in res["failures"]]
        _write(args, "\n".join(lines) + "\n")
    return 0 if res["ok"] else 1


@lru_cache(maxsize=None)
def _sweep_coeff(name: str, p: int, truncation: int | None) -> CpMackey:
    return builtin(name, p, truncation)


def _sweep_cell(task: tuple) -> dict:
    p, name, m, two_n, truncation = task
    M = _sweep_coeff(name, p, truncation)
    V = VirtualRep.simple(p, m, Fraction(two_n, 2))
    try:
        out = verify_cell(V, M)
    except Exception as exc:  # a crash is a failed cell, not a failed sweep
        out = {"V": str(V), "coefficient": name, "ok": False,
               "failures": [f"{type(exc).__name__}: {exc}"]}
    out["p"] = p
    return out


def sweep_tasks(primes, coeffs, m_range, n_range, truncation=None) -> list[tuple]:
    tasks = []
    for p in primes:
        names = coeffs(p) if callable(coeffs) else coeffs
        for name in names:
            for m in m_range:
                for two_n in range(2 * n_range.start, 2 * (n_range.stop - 1) + 1):
                    if two_n % 2 and p != 2:
                        continue
                    tasks.append((p, name, m, two_n, truncation))
    return tasks


def sweep(tasks: list[tuple], jobs: int = 1) -> dict:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_sweep_cell, tasks, chunksize=16))
    else:
        cells = [_sweep_cell(t) for t in tasks]
    failed = [c for c in cells if not c["ok"]]
    return {"cells": len(cells), "passed": len(cells) - len(failed), "failed": len(failed),
            "failures": failed}


def _parse_range(text: str) -> range:
    try:
        if ":" in text:
            a, b = text.split(":")
            return range(int(a), int(b) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise UsageError(f"bad range {text!r}; use LO:HI") from None


def cmd_sweep(args) -> int:
    primes = [int(x) for x in args.primes.split(",") if x]
    if args.coeffs:
        names = [c for c in args.coeffs.split(",") if c]
    else:
        names = None
    randoms = [f"random:{i}" for i in range(args.random)]

    def coeffs(p):
        base = names if names is not None else [M.name for M in builtin_list(p, args.truncation)]
        return list(base) + randoms

    tasks = sweep_tasks(primes, coeffs, _parse_range(args.m), _parse_range(args.n),
                        args.truncation)
    report = sweep(tasks, args.jobs)
    if args.format == "json":
        _write(args, _dump(report))
    else:
        lines = [f"{report['passed']}/{report['cells']} cells pass"]
        for c in report["failures"][:50]:
            lines.append(f"FAIL p={c['p']} V={c['V']} M={c['coefficient']}: {c['failures'][0]}")
        _write(args, "\n".join(lines) + "\n")
    return 0 if report["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# argument parsing

_COMMANDS = {
    "validate": cmd_validate,
    "derive": cmd_derive,
    "homology": cmd_homology,
    "tower": cmd_tower,
    "chart": cmd_chart,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpslice",
                                 description="Slice towers and slice spectral sequences "
                                             "of C_p representation spheres.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, rep=False, formats=("table", "json")):
        sp.add_argument("--coeff", required=True,
                        help="built-in name (Z, Zstar, Z/p^n, Q/Z, burnside, ...) or JSON file")
        sp.add_argument("-p", type=int, help="the prime (taken from the file if omitted)")
        sp.add_argument("--seed", type=int, help="seed for --coeff random")
        sp.add_argument("--truncation", type=int, help="N in the Z/p^N model of Q/Z")
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("-o", "--output", help="write here instead of stdout")
        if rep:
            sp.add_argument("--rep", help='representation literal, e.g. "3+λ(1)^1" or "-2+σ^3"')

    common(sub.add_parser("validate", help="check the Mackey axioms"))
    common(sub.add_parser("derive", help="table of derived functors"))
    common(sub.add_parser("homology", help="homology of S^V"), rep=True)
    sp = sub.add_parser("tower", help="slice or coslice tower")
    common(sp, rep=True)
    sp.add_argument("--form", choices=("F", "O"), help="F- or O-form of the terminal slice")
    sp = sub.add_parser("chart", help="slice spectral sequence chart")
    common(sp, rep=True, formats=("json", "svg", "ascii", "table"))
    sp.add_argument("--pitch", type=int, default=48, help="SVG pixels per grid unit")
    sp.add_argument("--keep-zero", action="store_true", help="also draw vanishing classes")
    common(sub.add_parser("verify", help="run every oracle on one cell"), rep=True)

    sp = sub.add_parser("sweep", help="run the oracles over a grid")
    sp.add_argument("--primes", default="2,3,5")
    sp.add_argument("--coeffs", help="comma-separated built-ins (default: the built-in list)")
    sp.add_argument("--random", type=int, default=0, help="also use random:0 .. random:K-1")
    sp.add_argument("--m", default="-4:4")
    sp.add_argument("--n", default="-4:4", help="range of n; half-integers are added at p=2")
    sp.add_argument("--truncation", type=int)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--format", choices=("table", "json"), default="table")
    sp.add_argument("-o", "--output")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return cmd_sweep(args)
        M = load_coefficient(args.coeff, args.p, args.seed, args.truncation)
        return _COMMANDS[args.command](args, M)
    except (UsageError, ValueError) as exc:
        print(f"cpslice: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
