"""Command-line entry point: ``sglattice <command> [flags]``.

Exit codes: 0 success, 1 failed criterion or verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

from . import eigenfunctions as ef_mod
from . import verify
from .exact import format_scalar, parse_scalar
from .julia import bowen_dimension, julia_cloud, sigma_family
from .lattice import InsufficientWordError, WordSpec, build_truncation, dump_graph
from .spectrum import (
    CSV_HEADER,
    IndeterminateMembershipError,
    SingularProductError,
    classify,
    pm_product,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _word(text: str) -> WordSpec:
    try:
        return WordSpec.parse(text)
    except ValueError as exc:
        raise UsageError(f"invalid word spec: {exc}") from exc


def _lambdas(values: list[str], backend: str) -> list:
    out = []
    for chunk in values:
        for tok in chunk.split(","):
            if tok.strip():
                try:
                    out.append(parse_scalar(tok, backend))
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
    if not out:
        raise UsageError("--lambda is required")
    return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _records(header, rows, fmt: str) -> str:
    if fmt == "csv":
        return _csv(header, rows)
    return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"


def cmd_lattice(args) -> int:
    word = _word(args.word)
    try:
        g = build_truncation(word, args.level, args.sparsity)
    except InsufficientWordError as exc:
        raise UsageError(str(exc)) from exc
    _emit(dump_graph(g) + "\n", args.out)
    boundary = "none" if g.boundary is None else str(g.boundary.triple())
    print(f"vertices: {len(g)} edges: {len(g.edges)} boundary: {boundary}", file=sys.stderr)
    return EXIT_OK


def _boundaries(text: str):
    return {"true": (True,), "false": (False,), "both": (True, False)}[text]


def cmd_classify(args) -> int:
    lams = _lambdas(args.lam, args.backend)
    spaces = [s for s in args.space.split(",") if s]
    rows = []
    flagged = 0
    for lam in lams:
        for sp in spaces:
            for b in _boundaries(args.boundary):
                try:
                    rows.append(classify(lam, sp, b, args.depth).row())
                except IndeterminateMembershipError as exc:
                    flagged += 1
                    rows.append([format_scalar(lam), sp, str(b).lower(), "indeterminate", "none", exc.certificate])
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
    _emit(_records(CSV_HEADER, rows, args.format), args.out)
    if flagged:
        print(f"{flagged} rows with undecided membership", file=sys.stderr)
    return EXIT_OK


def _cli_classification_runner(lams: list[str]) -> str:
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        main(["classify", "--lambda", ",".join(lams), "--space", "1,2,inf,c0", "--boundary", "both"])
    finally:
        sys.stdout = old
    return buf.getvalue()


def cmd_verify_all(args) -> int:
    opt = verify.Options(backend=args.backend, inject=args.inject, seed=args.seed)
    results = []
    for i in range(1, len(verify.CHECKS) + 1):
        kwargs = {"runner": _cli_classification_runner} if i == 10 else {}
        res = verify.run_check(i, opt, **kwargs)
        results.append(res)
        print(res.line())
    failed = [r.number for r in results if not r.passed]
    if args.out:
        Path(args.out).write_text(
            json.dumps(
                [
                    {"criterion": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds,
                     "note": r.note, "measured": {k: str(v) for k, v in r.measured.items()}}
                    for r in results
                ],
                indent=1,
            )
        )
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_julia_cloud(args) -> int:
    try:
        cloud = julia_cloud(args.depth, parse_scalar(args.start))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [(i, str(w), repr(v)) for i, (v, w) in enumerate(cloud)]
    _emit(_records(("index", "word", "value"), rows, args.format), args.out)
    return EXIT_OK


def cmd_sigma(args) -> int:
    try:
        fam = sigma_family(args.series, args.depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [(format_scalar(v), w, repr(float(complex(v).real))) for v, w in fam.points]
    _emit(_records(("value", "branch_word", "approx"), rows, args.format), args.out)
    return EXIT_OK


def cmd_dimension(args) -> int:
    try:
        res = bowen_dimension(args.depth, parse_scalar(args.start, "float"))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(json.dumps({"k": res.k, "seed": res.seed, "dimension": res.dimension, "retries": res.retries}) + "\n", args.out)
    return EXIT_OK


def _anchor(text: str) -> tuple:
    return tuple(int(c) for c in text if c.strip())


def cmd_eigenfunction(args) -> int:
    if args.check:
        ef = ef_mod.load_eigenfunction(Path(args.check).read_text())
        res = ef_mod.verify_eigen(ef, ef.eigenvalue)
        print(f"eigenvalue {format_scalar(ef.eigenvalue)} residual {format_scalar(res)}")
        return EXIT_OK if abs(complex(res)) <= 1e-10 else EXIT_FAIL
    try:
        if args.series == 4:
            word = _word(args.word)
            seed = [parse_scalar(x, args.backend) for x in args.abc.split(",")]
            if len(seed) != 3:
                raise UsageError("--abc needs three values")
            ef = ef_mod.build_4_series(ef_mod.FourSeriesSpec(*seed, word, args.level or 3))
        else:
            word = _word(args.word)
            ef = ef_mod.build_series_eigenfunction(
                args.series, _anchor(args.anchor), args.m, args.branch, word, args.level
            )
    except (ef_mod.DimensionError, ef_mod.ForbiddenBranchError, ef_mod.AnchorError) as exc:
        raise UsageError(str(exc)) from exc
    res = ef_mod.verify_eigen(ef, ef.eigenvalue)
    _emit(ef_mod.dump_eigenfunction(ef) + "\n", args.out)
    print(f"eigenvalue {format_scalar(ef.eigenvalue)} residual {format_scalar(res)}", file=sys.stderr)
    return EXIT_OK if abs(complex(res)) <= 1e-10 else EXIT_FAIL


def cmd_pm_product(args) -> int:
    lams = _lambdas(args.lam, args.backend)
    rows = []
    for lam in lams:
        try:
            t = pm_product(lam, args.m)
        except SingularProductError as exc:
            raise UsageError(str(exc)) from exc
        rows.append((format_scalar(lam), args.m, format_scalar(t.P_m), format_scalar(t.telescoped),
                     "" if t.a_m is None else format_scalar(t.a_m), "" if t.b_m is None else format_scalar(t.b_m)))
    _emit(_records(("lambda", "m", "P_m", "telescoped", "a_m", "b_m"), rows, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sglattice", description="Spectral experiments on Sierpinski lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="json"):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt)
        sp.add_argument("--backend", choices=("rational", "surd", "float"), default="rational")
        sp.add_argument("--seed", type=int, default=20240601, help="seed for random sampling")
        return sp

    s = common(sub.add_parser("lattice", help="build and export a truncation"))
    s.add_argument("--word", required=True, help='e.g. "prefix=12;tail=const:0"')
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--sparsity", type=int, default=0)
    s.set_defaults(func=cmd_lattice)

    s = common(sub.add_parser("classify", help="classification table"), fmt="csv")
    s.add_argument("--lambda", dest="lam", action="append", default=[], help="comma separated values")
    s.add_argument("--space", default="1,2,inf,c0", help="comma separated: 1, p>1, inf, c0")
    s.add_argument("--boundary", choices=("true", "false", "both"), default="both")
    s.add_argument("--depth", type=int, default=12)
    s.set_defaults(func=cmd_classify)

    s = common(sub.add_parser("verify-all", help="run the acceptance criteria"))
    s.add_argument("--inject", choices=("a2-sign",), default=None, help="negative control")
    s.set_defaults(func=cmd_verify_all)

    s = common(sub.add_parser("julia-cloud", help="inverse-iteration cloud"), fmt="csv")
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--start", default="0", help="seed point in the Julia set")
    s.set_defaults(func=cmd_julia_cloud)

    s = common(sub.add_parser("sigma", help="backward-orbit family"), fmt="csv")
    s.add_argument("--series", type=int, choices=(4, 5, 6), required=True)
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(func=cmd_sigma)

    s = common(sub.add_parser("dimension", help="Bowen dimension estimate"))
    s.add_argument("--depth", type=int, default=14, help="number of preimage levels k")
    s.add_argument("--start", default="0")
    s.set_defaults(func=cmd_dimension)

    s = common(sub.add_parser("eigenfunction", help="build, verify and export an eigenfunction"))
    s.add_argument("--series", type=int, choices=(4, 5, 6), default=6)
    s.add_argument("--word", default="tail=periodic:01")
    s.add_argument("--level", type=int, default=None)
    s.add_argument("--m", type=int, default=0, help="coarse scale of the seed")
    s.add_argument("--branch", default="", help="inverse branch symbols, e.g. '-+'")
    s.add_argument("--anchor", default="", help="digits of the anchor cell address")
    s.add_argument("--abc", default="1,0,0", help="4-series values at q0,q1,q2")
    s.add_argument("--check", help="verify an exported eigenfunction file instead")
    s.set_defaults(func=cmd_eigenfunction)

    s = common(sub.add_parser("pm-product", help="P_m products"), fmt="csv")
    s.add_argument("--lambda", dest="lam", action="append", default=[])
    s.add_argument("--m", type=int, default=1)
    s.set_defaults(func=cmd_pm_product)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
