"""Command line entry point: ``pomcp <subcommand> ...``.

Exit status is 0 iff every verification the command performed passed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .chirotope import Chirotope, check_axioms
from .cube import CubeOrientation, OrientationClassTable, classify_orientations, is_uso
from .database import parse_database
from .errors import ArgumentError, PomcpError
from .extension import ExtensionSignature, enumerate_uniform_extensions
from .lcp import LcpInstance, solve_spp
from .pipeline import (
    PipelineConfig,
    PipelineInterrupted,
    emit_report,
    parse_report,
    read_verdicts,
    run_pipeline,
    verify_counts,
)
from .pmatroid import PMatroidClassTable, enumerate_uniform_p_matroids
from .reference import REFERENCE


def _common(p: argparse.ArgumentParser, n_required: bool = True) -> None:
    p.add_argument("--n", type=int, required=n_required, help="cube dimension (2-4)")
    p.add_argument("--format", choices=("text", "delimited"), default="text")
    p.add_argument("--seed", type=int, default=0)


def _load_table(args) -> PMatroidClassTable:
    if getattr(args, "table", None):
        return PMatroidClassTable.load(args.table)
    if args.n is None:
        raise ArgumentError("--n is required unless a table or input file is given")
    if args.source == "database":
        reps = [r.chirotope() for r in parse_database(args.database)]
        return enumerate_uniform_p_matroids(args.n, "database", reps)
    return enumerate_uniform_p_matroids(args.n)


def _emit(rows: list[tuple[str, object]], fmt: str) -> None:
    if fmt == "delimited":
        for k, v in rows:
            print(f"{k}\t{v}")
    else:
        w = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k.ljust(w)}  {v}")


def cmd_pmatroids(args) -> int:
    table = _load_table(args)
    if args.out:
        table.save(args.out)
    _emit(
        [
            ("labeled_p_matroids", table.labeled_count),
            ("c_classes", table.c_count),
            ("cfs_classes", table.cfs_count),
        ],
        args.format,
    )
    if args.list:
        for chi, size in zip(table.representatives, table.sizes):
            print(f"{chi}\t{size}")
    return 0


def cmd_extend(args) -> int:
    bases = [Chirotope.from_string(args.chirotope)] if args.chirotope else _load_table(args).representatives
    if args.chirotope and not check_axioms(bases[0]):
        raise ArgumentError(f"{args.chirotope!r} violates the chirotope axioms")
    out = open(args.out, "w") if args.out else None
    total = 0
    rows = []
    for k, base in enumerate(bases):
        exts = enumerate_uniform_extensions(base)
        total += len(exts)
        rows.append((f"class_{k}", len(exts)))
        if out:
            for e in exts:
                out.write(f"{e}\n")
    if out:
        out.close()
    _emit(rows + [("extensions", total)], args.format)
    return 0


def cmd_orient(args) -> int:
    if args.extensions:
        lines = Path(args.extensions).read_text().splitlines()
        exts = [ExtensionSignature.from_string(x) for x in lines if x.strip()]
    else:
        exts = [e for base in _load_table(args).representatives for e in enumerate_uniform_extensions(base)]
    if not exts:
        print("no extensions given", file=sys.stderr)
        return 2
    table: OrientationClassTable = classify_orientations(exts)
    if args.out:
        table.save(args.out)
    all_uso = all(is_uso(CubeOrientation(table.n, k)) for k in table.iso)
    all_hk = all(c.holt_klee for c in table.iso.values())
    _emit(
        [
            ("orientations_iso", table.iso_count),
            ("acyclic", table.acyclic_count),
            ("orientations_fs", table.fs_count),
            ("all_uso", int(all_uso)),
            ("all_holt_klee", int(all_hk)),
        ],
        args.format,
    )
    return 0 if all_uso and all_hk else 1


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(
        n=args.n,
        source=args.source,
        database=args.database,
        workers=args.workers,
        checkpoint_dir=args.checkpoint_dir,
        mode=args.mode,
        seed=args.seed,
        max_units=args.max_units,
        stop_after=args.stop_after,
    )
    try:
        report = run_pipeline(cfg)
    except PipelineInterrupted as exc:
        print(f"interrupted: {exc}", file=sys.stderr)
        return 3
    text = emit_report(report, args.format, timings=args.timings)
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(emit_report(report, "delimited"))
    if args.verdicts:
        merged = report.realizability(read_verdicts(args.verdicts))
        tally = {v: sum(x == v for x in merged.values()) for v in ("yes", "no", "unknown")}
        print(
            f"realizability over {len(merged)} facet-switch classes: "
            f"yes {tally['yes']}, no {tally['no']}, unknown {tally['unknown']}"
        )
    return 0 if report.verified and report.matches_reference() else 1


def cmd_verify(args) -> int:
    text = sys.stdin.read() if args.report == "-" else Path(args.report).read_text()
    counts = parse_report(text)
    n = args.n or counts.get("n")
    ok = True
    for key, val, ref, good in verify_counts(counts, n):
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {key}: {val} (reference {ref})")
    for key in ("all_uso", "all_holt_klee"):
        if key in counts:
            ok &= counts[key] == 1
            print(f"{'PASS' if counts[key] == 1 else 'FAIL'}  {key}")
    return 0 if ok else 1


def cmd_lcp(args) -> int:
    if args.instance:
        inst = LcpInstance.from_text(Path(args.instance).read_text())
        res = solve_spp(inst, args.rule, args.start, args.seed)
        print("w = " + " ".join(str(x) for x in res.solution.w))
        print("z = " + " ".join(str(x) for x in res.solution.z))
        print(f"pivots = {res.pivots}")
        return 0
    from .crosscheck import cross_check, seeded_instances

    orders = (args.n,) if args.n else (2, 3, 4)
    failed = 0
    for k, inst in enumerate(seeded_instances(args.count, args.seed, orders, args.strategy)):
        c = cross_check(inst, args.rule, args.seed + k if args.rule == "random" else None)
        if not c.ok:
            failed += 1
            print(f"instance {k} (n={inst.n}) disagrees: {c}")
    _emit([("instances", args.count), ("failed", failed)], args.format)
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pomcp", description="P-matroid extensions and cube orientations")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def source_opts(p):
        p.add_argument("--source", choices=("backtracking", "database"), default="backtracking")
        p.add_argument("--database", help="catalogue file of reorientation-class representatives")
        p.add_argument("--table", help="saved P-matroid class table (skips enumeration)")

    p = sub.add_parser("pmatroids", help="uniform P-matroids up to C/CFS equivalence")
    _common(p)
    source_opts(p)
    p.add_argument("--out", help="write the class table here")
    p.add_argument("--list", action="store_true", help="print CFS representatives with orbit sizes")
    p.set_defaults(func=cmd_pmatroids)

    p = sub.add_parser("extend", help="uniform single-element extensions")
    _common(p, n_required=False)
    source_opts(p)
    p.add_argument("--chirotope", help="'r n signs' base instead of the class representatives")
    p.add_argument("--out", help="write one extension per line")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("orient", help="classify induced cube orientations")
    _common(p, n_required=False)
    source_opts(p)
    p.add_argument("--extensions", help="file of extensions as written by 'extend --out'")
    p.add_argument("--out", help="write the orientation class table here")
    p.set_defaults(func=cmd_orient)

    p = sub.add_parser("pipeline", help="run the whole census")
    _common(p)
    p.add_argument("--source", choices=("backtracking", "database"), default="backtracking")
    p.add_argument("--database")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint-dir", help="resume directory (default: $POMCP_CHECKPOINT_DIR)")
    p.add_argument("--mode", choices=("full", "count-only"), default="full")
    p.add_argument("--max-units", type=int, help="stop after this many new work units")
    p.add_argument("--stop-after", choices=("p-matroids",), help="end after the given stage")
    p.add_argument("--report", help="also write a delimited report here")
    p.add_argument("--verdicts", help="external realizability verdict file")
    p.add_argument("--timings", action="store_true", help="append wall times to the report")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="compare a delimited report with the reference counts")
    p.add_argument("report", help="report file, or - for stdin")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lcp", help="exact LCP utilities and numeric cross-checks")
    _common(p, n_required=False)
    p.add_argument("--instance", help="solve this instance file by simple principal pivoting")
    p.add_argument("--rule", choices=("least-index", "random"), default="least-index")
    p.add_argument("--start", type=int, default=0, help="starting basis bitmask")
    p.add_argument("--count", type=int, default=100, help="number of random instances to cross-check")
    p.add_argument("--strategy", choices=("diagonal-dominant", "accept-reject"), default="diagonal-dominant")
    p.set_defaults(func=cmd_lcp)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "source", None) == "database" and not getattr(args, "database", None):
        print("error: --source database needs --database FILE", file=sys.stderr)
        return 2
    if getattr(args, "n", None) is not None and args.n not in REFERENCE and args.n != 2:
        print(f"error: unsupported n={args.n}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except PomcpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
