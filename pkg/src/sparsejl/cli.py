"""``sparsejl`` command line.

Data (records, vectors, tables) goes to stdout or ``--output``; warnings and
diagnostics go to stderr. Indices in every file and stream are 0-based.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from sparsejl import bench, verification
from sparsejl.formats import (FormatError, SketchRecord, format_dense, parse_update,
                              parse_vector)
from sparsejl.params import DEFAULT_SEED, ParameterError, derive_params, hadamard_threshold, validate_assumptions
from sparsejl.transforms import auto_apply, make_transform

BATCH = 4096


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def cmd_params(args) -> int:
    if args.dim is None:
        _err("error: params needs --dim")
        return 2
    p = derive_params(args.epsilon, args.delta, args.dim, args.seed)
    _write(p.to_record(), args.output)
    for w in validate_assumptions(p):
        _err(str(w))
    return 0


def cmd_transform(args) -> int:
    x = parse_vector(_read(args.input))
    p = derive_params(args.epsilon, args.delta, x.dim, args.seed)
    if args.path == "auto":
        y, taken = auto_apply(p, x)
        _err(f"path={taken}")
    else:
        t = make_transform(args.path, p)
        y = t.apply(x)
    _write(format_dense(y), args.output)
    if args.report_norms:
        xc = x.coalesce()
        nx = float(np.dot(xc.values, xc.values))
        ny = float(np.dot(y, y))
        _err(f"input_sq_norm={nx!r}")
        _err(f"output_sq_norm={ny!r}")
        _err(f"relative_distortion={(ny - nx) / nx if nx else math.nan!r}")
        if args.path == "l1":
            _err(f"l1_estimate={t.estimate_from(y)!r}")
    return 0


def cmd_sketch(args) -> int:
    if args.merge:
        recs = [SketchRecord.from_text(_read(f)) for f in args.merge]
        out = recs[0]
        for r in recs[1:]:
            out = out.merge(r)
        _write(out.to_text(), None)
        if args.output:
            _write(format_dense(out.sketch.accumulator), args.output)
        return 0
    if args.dim is None:
        _err("error: sketch needs --dim (or --merge)")
        return 2
    if args.path == "auto":
        _err("error: the auto path is not a fixed linear map; choose phi, hg or l1 for sketching")
        return 2
    rec = SketchRecord.new(args.path, args.epsilon, args.delta, args.dim, args.seed)
    sk = rec.sketch
    idx, val = [], []
    bad = 0
    for n, line in enumerate(sys.stdin, start=1):
        try:
            upd = parse_update(line, n, args.dim)
        except FormatError as e:
            _err(f"sketch: {e}")
            if args.strict:
                return 1
            bad += 1
            continue
        if upd is None:
            continue
        idx.append(upd[0])
        val.append(upd[1])
        if len(idx) == BATCH:
            sk.update_many(idx, val)
            idx, val = [], []
    if idx:
        sk.update_many(idx, val)
    if bad:
        _err(f"sketch: skipped {bad} malformed line(s)")
    _write(rec.to_text(), None)
    if args.output:
        _write(format_dense(sk.accumulator), args.output)
    return 0


def _default_verify_dim(path: str, p_c: int, delta: float) -> int:
    if path == "hg":
        d = 1
        while d <= hadamard_threshold(p_c, delta):
            d <<= 1
        return d
    return 64 if path == "l1" else 256


def cmd_verify(args) -> int:
    probe = derive_params(args.epsilon, args.delta, 1, args.seed)
    path = "phi" if args.path == "auto" else args.path
    d = args.dim or _default_verify_dim(path, probe.c, args.delta)
    p = derive_params(args.epsilon, args.delta, d, args.seed)
    sched = args.seed
    reports = []
    if path == "l1":
        reports.append(verification.l1_property_check(p, args.trials, sched))
    else:
        families = [args.family] if args.family else ["sphere", "e1", "heavy"]
        for fam in families:
            reports.append(verification.estimate_failure_rate(p, path, args.trials, fam, sched))
        if path == "phi":
            gp = derive_params(args.epsilon, args.delta, min(d, 64), args.seed)
            reports.append(verification.goodness_rate(gp, args.trials, sched))
        else:
            x = np.zeros(d)
            x[0] = 1.0
            reports.append(verification.infnorm_tail_rate(p, args.trials, x, sched))
    _write("\n".join(r.to_record() for r in reports), args.output)
    ok = all(r.passed for r in reports)
    _err(f"verify: {'PASS' if ok else 'FAIL'} ({sum(r.passed for r in reports)}/{len(reports)} reports within bound)")
    return 0 if ok else 1


def cmd_bench(args) -> int:
    p = derive_params(args.epsilon, args.delta, 1 << 20, args.seed)
    rows = ["path\td\tnnz\tseconds\tseconds_per_nonzero"]
    prev = None
    ratios = []
    for e in range(args.min_log_nnz, args.max_log_nnz + 1):
        t = bench.time_phi(p.k, p.c, 1 << 20, 1 << e, args.seed)
        rows.append(f"phi\t{t.d}\t{t.nnz}\t{t.seconds!r}\t{t.per_nonzero!r}")
        if prev is not None:
            ratios.append(t.seconds / prev)
        prev = t.seconds
    for e in range(args.min_log_d, args.max_log_d + 1):
        t = bench.time_hg(p.k, p.b, 1 << e, args.seed)
        rows.append(f"hg\t{t.d}\t{t.nnz}\t{t.seconds!r}\t{t.per_nonzero!r}")
    _write("\n".join(rows) + "\n", args.output)
    for r in ratios:
        _err(f"phi_doubling_ratio={r!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=0.5, help="target distortion, 0 < eps < 1")
    common.add_argument("--delta", type=float, default=0.05, help="failure probability, 0 < delta < 1/10")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--output", help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="sparsejl", description="Sparse Johnson-Lindenstrauss transforms.")
    sub = parser.add_subparsers(dest="command", metavar="{params,transform,sketch,verify,bench}")
    sub.required = True

    sp = sub.add_parser("params", parents=[common], help="print derived constants")
    sp.add_argument("--dim", "-d", type=int)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("transform", parents=[common], help="project a vector file")
    sp.add_argument("--input", help="vector file (default stdin)")
    sp.add_argument("--path", choices=["phi", "hg", "auto", "l1"], default="phi")
    sp.add_argument("--report-norms", action="store_true", help="print norms and distortion to stderr")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("sketch", parents=[common], help="sketch '<index> <delta>' lines from stdin")
    sp.add_argument("--dim", "-d", type=int)
    sp.add_argument("--path", choices=["phi", "hg", "auto", "l1"], default="phi")
    sp.add_argument("--strict", action="store_true", help="abort on the first malformed line")
    sp.add_argument("--merge", nargs="+", metavar="FILE", help="merge serialized sketch records instead")
    sp.set_defaults(func=cmd_sketch)

    sp = sub.add_parser("verify", parents=[common], help="Monte Carlo checks of the probability bounds")
    sp.add_argument("--path", choices=["phi", "hg", "auto", "l1"], default="phi")
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--dim", "-d", type=int)
    sp.add_argument("--family", choices=["sphere", "e1", "heavy", "zero"])
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", parents=[common], help="timing table for phi and hg")
    sp.add_argument("--min-log-nnz", type=int, default=10)
    sp.add_argument("--max-log-nnz", type=int, default=13)
    sp.add_argument("--min-log-d", type=int, default=19)
    sp.add_argument("--max-log-d", type=int, default=20)
    sp.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FormatError, ValueError, IndexError, OSError) as e:
        _err(f"error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
