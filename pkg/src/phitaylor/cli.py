"""Command line interface: ``phitaylor {phi,phiv,combo,theta,bench}``.

Exit status is 0 on success, 2 on usage errors and 1 on numerical, domain
or I/O errors.
"""
import argparse
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .action import _scaled, phi_action, phi_combo
from .dense import STRATEGIES, phi_dense
from .exceptions import PhiError, ShapeError
from .matrix import OpCounter, SparseMatrix, to_dense
from .mmio import read_matrix_market, write_matrix_market
from .params import select_action, select_costmin, select_sequential
from .reference import affine_flow_ref, phi_action_ref, phi_ref, rel_err_1, rel_err_2
from .report import RunReport
from .suite import CATALOG, fetch_suite
from .theta import DEFAULT_M_MAX, DOUBLE_TOL, build_theta_table

VECTOR_KINDS = ("ones", "e1", "ends")

# (t, vector) per benchmark matrix; helm2d03 only runs with --large
BENCH_PRESETS = {
    "orani678": (10.0, "ones"),
    "bcspwr10": (2.0, "ends"),
    "gr_30_30": (2.0, "ones"),
    "helm2d03": (2.0, "ones"),
}
LARGE_ONLY = ("helm2d03",)


def parse_tol(text):
    """Accept ``2^-53``, ``2**-53`` or any float literal."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:\^|\*\*)\s*(-?\d+)\s*", text)
    try:
        value = float(Fraction(int(match[1])) ** int(match[2])) if match else float(text)
    except (ValueError, OverflowError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid tolerance {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {text!r}")
    return value


def load_matrix(source, cache_dir=None, offline=False):
    """Read ``source`` as a Matrix Market path, or fetch it by catalog name."""
    path = Path(source)
    if not path.exists() and source in CATALOG:
        path = fetch_suite(source, cache_dir=cache_dir, offline=offline)
    name = path.stem
    return name, read_matrix_market(path)


def make_vector(source, n):
    if source == "ones":
        return np.ones(n)
    if source == "e1":
        v = np.zeros(n)
        v[0] = 1.0
        return v
    if source == "ends":
        v = np.zeros(n)
        v[0] = 1.0
        v[-1] = 1.0
        return v
    path = Path(source)
    if path.suffix == ".mtx":
        v = read_matrix_market(path)
        v = to_dense(v) if isinstance(v, SparseMatrix) else v
        v = np.asarray(v).reshape(-1)
    else:
        v = np.loadtxt(path, dtype=complex if "j" in path.read_text() else float,
                       ndmin=1)
    if v.shape != (n,):
        raise ShapeError(f"vector file {source} has {v.size} entries, expected {n}")
    return v


def _emit(report, target):
    if target is None:
        return
    text = report.to_json()
    if target == "-":
        print(text)
    else:
        Path(target).write_text(text + "\n")


def _summary(report):
    parts = [f"{report.name}: n={report.n} nnz={report.nnz} m={report.m} s={report.s}",
             f"matmuls={report.matmuls} matvecs={report.matvecs}",
             f"time={report.seconds:.3f}s"]
    if report.rel_err is not None:
        parts.append(f"rel_err={report.rel_err:.3e}")
    return " ".join(parts)


def cmd_phi(args):
    name, a = load_matrix(args.input, args.cache_dir, args.offline)
    a = to_dense(a) if isinstance(a, SparseMatrix) else a
    counter = OpCounter()
    select = select_sequential if args.strategy == "sequential" else select_costmin
    start = time.perf_counter()
    params = select(a, counter=counter)
    y = phi_dense(a, args.strategy, counter=counter, params=params)
    seconds = time.perf_counter() - start
    err = rel_err_1(y, phi_ref(a)) if args.check else None
    report = RunReport.from_run(name, a, params, counter, seconds, err)
    print(_summary(report))
    _emit(report, args.json_report)
    if args.output:
        write_matrix_market(args.output, y)
    return 0


def cmd_phiv(args):
    name, a = load_matrix(args.input, args.cache_dir, args.offline)
    b = make_vector(args.vector, a.shape[0])
    counter = OpCounter()
    start = time.perf_counter()
    ta = _scaled(a, args.t)
    params = select_action(ta, m_max=args.mmax, counter=counter)
    y = phi_action(ta, b, counter=counter, params=params)
    seconds = time.perf_counter() - start
    err = rel_err_2(y, phi_action_ref(a, b, args.t)) if args.check else None
    report = RunReport.from_run(name, a, params, counter, seconds, err)
    print(_summary(report))
    _emit(report, args.json_report)
    if args.output:
        np.savetxt(args.output, y)
    return 0


def run_combo(name, a, t, b0, b1, m_max, check):
    counter = OpCounter()
    start = time.perf_counter()
    ta = _scaled(a, t)
    params = select_action(ta, m_max=m_max, counter=counter)
    y = phi_combo(a, t, b0, b1, counter=counter, m_max=m_max, params=params)
    seconds = time.perf_counter() - start
    err = rel_err_2(y, affine_flow_ref(a, t, b0, b1)) if check else None
    return y, RunReport.from_run(name, a, params, counter, seconds, err)


def cmd_combo(args):
    name, a = load_matrix(args.input, args.cache_dir, args.offline)
    n = a.shape[0]
    b0 = make_vector(args.b0, n)
    b1 = make_vector(args.b1, n)
    y, report = run_combo(name, a, args.t, b0, b1, args.mmax, args.check)
    print(_summary(report))
    _emit(report, args.json_report)
    if args.output:
        np.savetxt(args.output, y)
    return 0


def cmd_theta(args):
    start = time.perf_counter()
    table = build_theta_table(args.mmax, args.tol)
    text = table.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"# {table.m_max} values in {time.perf_counter() - start:.1f}s",
          file=sys.stderr)
    return 0


def cmd_bench(args):
    names = args.names or [n for n in BENCH_PRESETS if args.large or n not in LARGE_ONLY]
    status = 0
    out = open(args.json_report, "w") if args.json_report not in (None, "-") else None
    try:
        for name in names:
            if name not in BENCH_PRESETS:
                print(f"{name}: unknown benchmark; choose from {', '.join(BENCH_PRESETS)}",
                      file=sys.stderr)
                status = 1
                continue
            t, kind = BENCH_PRESETS[name]
            try:
                _, a = load_matrix(name, args.cache_dir, args.offline)
                b = make_vector(kind, a.shape[0])
                check = args.check and name not in LARGE_ONLY
                _, report = run_combo(name, a, t, b, b, args.mmax, check)
            except PhiError as exc:
                print(f"{name}: {exc}", file=sys.stderr)
                status = 1
                continue
            print(_summary(report), file=sys.stderr)
            line = report.to_json()
            if out is not None:
                out.write(line + "\n")
            else:
                print(line)
    finally:
        if out is not None:
            out.close()
    return status


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phitaylor",
        description="phi(A) = (e^A - I)/A by truncated Taylor series.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="matrix cache (default $PHITAYLOR_CACHE)")
    common.add_argument("--offline", action="store_true", help="never use the network")
    common.add_argument("--json-report", metavar="PATH",
                        help="write a JSON run report ('-' for stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", parents=[common], help="dense phi(A)")
    p.add_argument("--input", required=True, help="Matrix Market file or catalog name")
    p.add_argument("--strategy", choices=STRATEGIES, default="costmin")
    p.add_argument("--check", action="store_true", help="compare with the reference")
    p.add_argument("--output", help="write phi(A) as a Matrix Market array")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("phiv", parents=[common], help="phi(tA) b without forming phi")
    p.add_argument("--input", required=True, help="Matrix Market file or catalog name")
    p.add_argument("--vector", default="ones",
                   help="ones, e1, ends (e1 + eN) or a vector file")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--mmax", type=int, default=DEFAULT_M_MAX)
    p.add_argument("--check", action="store_true")
    p.add_argument("--output", help="write the result as text")
    p.set_defaults(func=cmd_phiv)

    p = sub.add_parser("combo", parents=[common], help="exp(tA) b0 + t phi(tA) b1")
    p.add_argument("--input", required=True, help="Matrix Market file or catalog name")
    p.add_argument("--b0", default="ones")
    p.add_argument("--b1", default="ones")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--mmax", type=int, default=DEFAULT_M_MAX)
    p.add_argument("--check", action="store_true")
    p.add_argument("--output", help="write the result as text")
    p.set_defaults(func=cmd_combo)

    p = sub.add_parser("theta", help="regenerate the theta_m table")
    p.add_argument("--mmax", type=int, default=DEFAULT_M_MAX)
    p.add_argument("--tol", type=parse_tol, default=DOUBLE_TOL)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("bench", parents=[common], help="run the benchmark matrices")
    p.add_argument("names", nargs="*", help="subset of benchmark names")
    p.add_argument("--large", action="store_true", help="include helm2d03 (no check)")
    p.add_argument("--check", action="store_true")
    p.add_argument("--mmax", type=int, default=DEFAULT_M_MAX)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PhiError, OSError, FloatingPointError) as exc:
        print(f"phitaylor {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
