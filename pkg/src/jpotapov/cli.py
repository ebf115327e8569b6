"""Command-line front end.

Exit codes
----------
0   success (check: the sequence is strict)
1   verify found a failing check
2   usage error or malformed JSON input
10  check: the sequence is degenerate
20  invalid input (not J-Potapov, bad parameter, bad point, ...)
30  a point is outside the common holomorphy set
40  the operation needs a strict sequence

Machine output goes to stdout, diagnostics to stderr. ``--tol X`` sets the
eigenvalue slack and the residual slack to X; the environment variable
``JPOTAPOV_TOL`` does the same when the flag is absent.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .errors import InvalidParam, PotapovError
from .matkernel import DEFAULT_TOL, Tolerances, hermitian_part
from .sequence import Classification, PotapovSeq, extend_central
from .serialize import complex_from_json, complex_to_json, dumps, matrix_to_json
from .solve import SchurParam, lft_solution, taylor_coeffs, uniqueness
from .verify import run_suite
from .weyl import limit_study, weyl_ball

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_VERIFY_FAIL, EXIT_MALFORMED, EXIT_DEGENERATE = 0, 1, 2, 10
_CLASS_EXIT = {Classification.STRICT: EXIT_OK, Classification.DEGENERATE: EXIT_DEGENERATE,
               Classification.INVALID: 20}


class _Malformed(Exception):
    pass


class _Problem:
    """Parsed input: sequence, optional parameter, evaluation points, tolerances."""

    def __init__(self, seq, param=None, points=()):
        self.seq, self.param, self.points = seq, param, list(points)


def _parse_point(text):
    try:
        re_, im_ = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None
    return complex(re_, im_)


def _disk_mesh(radius, count):
    # sunflower spiral: roughly uniform coverage of the disk of the given radius
    k = np.arange(count)
    angle = np.pi * (3 - np.sqrt(5)) * k
    return list(radius * np.sqrt((k + 0.5) / count) * np.exp(1j * angle))


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise _Malformed(f"{path}: {exc}") from None
    except OSError as exc:
        raise _Malformed(f"{path}: {exc.strerror}") from None


def _tolerances(obj, flag):
    base = DEFAULT_TOL
    if isinstance(obj, dict):
        base = Tolerances(**{k: float(obj.get(k, getattr(DEFAULT_TOL, k)))
                             for k in ("rank_rel", "psd_eig", "residual")})
    env = os.environ.get("JPOTAPOV_TOL")
    slack = flag if flag is not None else (float(env) if env else None)
    if slack is not None:
        base = Tolerances(base.rank_rel, slack, slack)
    return base


def _load_problem(args):
    if args.input is None:
        raise _Malformed("--input is required")
    obj = _read_json(args.input)
    try:
        wrapped = isinstance(obj, dict) and "sequence" in obj
        tol = _tolerances(obj.get("tolerances") if wrapped else None, args.tol)
        seq = PotapovSeq.from_json(obj["sequence"] if wrapped else obj, tol)
        param = None
        if wrapped and obj.get("parameter") is not None:
            param = SchurParam.from_json(obj["parameter"])
        if getattr(args, "param", None):
            param = SchurParam.from_json(_read_json(args.param))
        points = []
        grid = obj.get("grid") if wrapped else None
        if isinstance(grid, dict) and "points" in grid:
            points = [complex_from_json(p) for p in grid["points"]]
        elif isinstance(grid, dict) and "disk_mesh" in grid:
            mesh = grid["disk_mesh"]
            points = _disk_mesh(float(mesh["radius"]), int(mesh["count"]))
        elif grid is not None:
            raise ValueError("grid needs key 'points' or 'disk_mesh'")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PotapovError):
            raise
        raise _Malformed(f"schema error: {exc}") from None
    if getattr(args, "point", None):
        points = list(args.point)
    for w in points:
        if abs(w) >= 1:
            raise InvalidParam(f"evaluation point {w} is not in the open unit disk")
    return _Problem(seq, param, points)


def _emit(obj):
    sys.stdout.write(dumps(obj) + "\n")


def _ball_json(order, b):
    return {"order": order, "M": matrix_to_json(b.M), "L": matrix_to_json(b.L), "R": matrix_to_json(b.R)}


def cmd_check(args):
    seq = _load_problem(args).seq
    cls = seq.classification
    report = {
        "classification": cls.value,
        "m": seq.m,
        "n": seq.n,
        "balls": [_ball_json(k + 1, b) for k, b in enumerate(seq.computed_balls)],
        "uniqueness": uniqueness(seq).verdict if seq.is_potapov else None,
    }
    _emit(report)
    if cls is Classification.INVALID:
        print(f"sequence is not J-Potapov; first {len(seq.computed_balls)} ball(s) exist", file=sys.stderr)
    return _CLASS_EXIT[cls]


def cmd_solve(args):
    prob = _load_problem(args)
    seq = prob.seq
    f = lft_solution(seq, prob.param)
    taylor = taylor_coeffs(f, seq.n + 3)
    residual = max(float(np.abs(a - b).max()) for a, b in zip(taylor, seq.coeffs))
    _emit({
        "function": f.to_json(),
        "taylor": [matrix_to_json(c) for c in taylor],
        "residual": residual,
        "singular_points": [complex_to_json(z) for z in f.singular_points()],
    })
    if residual > seq.tol.residual * seq.scale:
        print(f"warning: interpolation residual {residual:.3e} exceeds tolerance", file=sys.stderr)
    return EXIT_OK


def _eig(H):
    return [repr(float(x)) for x in np.linalg.eigvalsh(hermitian_part(H))]


def cmd_weyl(args):
    prob = _load_problem(args)
    if not prob.points:
        raise _Malformed("weyl needs evaluation points (--point or a grid in the input)")
    balls = [weyl_ball(prob.seq, w) for w in prob.points]
    if args.format == "json":
        _emit([b.to_json() for b in balls])
        return EXIT_OK
    m = prob.seq.m
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["w_re", "w_im", "order"]
                 + [f"M{i}{j}_{p}" for i in range(m) for j in range(m) for p in ("re", "im")]
                 + [f"eigLnorm{i}" for i in range(m)] + [f"eigRhalf{i}" for i in range(m)])
    for b in balls:
        out.writerow([repr(b.w.real), repr(b.w.imag), b.n]
                     + [repr(float(getattr(z, p))) for z in b.M.ravel() for p in ("real", "imag")]
                     + _eig(b.Lnorm) + _eig(b.Rhalf))
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_limit(args):
    prob = _load_problem(args)
    if len(prob.points) != 1:
        raise _Malformed("limit needs exactly one evaluation point")
    seq = prob.seq
    N = seq.n if args.order is None else args.order
    if N < 0:
        raise InvalidParam("--order must be nonnegative")
    tower = extend_central(seq, N - seq.n) if N > seq.n else seq
    table = limit_study(tower, prob.points[0], N)
    if args.format == "json":
        _emit({
            "w": complex_to_json(table.w),
            "stagnation_order": table.stagnation_order,
            "rows": [{"order": r.order, "M": matrix_to_json(r.M), "L": matrix_to_json(r.L),
                      "R": matrix_to_json(r.R), "rankL": r.rankL, "rankR": r.rankR} for r in table.rows],
        })
    else:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def cmd_pg(args):
    from .sequence import pg_transform_seq

    _emit(pg_transform_seq(_load_problem(args).seq).to_json())
    return EXIT_OK


def cmd_verify(args):
    failed = 0
    for r in run_suite(args.seed, args.count):
        print(r.line())
        failed += not r.passed
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="jpotapov", description="J-Potapov interpolation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, fmt="json"):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(func=fn)
        s.add_argument("--tol", type=float, default=None, help="eigenvalue and residual slack override")
        if name != "verify":
            s.add_argument("--input", metavar="FILE", help="problem or sequence JSON ('-' for stdin)")
        s.add_argument("--format", choices=("json", "csv"), default=fmt)
        return s

    add("check", cmd_check, "classify a sequence and print its ball parameters")
    add("solve", cmd_solve, "emit a solution and its Taylor check").add_argument(
        "--param", metavar="FILE", help="Schur parameter JSON")
    w = add("weyl", cmd_weyl, "Weyl matrix balls at points")
    w.add_argument("--point", type=_parse_point, action="append", metavar="RE,IM")
    lim = add("limit", cmd_limit, "ball parameters along the central tower", fmt="csv")
    lim.add_argument("--point", type=_parse_point, action="append", metavar="RE,IM")
    lim.add_argument("--order", type=int, default=None, metavar="N")
    add("pg", cmd_pg, "Potapov-Ginzburg transform to the Schur side")
    v = add("verify", cmd_verify, "run the seeded identity suite")
    v.add_argument("--seed", type=int, default=0, metavar="S")
    v.add_argument("--count", type=int, default=20, metavar="C")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PotapovError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
