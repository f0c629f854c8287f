"""Command-line front end.

    chball bounds   --n-max 8 --format csv
    chball optimize --n 3 --Q-min 2 --Q-max 64
    chball verify   --suite all --samples 1000 --seed 0
    chball approx   --n 3 --Q 17 --samples 5
    chball approx   --theta 0.1,0.7 --Q 10
    chball classify matrix.json
    chball distance --x 0.5,0 --y 0,0.25j

Exit codes: 0 success, 1 verification/validation failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys

import mpmath
import numpy as np

from chball import __version__
from chball import approx as ap
from chball import bounds as bd
from chball import hermitian_core as hc
from chball import isometry as iso
from chball import norms as nm
from chball import verification as vf
from chball import volume as vol
from chball.errors import InvalidInputError, IsometryValidationError, NotInBallError, ResourceLimitError

SIG_DIGITS = 10
MP_DIGITS = 12


class UsageError(Exception):
    pass


def _fmt(value, fmt: str):
    """Render one cell; json keeps plain numbers, mp values carry a marker."""
    if isinstance(value, mpmath.mpf):
        text = vol.format_extended(value, MP_DIGITS)
        return text
    if isinstance(value, (bool, np.bool_)):
        return bool(value) if fmt == "json-lines" else str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        if fmt == "json-lines":
            return float(value) if math.isfinite(value) else str(value)
        return f"{float(value):.{SIG_DIGITS}g}"
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def emit(rows: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if not rows:
        return
    cols = list(rows[0])
    if fmt == "json-lines":
        for row in rows:
            out.write(json.dumps({k: _fmt(row[k], fmt) for k in cols}) + "\n")
        return
    cells = [[str(_fmt(row[k], fmt)) for k in cols] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        writer.writerows(cells)
        out.write(buf.getvalue())
        return
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
    out.write("  ".join(c.rjust(w) for c, w in zip(cols, widths)) + "\n")
    for r in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")


def _header(args, command: str) -> None:
    if args.no_header:
        return
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "no_header")}
    stream = sys.stdout if getattr(args, "format", "table") == "table" else sys.stderr
    stream.write(f"# chball {__version__} {command} " + " ".join(f"{k}={v}" for k, v in opts.items()) + "\n")
    stream.write(f"# run at {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}\n")


def _mode(args) -> ap.ApproxMode:
    return ap.ApproxMode(args.mode)


# ---------------------------------------------------------------------- commands


def cmd_bounds(args) -> int:
    n_max = args.n_max if args.n_max is not None else max(args.n, 8)
    if not (2 <= args.n <= n_max <= 12):
        raise UsageError(f"need 2 <= n <= n-max <= 12, got n={args.n}, n-max={n_max}")
    _header(args, "bounds")
    extended = args.precision == "extended"
    rows = []
    for n in range(args.n, n_max + 1):
        res = bd.verify_paper_constant(n, omega=args.omega, mode=_mode(args))
        vols = vol.volume_bounds(n)
        row = {
            "n": n,
            "r_n": res.ball_radius,
            "delta_n": res.delta,
            "theorem_bound": res.bound_value,
            "omega": res.omega,
            "feasible": res.feasible,
        }
        for conv, v in vols.items():
            row[f"volume_{conv}"] = v.manifold_bound if extended else v.ball_vol
        rows.append(row)
    emit(rows, args.format)
    return 0


def cmd_optimize(args) -> int:
    _header(args, "optimize")
    n = args.n
    best = bd.max_delta(n, args.Q_min, args.Q_max, args.tol, omega=args.omega, mode=_mode(args))
    paper = bd.verify_paper_constant(n, omega=args.omega, mode=_mode(args))
    extended = args.precision == "extended"
    rows = []
    for label, res in (("optimized", best), ("published", paper)):
        radius = res.ball_radius
        v = vol.manifold_volume_bound(n, radius) if radius > 0 else None
        rows.append(
            {
                "source": label,
                "n": n,
                "Q": res.Q,
                "delta": res.delta,
                "ball_radius": radius,
                "bound_value": res.bound_value,
                "omega": res.omega,
                "feasible": res.feasible,
                "volume_printed": (v.manifold_bound if extended else v.ball_vol) if v else float("nan"),
                "tol": args.tol,
            }
        )
    emit(rows, args.format)
    return 0 if best.feasible else 1


def cmd_approx(args) -> int:
    _header(args, "approx")
    rows = []
    if args.theta:
        try:
            thetas = [float(t) for t in args.theta.split(",")]
        except ValueError as exc:
            raise UsageError(f"--theta must be a comma-separated list of reals: {exc}") from None
        rec = ap.dirichlet_approx(thetas, args.Q)
        rows.append(
            {
                "m": rec.m,
                "Q": rec.Q,
                "q": rec.q,
                "p": " ".join(map(str, rec.p)),
                "max_err": rec.max_err,
                "bound": 1.0 / (rec.q * rec.Q),
                "holds": rec.certificate_holds(),
            }
        )
        emit(rows, args.format)
        return 0 if rec.certificate_holds() else 1
    ok = True
    rng = np.random.default_rng(args.seed)
    for i in range(args.samples):
        A = iso.random_unitary(args.n, rng=rng)
        fo = ap.finite_order_approx(A, args.Q, _mode(args))
        gap = nm.operator_norm(np.linalg.matrix_power(fo.B, fo.q) - np.eye(args.n))
        good = fo.err <= fo.bound + 1e-12 and gap <= 1e-9
        ok &= good
        rows.append(
            {
                "sample": i,
                "n": args.n,
                "mode": fo.mode.value,
                "q": fo.q,
                "err": fo.err,
                "bound": fo.bound,
                "order_residual": gap,
                "holds": good,
            }
        )
    emit(rows, args.format)
    return 0 if ok else 1


def _parse_point(text: str, name: str) -> hc.BallPoint:
    try:
        coords = [complex(t.strip().replace(" ", "")) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} must be comma-separated complex numbers like 0.5,0.1+0.2j") from None
    try:
        return hc.BallPoint(coords)
    except NotInBallError as exc:
        raise UsageError(f"{name}: {exc}") from None


def cmd_distance(args) -> int:
    _header(args, "distance")
    x = _parse_point(args.x, "--x")
    y = _parse_point(args.y, "--y") if args.y else hc.BallPoint.origin(x.n)
    if x.n != y.n:
        raise UsageError("--x and --y must have the same dimension")
    row = {"n": x.n, "distance": hc.bergman_distance(x, y)}
    if args.matrix:
        A = iso.verify_su(_read_matrix(args.matrix))
        row["distance_after"] = hc.bergman_distance(iso.apply(A, x), iso.apply(A, y))
    emit([row], args.format)
    return 0


def _read_matrix(path) -> np.ndarray:
    try:
        return iso.load_matrix(path)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse matrix file {path}: {exc}") from None


def cmd_classify(args) -> int:
    mat = _read_matrix(args.matrix)
    _header(args, "classify")
    res = iso.su_residuals(mat)
    try:
        A = iso.verify_su(mat)
    except IsometryValidationError as exc:
        sys.stdout.write(f"validation failed: {exc}\n")
        emit([{"j_unitarity_residual": res["j_unitarity"], "determinant_residual": res["determinant"]}], args.format)
        return 1
    origin = hc.BallPoint.origin(A.n)
    cert = nm.dist_to_unitary(A)
    moduli = np.sort(np.abs(np.linalg.eigvals(A.mat)))[::-1]
    row = {
        "n": A.n,
        "class": iso.classify(A, args.tol).value,
        "j_unitarity_residual": res["j_unitarity"],
        "determinant_residual": res["determinant"],
        "eigenvalue_moduli": " ".join(f"{m:.{SIG_DIGITS}g}" for m in moduli),
        "eigvec_condition": iso.eigenvector_condition(A),
        "operator_norm": nm.operator_norm(A),
        "jorgensen": nm.jorgensen_quantity(A),
        "origin_displacement": hc.bergman_distance(origin, iso.apply(A, origin)),
        "r": cert.r,
        "dist_witness": cert.actual,
        "dist_bound": cert.bound,
        "certificate_holds": cert.holds,
    }
    emit([row], args.format)
    return 0


def cmd_verify(args) -> int:
    if args.replay:
        try:
            with open(args.replay) as fh:
                rec = json.loads(fh.readline())
            out = vf.run_instance(rec["suite"], rec["check"], int(rec["seed"]), int(rec["index"]), rec.get("tol"))
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot replay {args.replay}: {exc}") from None
        _header(args, "verify")
        emit([_outcome_row(out)], args.format)
        return 0 if out.passed else 1
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    _header(args, "verify")
    reports = vf.run_suites(args.suite, args.samples, args.seed, args.tol)
    rows = []
    failures = []
    for rep in reports:
        rows.append(
            {
                "suite": rep.suite,
                "check": rep.check,
                "samples": rep.samples,
                "failed": len(rep.failures),
                "worst_margin": rep.worst.margin,
                "status": "pass" if rep.passed else "FAIL",
            }
        )
        failures.extend(rep.failures)
    emit(rows, args.format)
    for out in failures[:20]:
        sys.stderr.write("replay: " + json.dumps(out.replay_record(args.tol)) + "\n")
    if args.dump_failures and failures:
        with open(args.dump_failures, "w") as fh:
            for out in failures:
                fh.write(json.dumps(out.replay_record(args.tol)) + "\n")
    return 0 if not failures else 1


def _outcome_row(out: vf.Outcome) -> dict:
    return {
        "suite": out.suite,
        "check": out.check,
        "seed": out.seed,
        "index": out.index,
        "margin": out.margin,
        "status": "pass" if out.passed else "FAIL",
        "detail": json.dumps(out.detail, sort_keys=True),
    }


# ------------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json-lines"), default="table")
    common.add_argument("--no-header", action="store_true", help="suppress the run header")
    common.add_argument("--precision", choices=("double", "extended"), default="double")

    chain = argparse.ArgumentParser(add_help=False)
    chain.add_argument("--mode", choices=[m.value for m in ap.ApproxMode], default="projective")
    chain.add_argument("--omega", choices=sorted(bd.OMEGA_CHOICES), default="fh")

    parser = argparse.ArgumentParser(prog="chball", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common, chain], help="table of radii, constants and volume bounds")
    p.add_argument("--n", type=int, default=2, help="first dimension (default 2)")
    p.add_argument("--n-max", type=int, default=None, help="last dimension (default 8)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("optimize", parents=[common, chain], help="search (Q, delta) for a larger radius")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--Q-min", dest="Q_min", type=float, default=2.0)
    p.add_argument("--Q-max", dest="Q_max", type=float, default=64.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", parents=[common], help="run randomised invariant suites")
    p.add_argument("--suite", choices=vf.SUITE_NAMES, default="all")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="override every check's slack")
    p.add_argument("--replay", metavar="FILE", help="rerun one serialised instance")
    p.add_argument("--dump-failures", metavar="FILE", help="write failing instances as JSON lines")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("approx", parents=[common, chain], help="pigeonhole and finite-order approximation demos")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--Q", type=float, default=17.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--theta", help="comma-separated angles in [0,1] for a single pigeonhole run")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("classify", parents=[common], help="validate and classify a matrix file")
    p.add_argument("matrix", help='JSON file {"n": n, "mat": [[re, im], ...]}')
    p.add_argument("--tol", type=float, default=iso.LOXODROMIC_TOL)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("distance", parents=[common], help="Bergman distance between ball points")
    p.add_argument("--x", required=True, help="comma-separated complex coordinates")
    p.add_argument("--y", help="second point (default: origin)")
    p.add_argument("--matrix", help="also report the distance after applying this isometry")
    p.set_defaults(func=cmd_distance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (InvalidInputError, ResourceLimitError) as exc:
        sys.stderr.write(f"chball: error: {exc}\n")
        return 2
    except (IsometryValidationError, NotInBallError) as exc:
        sys.stderr.write(f"chball: validation failed: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
