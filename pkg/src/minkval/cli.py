"""Command-line front end: ``minkval {compute,verify,sweep,petty}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bodies
from .errors import DegenerateBodyError, GeometryError, OriginNotInteriorError
from .polar import petty_bound, polar_volume
from .polytope import Polytope, read_polytope, volume
from .quadrature import make_quadrature
from .valuations import ValuationParams, phi, projection_body, zonotope_support, zonotope_to_dict
from .verify import QUAD_TOL, reports_to_csv, reports_to_jsonl, run_suite, summarize

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

SWEEP_COLUMNS = ("lambda", "polar_volume", "affine_product", "ratio_to_ball_bound")

BUILTINS = {
    "cube": lambda arg: bodies.cube(3, float(arg) if arg else 1.0),
    "simplex": lambda arg: bodies.standard_simplex(int(arg) if arg else 3),
    "corner-simplex": lambda arg: bodies.corner_simplex(int(arg) if arg else 3),
    "ball": lambda arg: bodies.geodesic_ball(int(arg) if arg else 3),
    "point": lambda arg: bodies.convex_hull([[1.0, 0.0, 0.0]]),
}


def load_body(spec: str) -> Polytope:
    """A polytope file path, or ``builtin:NAME[:ARG]`` (cube, simplex, corner-simplex, ball, point)."""
    if spec.startswith("builtin:"):
        name, _, arg = spec[len("builtin:"):].partition(":")
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin body {name!r}; choose from {', '.join(BUILTINS)}")
        return BUILTINS[name](arg)
    return read_polytope(spec)


def _fmt(x: float) -> str:
    return "%.17g" % x


def sample_directions(n: int) -> np.ndarray:
    """Coordinate directions, their negatives, and the normalized all-ones vector."""
    ones = np.ones((1, n)) / np.sqrt(n)
    return np.concatenate([np.eye(n), -np.eye(n), ones, -ones]) + 0.0


def write_output(text: str, out: Optional[str]) -> None:
    """Write ``text`` to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) if isinstance(x, float) else ("" if x is None else x) for x in row])
    return buf.getvalue()


# -- commands ------------------------------------------------------------------

def compute_document(K: Polytope, p: ValuationParams, level: int, seed: int) -> dict:
    Z = phi(K, p)
    n = K.dim
    samples = [{"u": u.tolist(), "h": zonotope_support(Z, u)} for u in sample_directions(n)]
    doc = {"dim": n, "params": {"c1": p.c1, "c2": p.c2}, "phi": zonotope_to_dict(Z),
           "support_samples": samples, "quad_level": level,
           "polar_volume": None, "polar_volume_reason": None}
    if Z.rank < n:
        doc["polar_volume_reason"] = (f"Phi K has rank {Z.rank} < {n}: "
                                      "0 is not interior, the polar body is unbounded")
    else:
        try:
            doc["polar_volume"] = polar_volume(Z, make_quadrature(n, level, seed))
        except OriginNotInteriorError as exc:
            doc["polar_volume_reason"] = str(exc)
    return doc


def compute_csv(doc: dict) -> str:
    n = doc["dim"]
    header = ["record", "index", *[f"x{i + 1}" for i in range(n)], "value"]
    rows = []
    for i, g in enumerate(doc["phi"]["generators"]):
        rows.append(["generator", i, *g, None])
    for i, s in enumerate(doc["support_samples"]):
        rows.append(["support", i, *s["u"], s["h"]])
    rows.append(["polar_volume", 0, *([None] * n), doc["polar_volume"]])
    return _csv_text(header, rows)


def cmd_compute(args) -> int:
    K = load_body(args.input)
    p = ValuationParams(args.c1, args.c2)
    doc = compute_document(K, p, args.quad_level, args.seed)
    text = json.dumps(doc, indent=2) + "\n" if args.format == "json" else compute_csv(doc)
    write_output(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = run_suite(seed=args.seed, quad_tol=args.tol, workers=args.workers,
                        level=args.quad_level)
    text = reports_to_jsonl(reports) if args.format == "json" else reports_to_csv(reports)
    write_output(text, args.out)
    summary = summarize(reports)
    inconclusive = sum(s["inconclusive"] for s in summary["by_check"].values())
    print(f"{summary['total']} checks, {summary['failed']} failed, {inconclusive} inconclusive",
          file=sys.stderr)
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


def sweep_rows(K: Polytope, steps: int, level: int, seed: int) -> tuple[list[tuple], float]:
    """Rows ``(lambda, V(Phi_l* K), V(K)^{n-1} V(Phi_l* K), ratio)`` and ``V(Pi* K)``."""
    if not K.is_full_dimensional:
        raise DegenerateBodyError("sweep needs a full-dimensional body")
    n = K.dim
    q = make_quadrature(n, level, seed)
    vol = volume(K) ** (n - 1)
    bound = petty_bound(n)
    rows = []
    for lam in np.linspace(0.0, 1.0, steps):
        v = polar_volume(phi(K, ValuationParams.lam(float(lam))), q)
        rows.append((float(lam), v, vol * v, vol * v / bound))
    return rows, polar_volume(projection_body(K), q)


def cmd_sweep(args) -> int:
    K = load_body(args.input)
    rows, v_pi = sweep_rows(K, args.lambda_steps, args.quad_level, args.seed)
    tol = QUAD_TOL if args.tol is None else args.tol
    ok = all(r[1] <= v_pi * (1.0 + tol) for r in rows)
    if args.format == "csv":
        text = _csv_text(SWEEP_COLUMNS, rows)
    else:
        doc = {"dim": K.dim, "quad_level": args.quad_level, "pi_polar_volume": v_pi,
               "ball_bound": petty_bound(K.dim), "dominated_by_pi": ok,
               "rows": [dict(zip(SWEEP_COLUMNS, r)) for r in rows]}
        text = json.dumps(doc, indent=2) + "\n"
    write_output(text, args.out)
    if not ok:
        print("warning: some V(Phi_lambda* K) exceeds V(Pi* K)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_petty(args) -> int:
    K = load_body(args.input)
    if not K.is_full_dimensional:
        raise DegenerateBodyError("the affine product needs a full-dimensional body")
    n = K.dim
    q = make_quadrature(n, args.quad_level, args.seed)
    product = volume(K) ** (n - 1) * polar_volume(phi(K, ValuationParams(args.c1, args.c2)), q)
    # Phi B = (c1 + c2) Pi B, so the ball bound scales by (c1 + c2)^-n
    bound = petty_bound(n) / (args.c1 + args.c2) ** n
    ratio = product / bound
    if args.format == "csv":
        text = _csv_text(("product", "bound", "ratio"), [(product, bound, ratio)])
    else:
        text = json.dumps({"dim": n, "params": {"c1": args.c1, "c2": args.c2},
                           "quad_level": args.quad_level, "product": product,
                           "bound": bound, "ratio": ratio}, indent=2) + "\n"
    write_output(text, args.out)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------

def _nonneg(s: str) -> float:
    x = float(s)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return x


def _positive(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
    return x


def _level(s: str) -> int:
    k = int(s)
    if not 0 <= k <= 8:
        raise argparse.ArgumentTypeError("quad level must be in 0..8")
    return k


def _steps(s: str) -> int:
    k = int(s)
    if k < 2:
        raise argparse.ArgumentTypeError("lambda steps must be >= 2")
    return k


def _workers(s: str) -> int:
    k = int(s)
    if k < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minkval",
        description="Contravariant Minkowski valuations c1*Pi + c2*Pi_o on polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quad-level", type=_level, default=5,
                        help="sphere subdivision level, 0..8 (default 5)")
    common.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    common.add_argument("--tol", type=_positive, default=None,
                        help="tolerance for quadrature-path checks (default 1e-5)")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="json (verify: JSON lines) or csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    body = argparse.ArgumentParser(add_help=False)
    body.add_argument("--input", required=True,
                      help="polytope JSON file or builtin:NAME[:ARG]")

    coeffs = argparse.ArgumentParser(add_help=False)
    coeffs.add_argument("--c1", type=_nonneg, default=1.0, help="weight of Pi K (default 1)")
    coeffs.add_argument("--c2", type=_nonneg, default=0.0, help="weight of Pi_o K (default 0)")

    sub.add_parser("compute", parents=[common, body, coeffs], help="Phi K, support samples, V(Phi* K)")
    v = sub.add_parser("verify", parents=[common], help="run the seeded check battery")
    v.add_argument("--workers", type=_workers, default=1,
                   help="worker processes; output does not depend on it (default 1)")
    s = sub.add_parser("sweep", parents=[common, body], help="tabulate lambda Pi + (1-lambda) Pi_o")
    s.add_argument("--lambda-steps", type=_steps, default=11,
                   help="grid points on [0, 1], at least 2 (default 11)")
    sub.add_parser("petty", parents=[common, body, coeffs], help="affine product vs the ball bound")
    return parser


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "sweep": cmd_sweep, "petty": cmd_petty}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "c1", 1.0) + getattr(args, "c2", 1.0) == 0 and args.command == "petty":
        print("error: c1 + c2 must be positive for the affine product", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (GeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
