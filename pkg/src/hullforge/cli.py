"""
Command-line front end.

Body descriptors (``--body``)::

    ball:R[:C1,...,Cd]          ball of radius R, centered at C (default origin)
    ellipsoid:A1,...,Ad[:C...]  axis-aligned ellipsoid with semi-axes A
    box:H                       cube [-H, H]^d
    box:LO:HI                   box [LO, HI]; each side a scalar or d values
    vpolytope:PATH              convex hull of the points in PATH, one per line

Net sources (``--net``)::

    polar:K      polar-coordinate grid net with step pi / K
    file:PATH    net file (``d m eps`` header, then m unit vectors)

Bodies that do not fit in the unit ball are scaled into it by their outer
radius; reported bounds and distances refer to the original body.

Exit codes: 0 success, 1 failed check, 2 bad arguments, 3 I/O or file
format error, 4 net too coarse or open polytope.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .approx import (
    approximate_to_accuracy,
    default_direction_net,
    run_approximation,
    support_baseline,
)
from .covering import (
    SphericalNet,
    covering_radius_estimate,
    efficiency_theta,
    net_read,
    net_write,
    polar_grid_net,
)
from .errors import FormatError, HullforgeError, NetTooCoarse, Unbounded
from .geometry import Ball, Box, ConvexBody, Ellipsoid, VPolytope
from .metrics import hausdorff_outer_estimate, rate_fit

EXIT_CHECK = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_OPEN = 4


class UsageError(Exception):
    pass


def _floats(text: str, field: str) -> np.ndarray:
    try:
        vals = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"{field}: expected comma-separated numbers, got {text!r}") from None
    if not np.all(np.isfinite(vals)):
        raise UsageError(f"{field}: values must be finite")
    return vals


def _sized(vals: np.ndarray, d: int, field: str, broadcast: bool = False) -> np.ndarray:
    if vals.size == 1 and broadcast:
        return np.full(d, vals[0])
    if vals.size != d:
        raise UsageError(f"{field}: expected {d} values, got {vals.size}")
    return vals


def read_points(path) -> np.ndarray:
    """Whitespace-separated point rows; blank lines and ``#`` comments are skipped."""
    with open(path, encoding="utf-8") as fh:
        rows = [ln.split("#", 1)[0].split() for ln in fh]
    rows = [r for r in rows if r]
    try:
        pts = np.array([[float(c) for c in r] for r in rows])
    except ValueError:
        raise FormatError(f"{path}: non-numeric coordinate") from None
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise FormatError(f"{path}: expected rows of equal length")
    return pts


def parse_body(text: str, d: int) -> ConvexBody:
    """Build a body from a descriptor (see the module docstring)."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "ball":
            if len(parts) not in (1, 2):
                raise UsageError("ball: expected ball:R or ball:R:C1,...,Cd")
            r = _sized(_floats(parts[0], "ball radius"), 1, "ball radius")[0]
            c = _sized(_floats(parts[1], "ball center"), d, "ball center") if len(parts) == 2 else np.zeros(d)
            return Ball(c, r)
        if kind == "ellipsoid":
            if len(parts) not in (1, 2):
                raise UsageError("ellipsoid: expected ellipsoid:A1,...,Ad[:C1,...,Cd]")
            a = _sized(_floats(parts[0], "ellipsoid semi-axes"), d, "ellipsoid semi-axes")
            c = _sized(_floats(parts[1], "ellipsoid center"), d, "ellipsoid center") if len(parts) == 2 else np.zeros(d)
            return Ellipsoid(c, a)
        if kind == "box":
            if len(parts) == 1:
                h = _sized(_floats(parts[0], "box half-width"), d, "box half-width", broadcast=True)
                return Box(-h, h)
            if len(parts) == 2:
                lo = _sized(_floats(parts[0], "box lower corner"), d, "box lower corner", broadcast=True)
                hi = _sized(_floats(parts[1], "box upper corner"), d, "box upper corner", broadcast=True)
                return Box(lo, hi)
            raise UsageError("box: expected box:H or box:LO:HI")
        if kind == "vpolytope":
            if not rest:
                raise UsageError("vpolytope: expected vpolytope:PATH")
            pts = read_points(rest)
            if pts.shape[1] != d:
                raise UsageError(f"vpolytope: file points have dimension {pts.shape[1]}, --dim is {d}")
            return VPolytope(pts)
    except ValueError as exc:
        raise UsageError(f"{kind}: {exc}") from None
    raise UsageError(f"unknown body kind {kind!r} (ball, ellipsoid, box, vpolytope)")


def parse_net(text: str, d: int) -> SphericalNet:
    kind, _, value = text.partition(":")
    if kind == "polar":
        try:
            k = int(value)
        except ValueError:
            raise UsageError(f"--net polar:K needs an integer K, got {value!r}") from None
        if k < 2:
            raise UsageError("--net polar:K needs K >= 2")
        return polar_grid_net(d, k)
    if kind == "file":
        net = net_read(value)
        if net.dim != d:
            raise UsageError(f"net file has dimension {net.dim}, --dim is {d}")
        return net
    raise UsageError(f"unknown net source {text!r} (polar:K or file:PATH)")


def _direction_net(net: SphericalNet, measure_k: int | None) -> SphericalNet:
    if measure_k is None:
        return default_direction_net(net)
    return polar_grid_net(net.dim, measure_k)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_net_gen(args) -> int:
    net = polar_grid_net(args.dim, args.k)
    net_write(net, args.out)
    theta, eta = efficiency_theta(net)
    line = f"d={net.dim} m={net.m} eps_bound={net.eps_bound:.10g} theta={theta:.10g}"
    if eta is not None:
        line += f" eta={eta:.6g}"
    print(line)
    return 0


def cmd_net_verify(args) -> int:
    net = net_read(args.file)
    est = covering_radius_estimate(net, args.probes, seed=args.seed)
    ok = est <= net.eps_bound
    print(
        f"d={net.dim} m={net.m} eps_bound={net.eps_bound:.10g} "
        f"estimate={est:.10g} {'ok' if ok else 'FAIL'}"
    )
    return 0 if ok else EXIT_CHECK


def _dump(P, path: str) -> None:
    rows = np.column_stack([P.normals, P.offsets])
    np.savetxt(path, rows, fmt="%.17g")


def cmd_approx(args) -> int:
    body = parse_body(args.body, args.dim)
    if args.target_delta is None and args.net is None:
        raise UsageError("approx needs --net, --target-delta, or both")
    if args.target_delta is not None:
        if not args.target_delta > 0:
            raise UsageError("--target-delta must be positive")
        if args.beta != 1.0:
            raise UsageError("--target-delta runs use beta = 1")
        source = "polar" if args.net is None else parse_net(args.net, args.dim)
        dnet = None
        if args.measure_k is not None:
            dnet = polar_grid_net(args.dim, args.measure_k)
        P, report = approximate_to_accuracy(body, args.target_delta, source, direction_net=dnet)
    else:
        net = parse_net(args.net, args.dim)
        P, report = run_approximation(
            body,
            net,
            args.beta,
            rescale=body.outer_radius > 1.0,
            direction_net=_direction_net(net, args.measure_k),
        )
    if args.no_timing:
        report.runtime_seconds = 0.0
    if args.dump:
        _dump(P, args.dump)
    _emit(json.dumps(report.as_dict(), indent=2) + "\n", args.out)
    return 0


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def cmd_sweep(args) -> int:
    body = parse_body(args.body, args.dim)
    sources = [f"polar:{k}" for k in args.k] + [f"file:{p}" for p in args.nets]
    if not sources:
        raise UsageError("sweep needs at least one --k value or --nets file")
    nets = [parse_net(s, args.dim) for s in sources]
    rescale = body.outer_radius > 1.0
    header = "m,delta,bound_thm1,bound_thm3"
    if args.baseline == "support":
        header += ",delta_support_baseline"
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    points = []
    try:
        out.write(header + "\n")
        out.flush()
        for net in nets:
            dnet = _direction_net(net, None if args.measure_factor is None else args.measure_factor * net.equivalent_k())
            _, rep = run_approximation(body, net, args.beta, rescale=rescale, direction_net=dnet)
            row = [str(rep.m), _fmt(rep.delta_measured), _fmt(rep.delta_bound_thm1), _fmt(rep.delta_bound_thm3)]
            if args.baseline == "support":
                base = support_baseline(body, net)
                row.append(_fmt(hausdorff_outer_estimate(body, base, dnet)))
            out.write(",".join(row) + "\n")
            out.flush()
            points.append((rep.m, rep.delta_measured))
        target = -2.0 / (args.dim - 1)
        try:
            fit = rate_fit(points)
            summary = f"# slope={fit.slope!r} target={target!r} r_squared={fit.r_squared!r}"
        except (ValueError, HullforgeError) as exc:
            summary = f"# slope=nan target={target!r} ({exc})"
        out.write(summary + "\n")
    finally:
        out.flush()
        if out is not sys.stdout:
            out.close()
    return 0


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _k_list(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        ks = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(k < 2 for k in ks):
        raise argparse.ArgumentTypeError("every k must be >= 2")
    return ks


def _dim(text: str) -> int:
    d = _positive_int(text)
    if d < 2:
        raise argparse.ArgumentTypeError("dimension must be >= 2")
    return d


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hullforge",
        description="Outer polyhedral approximation of convex bodies from projections.",
        epilog=__doc__.split("\n\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    net = sub.add_parser("net", help="generate or verify sphere nets")
    net_sub = net.add_subparsers(dest="net_command", required=True)
    gen = net_sub.add_parser("gen", help="write a polar grid net")
    gen.add_argument("--dim", type=_dim, required=True)
    gen.add_argument("--k", type=_positive_int, required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_net_gen)
    ver = net_sub.add_parser("verify", help="estimate the covering radius of a net file")
    ver.add_argument("file")
    ver.add_argument("--probes", type=_positive_int, default=None, help="random probes (default 10 m)")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_net_verify)

    ap = sub.add_parser("approx", help="one approximation run, JSON report")
    ap.add_argument("--body", required=True)
    ap.add_argument("--dim", type=_dim, required=True)
    ap.add_argument("--net", help="polar:K or file:PATH")
    ap.add_argument("--target-delta", type=float)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--measure-k", type=_positive_int, help="polar step of the measurement net (default 4x the net)")
    ap.add_argument("--out", help="JSON report path (default stdout)")
    ap.add_argument("--dump", help="write halfspaces 'u_1 ... u_d g' to this path")
    ap.add_argument("--no-timing", action="store_true", help="report runtime_seconds as 0 for reproducible output")
    ap.set_defaults(func=cmd_approx)

    sw = sub.add_parser("sweep", help="CSV of measured distance against net size")
    sw.add_argument("--body", required=True)
    sw.add_argument("--dim", type=_dim, required=True)
    sw.add_argument("--k", type=_k_list, default=[], help="comma-separated polar steps")
    sw.add_argument("--nets", nargs="*", default=[], help="net files")
    sw.add_argument("--beta", type=float, default=1.0)
    sw.add_argument("--baseline", choices=["support"])
    sw.add_argument("--measure-factor", type=_positive_int, help="measurement net refinement (default 4)")
    sw.add_argument("--out", help="CSV path (default stdout)")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "beta", 1.0) is not None and not getattr(args, "beta", 1.0) > 0:
        parser.error("--beta must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, FormatError) as exc:
        print(f"hullforge: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NetTooCoarse, Unbounded) as exc:
        print(f"hullforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OPEN
    except HullforgeError as exc:
        print(f"hullforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
