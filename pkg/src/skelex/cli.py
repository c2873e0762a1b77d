"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, boundex, netio, pipeline
from .errors import SkelexError, StructuralError
from .geometry import Hyperrectangle
from .skeleton import validate

CHECK_TOLERANCE = 1e-6


def parse_bounds(text: str) -> Hyperrectangle:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise SkelexError(f"cannot parse bounds {text!r}: {exc}") from exc
    if len(vals) not in (2, 4):
        raise SkelexError(
            f"bounds need 2 values (1-D) or 4 values (2-D), got {len(vals)}"
        )
    return Hyperrectangle(np.asarray(vals).reshape(-1, 2))


def _suffixed(path: str, c: int) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_c{c}{p.suffix}")


def _render_options(args, dim: int) -> netio.RenderOptions:
    opts = netio.RenderOptions()
    data_path = getattr(args, "data", None)
    if data_path:
        pts, labels = netio.read_points_csv(data_path, dim=dim)
        opts.data = pts
        opts.data_labels = labels
    return opts


def cmd_extract(args) -> int:
    net = netio.network_from_dict(netio.load_json(args.network))
    bounds = parse_bounds(args.bounds)
    skeletons = pipeline.run_skelex(net, bounds)
    for c, s in enumerate(skeletons):
        report = validate(s)
        if not report.passed:
            raise StructuralError(f"class {c}: {report}")
        netio.dump_json(netio.skeleton_to_dict(s), _suffixed(args.out, c))
        if args.svg:
            svg = netio.render_svg(s, _render_options(args, bounds.dim))
            _suffixed(args.svg, c).write_text(svg, encoding="utf-8")
    print(f"wrote {len(skeletons)} skeleton(s) to {_suffixed(args.out, 0).parent}")
    return 0


def cmd_boundary(args) -> int:
    net = netio.network_from_dict(netio.load_json(args.network))
    bounds = parse_bounds(args.bounds)
    skeletons = pipeline.run_skelex(net, bounds)
    dm = boundex.run_boundex(skeletons)
    total = sum(mp.polygon.area for mp in dm.polygons)
    if abs(total - bounds.area) > 1e-6 * bounds.area:
        raise StructuralError(
            f"membership polygons cover {total}, bounds area is {bounds.area}"
        )
    netio.dump_json(netio.decision_map_to_dict(dm), args.out)
    if args.svg:
        svg = netio.render_svg(dm, _render_options(args, bounds.dim))
        Path(args.svg).write_text(svg, encoding="utf-8")
    print(
        f"wrote decision map: {len(dm.polygons)} membership polygon(s), "
        f"{len(dm.boundary)} boundary segment(s)"
    )
    return 0


def cmd_classify(args) -> int:
    dm = netio.decision_map_from_dict(netio.load_json(args.dmap))
    points, _ = netio.read_points_csv(args.points, dim=dm.bounds.dim)
    labels = boundex.classify_many(dm, points)
    netio.write_labels_csv(args.out, points, labels)
    print(f"classified {len(points)} point(s) -> {args.out}")
    return 0


def cmd_analyze(args) -> int:
    net = netio.network_from_dict(netio.load_json(args.network))
    bounds = parse_bounds(args.bounds)
    stats = analysis.analyze_network(net, bounds, grid_n=args.grid)
    netio.dump_json(stats.to_dict(), args.out)
    print(
        f"linear regions: {stats.linear_regions}, activation regions: "
        f"{stats.activation_regions}, grid estimate: {stats.grid_activation_regions}"
    )
    return 0


def cmd_check(args) -> int:
    net = netio.network_from_dict(netio.load_json(args.network))
    bounds = parse_bounds(args.bounds)
    skeletons = pipeline.run_skelex(net, bounds)
    rng = np.random.default_rng(args.seed)
    b = bounds.bounds
    xs = rng.uniform(b[:, 0], b[:, 1], size=(args.samples, bounds.dim))
    want = netio.forward_many(net, xs)
    worst = 0.0
    for c, s in enumerate(skeletons):
        got = s.evaluate_many(xs)
        rel = np.abs(got - want[:, c]) / (1.0 + np.abs(want[:, c]))
        worst = max(worst, float(rel.max()))
    print(f"max |skeleton - forward| over {args.samples} samples: {worst:.3e}")
    if worst > CHECK_TOLERANCE:
        print(f"FAIL: exceeds {CHECK_TOLERANCE:.0e}")
        return 2
    print("OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skelex",
        description="Piecewise-linear skeletons and analytical decision "
        "boundaries of fully-connected ReLU networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_net_bounds(p):
        p.add_argument("--network", required=True, help="network JSON file")
        p.add_argument("--bounds", required=True,
                       help="domain as x1min,x1max[,x2min,x2max]")

    p = sub.add_parser("extract", help="extract membership-function skeletons")
    add_net_bounds(p)
    p.add_argument("--out", required=True, help="skeleton JSON (suffixed _c<class>)")
    p.add_argument("--svg", help="also render SVG per class (suffixed _c<class>)")
    p.add_argument("--data", help="points CSV overlaid on the SVG")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("boundary", help="compute the decision map")
    add_net_bounds(p)
    p.add_argument("--out", required=True, help="decision-map JSON output")
    p.add_argument("--svg", help="also render the decision map as SVG")
    p.add_argument("--data", help="points CSV overlaid on the SVG")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("classify", help="classify points against a decision map")
    p.add_argument("--dmap", required=True, help="decision-map JSON file")
    p.add_argument("--points", required=True, help="points CSV (header x1[,x2][,label])")
    p.add_argument("--out", required=True, help="labels CSV output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", help="region statistics and grid cross-check")
    add_net_bounds(p)
    p.add_argument("--grid", type=int, default=512, help="grid resolution per axis")
    p.add_argument("--out", required=True, help="stats JSON output")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="compare skeleton evaluation to forward pass")
    add_net_bounds(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    """Join values starting with '-' onto their flag (e.g. --bounds -4,4,...)."""
    joined = []
    skip = False
    value_flags = {"--bounds"}
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok in value_flags and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(f"{tok}={argv[i + 1]}")
            skip = True
        else:
            joined.append(tok)
    return joined


def cli_main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except StructuralError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except SkelexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
