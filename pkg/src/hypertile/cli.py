"""Command-line front end.

Exit codes: 0 answered (a "No" verdict is an answer), 2 usage error,
3 inconclusive within the budget, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTERNAL = 4


class UsageError(Exception):
    pass


class Inconclusive(Exception):
    def __init__(self, payload: dict):
        super().__init__(payload.get("message", "inconclusive"))
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, payload: dict, text: str):
    if args.json:
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _tuple(text: str):
    from .tuples import TupleError, parse_tuple

    try:
        return parse_tuple(text)
    except TupleError as exc:
        raise UsageError(str(exc)) from None


def _budget(args) -> int:
    from .builder import default_budget

    return args.budget if args.budget is not None else default_budget()


def _load_map(path: str):
    from .mapcore import MapError, deserialize

    try:
        return deserialize(Path(path).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except MapError as exc:
        raise UsageError(str(exc)) from None


def _write(path: str, data) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


# -- subcommands ------------------------------------------------------------------


def cmd_classify(args):
    from .classify import classify
    from .tuples import format_tuple

    t = _tuple(args.tuple)
    v = classify(t)
    payload = {"tuple": t.to_json(), **v.to_json()}
    text = f"{format_tuple(t)}: {'Yes' if v.exists else 'No'} ({v.rule}, {v.geometry.value}, hint {v.hint})"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_classify_tileset(args):
    from .classify import classify_tile_set
    from .geometry import side_length

    try:
        sizes = [int(x) for x in args.sizes.split(",")]
    except ValueError:
        raise UsageError(f"bad size list {args.sizes!r}") from None
    if args.side_length is not None:
        ell = args.side_length
    elif args.fan:
        ell = side_length(_tuple(args.fan)).value
    else:
        raise UsageError("give --side-length or --fan")
    v = classify_tile_set(sizes, ell, args.angle_tol)
    text = (f"tiling system: {'yes' if v.is_tiling_system else 'no'}; "
            f"witnesses {[list(t.components) for t in v.witnesses]}, "
            f"rejected {[list(t.components) for t in v.rejected]}")
    _emit(args, v.to_json(), text)
    return EXIT_OK


def cmd_build(args):
    from .builder import (BACKTRACK, HOMOGENEOUS, PAPER_GUIDED, PSEUDO, BuildError, BuildSpec,
                          build, build_kh)
    from .mapcore import serialize
    from .tuples import TupleError, parse_cyclic

    budget = _budget(args)
    if args.kh:
        try:
            k, l, m = (int(x) for x in args.kh.split(","))
        except ValueError:
            raise UsageError("--kh expects k,l,m") from None
        try:
            cm = build_kh(k, l, m, args.layers, budget, strict=not args.loose)
        except BuildError as exc:
            return _build_failure(args, exc)
        stats = {"layers_built": args.layers, "strategy": "KH"}
    else:
        if not args.tuple:
            raise UsageError("a tuple (or --kh) is required")
        if args.homogeneous:
            try:
                t = parse_cyclic(args.tuple)
            except TupleError as exc:
                raise UsageError(str(exc)) from None
        else:
            t = _tuple(args.tuple)
        try:
            spec = BuildSpec(t, args.layers, HOMOGENEOUS if args.homogeneous else PSEUDO,
                             BACKTRACK if args.strategy == "backtrack" else PAPER_GUIDED,
                             budget, args.seed, args.force)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            res = build(spec)
        except BuildError as exc:
            return _build_failure(args, exc)
        cm = res.map
        stats = res.to_json()
    data = serialize(cm)
    if args.output:
        _write(args.output, data)
    payload = {"faces": cm.n_faces, "vertices": cm.n_vertices, "output": args.output,
               "budget": budget, **stats}
    if not args.output and not args.json:
        sys.stdout.buffer.write(data)
        return EXIT_OK
    _emit(args, payload, f"built {cm.n_faces} faces, {cm.n_vertices} vertices -> {args.output}")
    return EXIT_OK


def _build_failure(args, exc):
    payload = {"error": exc.kind, "message": str(exc), "stats": exc.stats}
    if exc.kind in ("NOT_ADMISSIBLE", "PARAMETER", "INF_ENTRY"):
        sys.stderr.write(f"{exc}\n")
        if args.json:
            sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
        return EXIT_USAGE
    if exc.kind == "INVARIANT":
        sys.stderr.write(f"{exc}\n")
        return EXIT_INTERNAL
    raise Inconclusive(payload)


def cmd_verify(args):
    from .mapcore import verify
    from .tuples import TupleError, parse_cyclic

    m = _load_map(args.map)
    constraint = None
    if args.tuple:
        try:
            constraint = parse_cyclic(args.tuple) if args.homogeneous else _tuple(args.tuple)
        except TupleError as exc:
            raise UsageError(str(exc)) from None
    rep = verify(m, constraint)
    text = "pass" if rep.passed else "fail: " + "; ".join(str(v) for v in rep.violations[:10])
    _emit(args, rep.to_json(), text)
    return EXIT_OK if rep.passed else EXIT_INTERNAL


def cmd_refute(args):
    from .oracle import INCONCLUSIVE, refute

    t = _tuple(args.tuple)
    if t.has_inf:
        raise UsageError("apeirogon entries cannot be searched")
    if args.radius < 1:
        raise UsageError("radius must be >= 1")
    cert = refute(t, args.radius, _budget(args), reduce_symmetry=not args.no_symmetry)
    payload = cert.to_json(with_map=args.with_map)
    payload["budget"] = _budget(args)
    if args.output and cert.map is not None:
        from .mapcore import serialize

        _write(args.output, serialize(cert.map))
    text = f"{cert.outcome} at radius {cert.radius} after {cert.nodes} nodes"
    _emit(args, payload, text)
    return EXIT_INCONCLUSIVE if cert.outcome == INCONCLUSIVE else EXIT_OK


def cmd_sidelength(args):
    from .geometry import GeometryError, side_length

    t = _tuple(args.tuple)
    try:
        ell = side_length(t)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None
    payload = {"tuple": t.to_json(), "side_length": ell.value, "cosh_half": ell.cosh_half}
    _emit(args, payload, f"side_length {ell.value:.15g}\ncosh(l/2) {ell.cosh_half:.15g}")
    return EXIT_OK


def cmd_interval(args):
    from .geometry import GeometryError, feasible_side_interval

    t = _tuple(args.tuple)
    try:
        iv = feasible_side_interval(t)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None
    hi = "inf" if iv.hi == float("inf") else f"{iv.hi:.15g}"
    _emit(args, {"tuple": t.to_json(), **iv.to_json()}, f"({iv.lo:.15g}, {hi})")
    return EXIT_OK


def cmd_match(args):
    from .geometry import GeometryError, match_lengths

    a, b = _tuple(args.first), _tuple(args.second)
    try:
        d = match_lengths(a, b)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None
    payload = {"first": a.to_json(), "second": b.to_json(), "difference": d, "equal": abs(d) <= args.tol,
               "tol": args.tol}
    _emit(args, payload, f"difference {d:.15g} ({'equal' if abs(d) <= args.tol else 'distinct'})")
    return EXIT_OK


def cmd_scan34(args):
    from .geometry import scan_34_family

    rep = scan_34_family(args.l_max, args.k_max, args.l_min, args.k_min)
    if args.csv:
        _write(args.csv, rep.to_csv())
    text = f"{len(rep.rows)} tuples, min gap {rep.min_gap:.6g} between {rep.closest}, distinct: {rep.distinct}"
    _emit(args, rep.to_json(), text)
    return EXIT_OK


def cmd_stats(args):
    from . import analysis as A

    m = _load_map(args.map)
    try:
        if args.cls == "35":
            reports = [A.pentagon_stats(m), A.triangle_pentagon_bijection(m)]
            obstruction = A.periodicity_obstruction_report(m, A.THIRTY_FIVE_K3K4)
        else:
            reports = [A.kh_incidence(m)]
            obstruction = A.periodicity_obstruction_report(m, A.KH)
    except A.AnalysisError as exc:
        raise UsageError(str(exc)) from None
    payload = {"reports": [r.to_json() for r in reports], "obstruction": obstruction}
    lines = []
    for r in reports:
        lines.append(f"{r.kind}: {'pass' if r.passed else 'fail'} {r.checks} {r.counts}")
    lines.append(f"obstruction: {obstruction}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_render(args):
    from .geometry import GeometryError, realize
    from .render import SvgStyle, render_svg

    m = _load_map(args.map)
    try:
        r = realize(m)
    except GeometryError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INTERNAL
    svg = render_svg(r, SvgStyle(size=args.size))
    if args.output:
        _write(args.output, svg)
        payload = {"output": args.output, "max_edge_error": r.max_edge_error,
                   "max_angle_error": r.max_angle_error,
                   "pose": "root vertex at 0, root edge along the positive real axis"}
        _emit(args, payload, f"wrote {args.output}")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_crosscheck(args):
    from .oracle import FATAL, cross_check, degree4_family

    fam = degree4_family(args.max_entry, args.min_entry)

    def progress(row):
        if row.flag:
            sys.stderr.write(f"{list(row.tuple)} {row.rule} {row.outcome} {row.flag}\n")

    rep = cross_check(fam, args.radius, _budget(args), progress=progress if args.verbose else None,
                      deadline=args.deadline)
    payload = rep.to_json() if args.rows else rep.summary()
    summary = rep.summary()
    text = json.dumps(summary["counts"]) + "\n" + "\n".join(
        f"{flag}: {tuples}" for flag, tuples in summary["flags"].items())
    _emit(args, payload, text)
    return EXIT_INTERNAL if rep.flagged(FATAL) and args.strict else EXIT_OK


# -- parser ---------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--budget", type=int, default=None, help="search node limit (default 10^7)")

    p = _Parser(prog="hypertile", description="Pseudo-homogeneous hyperbolic tilings.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="decide existence of a vertex tuple")
    s.add_argument("tuple")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("classify-tileset", parents=[common], help="can these polygons tile?")
    s.add_argument("sizes", help="comma-separated polygon sizes")
    s.add_argument("--side-length", type=float)
    s.add_argument("--fan", help="take the side length of this vertex tuple")
    s.add_argument("--angle-tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_classify_tileset)

    s = sub.add_parser("build", parents=[common], help="build a patch")
    s.add_argument("tuple", nargs="?")
    s.add_argument("--layers", type=int, default=3)
    s.add_argument("--homogeneous", action="store_true", help="read the tuple as a cyclic word")
    s.add_argument("--strategy", choices=("guided", "backtrack"), default="guided")
    s.add_argument("--force", action="store_true", help="build even if classified No")
    s.add_argument("--kh", help="k,l,m of the degree-14 homogeneous family")
    s.add_argument("--loose", action="store_true", help="accept k,l,m >= 4 not necessarily even")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("verify", parents=[common], help="check a map file")
    s.add_argument("map")
    s.add_argument("--tuple")
    s.add_argument("--homogeneous", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("refute", parents=[common], help="exhaustive bounded search")
    s.add_argument("tuple")
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--no-symmetry", action="store_true", help="search every root arrangement")
    s.add_argument("--with-map", action="store_true", help="embed the witness map in JSON")
    s.add_argument("-o", "--output", help="write the witness map here")
    s.set_defaults(func=cmd_refute)

    s = sub.add_parser("sidelength", parents=[common], help="common side length of a fan")
    s.add_argument("tuple")
    s.set_defaults(func=cmd_sidelength)

    s = sub.add_parser("interval", parents=[common], help="side lengths admissible with apeirogons")
    s.add_argument("tuple")
    s.set_defaults(func=cmd_interval)

    s = sub.add_parser("match", parents=[common], help="compare two side lengths")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("scan34", parents=[common], help="side lengths of [3^l, 4^k]")
    s.add_argument("--l-max", type=int, default=8)
    s.add_argument("--k-max", type=int, default=8)
    s.add_argument("--l-min", type=int, default=1)
    s.add_argument("--k-min", type=int, default=0)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_scan34)

    s = sub.add_parser("stats", parents=[common], help="counting statistics of a patch")
    s.add_argument("map")
    s.add_argument("--class", dest="cls", choices=("35", "kh"), default="35")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("render", parents=[common], help="draw a patch as SVG")
    s.add_argument("map")
    s.add_argument("-o", "--output")
    s.add_argument("--size", type=int, default=800)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("crosscheck", parents=[common], help="classification against search")
    s.add_argument("--max-entry", type=int, default=13)
    s.add_argument("--min-entry", type=int, default=3)
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--deadline", type=float, default=None, help="wall-clock limit in seconds")
    s.add_argument("--rows", action="store_true", help="include every row in JSON")
    s.add_argument("--strict", action="store_true", help="exit 4 on FATAL disagreements")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_crosscheck)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except Inconclusive as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        if "--json" in (argv if argv is not None else sys.argv[1:]):
            sys.stdout.write(json.dumps(exc.payload, sort_keys=True) + "\n")
        return EXIT_INCONCLUSIVE
    except Exception as exc:  # invariant violations surface as exit 4
        from .mapcore import MapError

        if isinstance(exc, (MapError, AssertionError)):
            sys.stderr.write(f"internal error: {exc}\n")
            return EXIT_INTERNAL
        raise


if __name__ == "__main__":
    sys.exit(main())
