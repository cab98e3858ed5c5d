"""Command-line entry point.

Exit codes: 0 success, 1 a check failed (a witness file is written), 2 usage or format error.
System files may be read from stdin with ``-``, so generators can be piped into ``run``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gallery
from .compiler import compile as compile_system
from .engine import Bounds, enumerate_producibles, parse_policy, run
from .io import (FormatError, dumps_repr, dumps_system, dumps_trace, load_system, loads_system,
                 read_trace, repr_from_doc, report_to_doc)
from .model import ModelError
from .movie import Window, extract_movie, find_matching_windows, pump_path, row_dupling_signature
from .render import SvgOptions, render_ascii, render_svg
from .simcheck import check_dynamics, check_equivalent_productions, identity_representation
from .zigzag import check_trace_zigzag

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_system(path: str, check_seed: bool = True):
    if path == "-":
        return loads_system(sys.stdin.read(), check_seed)
    return load_system(path, check_seed)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _ints(s: str, n: int | None = None) -> tuple[int, ...]:
    try:
        out = tuple(int(v) for v in s.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"expected integers, got {s!r}") from None
    if n is not None and len(out) != n:
        raise UsageError(f"expected {n} integers, got {s!r}")
    return out


def _bounds(args) -> Bounds:
    if getattr(args, "bounds", None):
        c, s = _ints(args.bounds, 2)
        return Bounds(c, s)
    return Bounds(args.max_cells, args.max_states)


def _witness(path: str, doc) -> None:
    Path(path).write_text(_json(doc))
    print(f"check failed; witness written to {path}", file=sys.stderr)


# -- subcommands ---------------------------------------------------------------------

def cmd_run(args) -> int:
    system = _read_system(args.system)
    seq = run(system, parse_policy(args.policy, args.seed_rng), args.max_steps)
    if args.out_trace:
        _emit(dumps_trace(seq), args.out_trace)
    summary = {"steps": len(seq.placements), "terminal": seq.terminal, "cells": len(seq.snapshot())}
    if args.render:
        asm = seq.snapshot()
        text = render_ascii(asm, system, legend=args.legend) if args.render == "ascii" else \
            render_svg(asm, system, SvgOptions(cell=args.cell))
        _emit(text, args.render_out)
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    elif args.out_trace != "-":
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compile(args) -> int:
    system = _read_system(args.system)
    out = compile_system(system, _bounds(args), require_zigzag=not args.relaxed, fill=args.fill)
    _emit(dumps_system(out.dtas), args.out)
    if args.repr_out:
        Path(args.repr_out).write_text(dumps_repr(out.repr))
    print(json.dumps({"m": out.m, "b": out.b, **{k: v for k, v in out.stats.items()
                                                  if isinstance(v, (int, float, str))}}, sort_keys=True),
          file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    simulator = _read_system(args.sim)
    simulated = _read_system(args.spec)
    if args.repr:
        R = repr_from_doc(json.loads(Path(args.repr).read_text()))
    else:
        R = identity_representation(simulated.tiles)
    if args.mode:
        R.mode = args.mode
    bounds = _bounds(args)
    reports = [check_equivalent_productions(simulator, simulated, R, bounds),
               check_dynamics(simulator, simulated, R, bounds)]
    doc = {"reports": [report_to_doc(r) for r in reports], "ok": all(r.ok for r in reports)}
    _emit(_json(doc), args.out)
    if not doc["ok"]:
        _witness(args.witness, doc)
        return EXIT_FAILED
    return EXIT_OK


def cmd_gallery(args) -> int:
    params = gallery.GalleryParams(args.construction, n=args.n, bits=args.bits, base=args.base,
                                   count_from=args.count_from, count_to=args.count_to,
                                   orientation=args.orientation, k=args.k, odd_hook=args.odd_hook,
                                   height=args.height, budget=args.budget)
    _emit(dumps_system(gallery.build(params)), args.out)
    return EXIT_OK


def _window(spec: str) -> Window:
    x0, y0, w, h = _ints(spec, 4)
    return Window.rect(x0, y0, w, h)


def _path(spec: str) -> list[tuple[int, int]]:
    pts = []
    for part in spec.split(";"):
        if part.strip():
            x, y = _ints(part, 2)
            pts.append((x, y))
    return pts


def cmd_analyze(args) -> int:
    system = _read_system(args.system, check_seed=False)
    with open(args.trace) as fh:
        seq = read_trace(fh, system)
    if args.check == "zigzag":
        v = check_trace_zigzag(seq)
        doc = {"check": "zigzag", "status": v.status, "witness_step": v.witness, "detail": v.detail}
        _emit(_json(doc), args.out)
        if v.status == "no":
            _witness(args.witness, doc)
            return EXIT_FAILED
        return EXIT_OK
    if args.check == "movies":
        if not args.window:
            raise UsageError("movies needs at least one --window X0,Y0,W,H")
        family = [_window(w) for w in args.window]
        movies = []
        for w in family:
            mv = extract_movie(seq, w, bond_forming=args.bond_forming)
            movies.append({"window": [w.x0, w.y0, w.width, w.height],
                           "groups": [[{"pos": list(e.position), "label": e.glue.label,
                                        "strength": e.glue.strength, "dir": list(e.orientation),
                                        "step": e.step} for e in g] for g in mv.groups]})
        matches = [{"i": i, "j": j, "offset": list(c)}
                   for i, j, c in find_matching_windows(seq, family, args.bond_forming)]
        _emit(_json({"check": "movies", "movies": movies, "matches": matches}), args.out)
        return EXIT_OK
    if args.check == "pump":
        if not args.path:
            raise UsageError("pump needs --path 'x,y;x,y;...'")
        res = pump_path(system, seq, _path(args.path), repeats=args.repeats)
        doc = {"check": "pump", "witness": list(res.witness) if res.witness else None,
               "valid": res.valid, "repeats": res.repeats, "first_invalid": res.first_invalid,
               "detail": res.detail}
        if res.sequence is not None and args.out_trace:
            _emit(dumps_trace(res.sequence), args.out_trace)
        _emit(_json(doc), args.out)
        if res.found and not res.valid:
            _witness(args.witness, doc)
            return EXIT_FAILED
        return EXIT_OK
    # duplings
    if not args.row:
        raise UsageError("duplings needs at least one --row")
    sigs = {r: row_dupling_signature(seq, r) for r in args.row}
    pairs = [[a, b] for i, a in enumerate(args.row) for b in args.row[i + 1:]
             if sigs[a].equivalent(sigs[b])]
    doc = {"check": "duplings",
           "rows": {str(r): [{"cells": [list(c) for c in cs], "types": list(ts)} for cs, ts in s.entries]
                    for r, s in sigs.items()},
           "equivalent": pairs}
    _emit(_json(doc), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    system = _read_system(args.system)
    ps = enumerate_producibles(system, args.max_cells, args.max_states)
    terminals = ps.terminals()
    directed = "unknown" if ps.truncated else ("yes" if len(terminals) == 1 else "no")
    doc = {"states": len(ps), "edges": len(ps.edges), "terminals": len(terminals),
           "truncated": ps.truncated, "directed": directed}
    _emit(_json(doc), args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="datam", description="Tile assembly workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def bounds_flags(q, cells=10**6, states=10**5):
        q.add_argument("--max-cells", type=int, default=cells)
        q.add_argument("--max-states", type=int, default=states)

    r = sub.add_parser("run", help="simulate a system")
    r.add_argument("--system", required=True, help="system file, or - for stdin")
    r.add_argument("--policy", choices=["random", "fifo", "lex"], default="lex")
    r.add_argument("--seed-rng", type=int, default=0)
    r.add_argument("--max-steps", type=int, default=10**7)
    r.add_argument("--out-trace")
    r.add_argument("--render", choices=["svg", "ascii"])
    r.add_argument("--render-out", help="file for the rendering (default stdout)")
    r.add_argument("--legend", action="store_true", help="append the ASCII legend")
    r.add_argument("--cell", type=int, default=12, help="SVG cell size in pixels")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compile", help="compile a temperature-2 zig-zag system to temperature 1 duples")
    c.add_argument("--system", required=True)
    c.add_argument("--out")
    c.add_argument("--repr-out")
    c.add_argument("--fill", action="store_true", help="fill macrotiles completely")
    c.add_argument("--relaxed", action="store_true", help="skip the compact zig-zag gate")
    c.add_argument("--bounds", help="CELLS,STATES")
    bounds_flags(c)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="bounded simulation checks")
    v.add_argument("--sim", required=True, help="simulating system")
    v.add_argument("--spec", required=True, help="simulated system")
    v.add_argument("--repr", help="representation sidecar (identity when omitted)")
    v.add_argument("--mode", choices=["block", "plus"])
    v.add_argument("--bounds", help="CELLS,STATES")
    v.add_argument("--out")
    v.add_argument("--witness", default="verify-witness.json")
    bounds_flags(v)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gallery", help="generate a named construction")
    g.add_argument("--construction", required=True, choices=gallery.CONSTRUCTIONS)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--bits", type=int, default=2)
    g.add_argument("--base", type=int, default=2)
    g.add_argument("--count-from", type=int, default=0)
    g.add_argument("--count-to", type=int)
    g.add_argument("--orientation", choices=["W", "E"], default="W")
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--odd-hook", type=int)
    g.add_argument("--height", type=int, default=12)
    g.add_argument("--budget", type=int, default=5)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gallery)

    a = sub.add_parser("analyze", help="analyze a recorded trace")
    a.add_argument("check", choices=["zigzag", "movies", "pump", "duplings"])
    a.add_argument("--trace", required=True)
    a.add_argument("--system", required=True)
    a.add_argument("--window", action="append", help="X0,Y0,W,H (repeatable)")
    a.add_argument("--bond-forming", action="store_true")
    a.add_argument("--path", help="'x,y;x,y;...' in growth order")
    a.add_argument("--repeats", type=int, default=1)
    a.add_argument("--row", type=int, action="append")
    a.add_argument("--out")
    a.add_argument("--out-trace")
    a.add_argument("--witness", default="analyze-witness.json")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("enumerate", help="enumerate producible assemblies")
    e.add_argument("--system", required=True)
    e.add_argument("--out")
    bounds_flags(e, 10**4, 10**5)
    e.set_defaults(func=cmd_enumerate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FormatError, ModelError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"datam {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
