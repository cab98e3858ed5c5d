"""Trace analysis and bounded recognition of (compact) zig-zag systems."""
from __future__ import annotations

from dataclasses import dataclass

from .engine import AssemblySequence, Bounds, Verdict, update_frontier
from .model import DIRS, Direction, Pos, TileSystem, frontier


@dataclass(frozen=True)
class AttachmentRecord:
    position: Pos
    tile: str
    inputs: frozenset[Direction]
    step: int
    # strength bound on each input side
    strengths: tuple[tuple[Direction, int], ...] = ()
    via_partner: bool = False

    def strength(self, d: Direction) -> int:
        return dict(self.strengths).get(d, 0)


def input_sides(sys: TileSystem, cells, pos: Pos, name: str, skip: Direction | None = None):
    t = sys.tiles[name]
    out = []
    for d in DIRS:
        if d is skip:
            continue
        nb = cells.get(d.step(pos))
        if nb is None:
            continue
        g = t.glue(d)
        if g.strength > 0 and g == sys.tiles[nb].glue(-d):
            out.append((d, g.strength))
    return tuple(out)


def analyze_trace(sys: TileSystem, seq: AssemblySequence) -> list[AttachmentRecord]:
    cells = dict(seq.seed.cells)
    out = []
    for i, p in enumerate(seq.placements, 1):
        if len(p.cells) == 1:
            (c,), (n,) = p.cells, p.types
            sides = input_sides(sys, cells, c, n)
            out.append(AttachmentRecord(c, n, frozenset(d for d, _ in sides), i, sides))
        else:
            (ca, cb) = p.cells
            side = Direction.from_vector((cb[0] - ca[0], cb[1] - ca[1]))
            for c, n, skip in ((ca, p.types[0], side), (cb, p.types[1], -side)):
                sides = input_sides(sys, cells, c, n, skip)
                out.append(AttachmentRecord(c, n, frozenset(d for d, _ in sides), i, sides,
                                            via_partner=not sides))
        for c, n in zip(p.cells, p.types):
            cells[c] = n
    return out


def _exposed_south(sys: TileSystem, cells, pos: Pos) -> bool:
    g = sys.tiles[cells[pos]].s
    return g.strength > 0 and Direction.S.step(pos) not in cells


def zigzag_trace(sys: TileSystem, bounds: Bounds = Bounds()) -> tuple[Verdict, AssemblySequence | None]:
    """Follow the unique sequence while checking the zig-zag conditions."""
    from .engine import AssemblySequence as Seq
    from .model import Assembly
    if not sys.is_atam:
        return Verdict("no", None, "system has duples"), None
    cells = dict(sys.seed)
    for p in cells:
        if _exposed_south(sys, cells, p):
            return Verdict("no", p, f"seed exposes a south glue at {p}"), None
    fr = set(frontier(sys, cells))
    placements = []
    while fr:
        if len(fr) > 1:
            return Verdict("no", sorted(fr), f"frontier of size {len(fr)} after {len(placements)} steps"), None
        if len(placements) >= bounds.max_states or len(cells) >= bounds.max_cells:
            return Verdict("unknown", None, "trace bound reached"), None
        p = next(iter(fr)).with_pid(len(placements) + 1)
        placements.append(p)
        for c, n in zip(p.cells, p.types):
            cells[c] = n
        for c in p.cells:
            if _exposed_south(sys, cells, c):
                return Verdict("no", c, f"tile {cells[c]} at {c} exposes a south glue"), None
        fr = update_frontier(sys, cells, fr, p.cells)
    seq = Seq(sys, placements, Assembly(sys.seed), terminal=True, final_cells=cells)
    return Verdict("yes", seq, f"{len(placements)} steps"), seq


def is_zigzag(sys: TileSystem, bounds: Bounds = Bounds()) -> Verdict:
    return zigzag_trace(sys, bounds)[0]


def is_compact_zigzag(sys: TileSystem, bounds: Bounds = Bounds()) -> Verdict:
    v, seq = zigzag_trace(sys, bounds)
    if v.status != "yes":
        return v
    used = set(sys.seed.values()) | {n for p in seq.placements for n in p.types}
    for n in sorted(used):
        t = sys.tiles[n]
        if t.n.strength + t.s.strength >= 2 * sys.temperature:
            return Verdict("no", n, f"tile {n}: north + south strength {t.n.strength + t.s.strength}"
                                    f" >= {2 * sys.temperature}")
    return v


def check_trace_zigzag(seq: AssemblySequence) -> Verdict:
    """Zig-zag conditions along a recorded trace: one frontier option per step and no
    exposed south glue. The witness is the offending step (0 = seed)."""
    sys = seq.system
    cells = dict(seq.seed.cells)
    for p in cells:
        if _exposed_south(sys, cells, p):
            return Verdict("no", 0, f"seed exposes a south glue at {p}")
    fr = set(frontier(sys, cells))
    for i, p in enumerate(seq.placements, 1):
        if len(fr) != 1:
            return Verdict("no", i, f"frontier of size {len(fr)} before step {i}")
        if p not in fr:
            return Verdict("no", i, f"step {i} is not an attachment")
        for c, n in zip(p.cells, p.types):
            cells[c] = n
        for c in p.cells:
            if _exposed_south(sys, cells, c):
                return Verdict("no", i, f"tile {cells[c]} at {c} exposes a south glue")
        fr = update_frontier(sys, cells, fr, p.cells)
    if fr:
        return Verdict("unknown", len(seq.placements), "trace ends before the assembly is terminal")
    return Verdict("yes", None, f"{len(seq.placements)} steps")
