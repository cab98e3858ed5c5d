"""Compile compact zig-zag temperature-2 systems into temperature-1 duple systems.

Every simulated tile becomes an ``m x m`` macrotile grown by a single-tile-wide path.
East/west information travels on path glues; glues that a later cooperative tile must
read are written as geometry (a band of bit gadgets along the block side). A cooperative
macrotile walks a lane next to that band and reads each bit by offering a singleton
probe and a duple probe, exactly one of which fits.
"""
from __future__ import annotations

import collections
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

from .engine import Bounds, LexMin, run
from .model import (DIRS, Direction, DupleType, Glue, ModelError, NULL, Pos, TileSystem,
                    TileType)
from .simcheck import RepresentationFunction
from .zigzag import is_compact_zigzag

N, E, S, W = Direction.N, Direction.E, Direction.S, Direction.W

SLOT = 4      # columns per bit slot
DEPTH = 4     # rows of a band
MARGIN = 4    # free cells at each end of a band
C1, C2 = 8, 8  # m = C1 * b + C2
C3 = 64       # |S| + |D| <= C3 * |T| * |G_N| (max observed ratio on the counter matrix is ~26)


class PreconditionError(ModelError):
    pass


class UnsupportedTemperatureError(ModelError):
    pass


# -- glue codes -----------------------------------------------------------------

@dataclass(frozen=True)
class GlueCode:
    glue: Glue
    index: int
    bits: str


def code_width(n_named: int) -> int:
    return max(1, math.ceil(math.log2(n_named + 1)))


def scale_for(b: int) -> int:
    return C1 * b + C2


def _is_null(g: Glue) -> bool:
    return g.strength == 0


def assign_palindromes(glues: Iterable[Glue]) -> dict[Glue, GlueCode]:
    """Null glue gets index 0; others sorted by (label, strength) get 1, 2, ...

    The code is the ``b``-bit index (most significant first) followed by its reversal.
    """
    named = sorted({g for g in glues if not _is_null(g)}, key=lambda g: (g.label, g.strength))
    b = code_width(len(named))
    out = {NULL: GlueCode(NULL, 0, "0" * (2 * b))}
    for i, g in enumerate(named, 1):
        s = format(i, f"0{b}b")
        out[g] = GlueCode(g, i, s + s[::-1])
    return out


# -- bit gadget -----------------------------------------------------------------
# Slot-local coordinates: x in 0..3, row 1 is the reader lane, rows 0..-3 are the top
# four rows of the block carrying the band (row -3 is the baseline).

@dataclass(frozen=True)
class ReaderPlan:
    direction: str                  # travel direction, "E" or "W"
    prefix: tuple[Pos, ...]         # lane cells walked before the probe tile
    probe: Pos                      # tile offering both probes
    single: Pos                     # singleton probe cell
    duple: tuple[Pos, Pos]          # (half touching the probe tile, other half)
    single_route: tuple[Pos, ...]   # back to the lane after the singleton
    duple_route: tuple[Pos, ...]    # back to the lane after the duple
    single_bit: int                 # bit value signalled by the singleton fitting


EAST_READER = ReaderPlan("E", ((0, 1), (1, 1), (2, 1)), (2, 0), (1, 0), ((2, -1), (2, -2)),
                         ((1, -1), (2, -1), (3, -1), (3, 0), (3, 1)),
                         ((3, -1), (3, 0), (3, 1)), 0)
WEST_READER = ReaderPlan("W", ((3, 1), (3, 0)), (3, -1), (3, -2), ((2, -1), (1, -1)),
                         ((2, -2), (2, -1), (2, 0), (2, 1), (1, 1), (0, 1)),
                         ((0, -1), (0, 0), (0, 1)), 1)


@dataclass(frozen=True)
class BitGadget:
    """Band geometry for one bit: builder path from (0, -3) to (3, -3)."""

    bit: int
    path: tuple[Pos, ...]

    @property
    def cells(self) -> frozenset[Pos]:
        return frozenset(self.path)

    def reader(self, direction: str = "E") -> ReaderPlan:
        return EAST_READER if direction == "E" else WEST_READER

    def fits(self, direction: str = "E") -> dict[str, bool]:
        """Which probes have room against this geometry."""
        r = self.reader(direction)
        occ = self.cells
        return {"single": r.single not in occ,
                "duple": not (set(r.duple) & occ)}


_BIT_PATHS = {
    0: ((0, -3), (1, -3), (2, -3), (2, -2), (3, -2), (3, -3)),
    1: ((0, -3), (0, -2), (0, -1), (0, 0), (1, 0), (1, -1), (1, -2), (1, -3), (2, -3), (3, -3)),
}


def emit_bit_gadget(bit: int) -> BitGadget:
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return BitGadget(bit, _BIT_PATHS[bit])


def gadget_probe_system(bit: int, direction: str = "E") -> tuple[TileSystem, dict]:
    """Geometry of one slot plus a reader stopped at its probe tile, as a tau=1 system.

    Returns the system (seeded with the fragment, stability not checked) and the names of
    the singleton probe and duple probe types, for frontier inspection.
    """
    g = emit_bit_gadget(bit)
    r = g.reader(direction)
    tiles = [TileType(f"geo{i}") for i in range(len(g.path))]
    seed = {c: f"geo{i}" for i, c in enumerate(g.path)}
    side_s = Direction.from_vector((r.single[0] - r.probe[0], r.single[1] - r.probe[1]))
    t, o = r.duple
    side_d = Direction.from_vector((t[0] - r.probe[0], t[1] - r.probe[1]))
    inner = Direction.from_vector((o[0] - t[0], o[1] - t[1]))
    ps, pd, gi = Glue("ps", 1), Glue("pd", 1), Glue("pi", 1)
    probe = TileType("P").with_glue(side_s, ps).with_glue(side_d, pd)
    single = TileType("s").with_glue(-side_s, ps)
    dt = TileType("dt").with_glue(-side_d, pd).with_glue(inner, gi)
    do = TileType("do").with_glue(-inner, gi)
    if inner in (E, N):
        D = DupleType("dt", "do", "EW" if inner is E else "NS")
    else:
        D = DupleType("do", "dt", "EW" if inner is W else "NS")
    seed[r.probe] = "P"
    for c in r.prefix:
        seed.setdefault(c, "lane")
    tiles += [probe, single, dt, do, TileType("lane")]
    sys = TileSystem(tiles, seed, 1, singletons=[x.name for x in tiles if x.name not in ("dt", "do")],
                     duples=[D], check_seed=False, name=f"gadget(bit={bit},{direction})")
    return sys, {"single": "s", "duple": D}


# -- frames ---------------------------------------------------------------------

_CCW = {N: W, W: S, S: E, E: N}


def rot_dir(d: Direction, r: int) -> Direction:
    for _ in range(r % 4):
        d = _CCW[d]
    return d


def rot_cell(c: Pos, r: int, m: int) -> Pos:
    """Quarter turns counter-clockwise about the block (cells outside it allowed)."""
    x, y = c
    for _ in range(r % 4):
        x, y = m - 1 - y, x
    return (x, y)


def frame_for_band(d: Direction) -> int:
    """Rotation taking the canonical band side (N) to ``d``."""
    return next(r for r in range(4) if rot_dir(N, r) is d)


@dataclass(frozen=True)
class Layout:
    b: int
    m: int

    @property
    def mid(self) -> int:
        return self.m // 2

    @property
    def center(self) -> Pos:
        return (self.mid, self.mid)

    def port(self, d: Direction) -> Pos:
        m, mid = self.m, self.mid
        return {N: (mid, m - 1), S: (mid, 0), E: (m - 1, mid), W: (0, mid)}[d]

    def strip(self, d: Direction) -> frozenset[Pos]:
        m = self.m
        lo, hi = MARGIN, m - MARGIN
        if d is N:
            return frozenset((x, y) for x in range(lo, hi) for y in range(m - DEPTH, m))
        if d is S:
            return frozenset((x, y) for x in range(lo, hi) for y in range(DEPTH))
        if d is E:
            return frozenset((x, y) for x in range(m - DEPTH, m) for y in range(lo, hi))
        return frozenset((x, y) for x in range(DEPTH) for y in range(lo, hi))

    def band_path(self, bits: str, d: Direction) -> list[Pos]:
        """Builder path of a band on side ``d`` (block-local cells)."""
        r = frame_for_band(d)
        out = []
        for i, ch in enumerate(bits):
            for sx, sy in _BIT_PATHS[int(ch)]:
                out.append(rot_cell((MARGIN + SLOT * i + sx, self.m - 1 + sy), r, self.m))
        return out

    def band_zone(self, bits: str, d: Direction) -> dict[int, list[Pos]]:
        """Per slot, strip cells left empty by the geometry."""
        r = frame_for_band(d)
        out = {}
        for i, ch in enumerate(bits):
            occ = set(_BIT_PATHS[int(ch)])
            out[i] = [rot_cell((MARGIN + SLOT * i + sx, self.m - 1 + sy), r, self.m)
                      for sy in range(0, -DEPTH, -1) for sx in range(SLOT) if (sx, sy) not in occ]
        return out

    def inside(self, c: Pos) -> bool:
        return 0 <= c[0] < self.m and 0 <= c[1] < self.m


# -- trace roles ----------------------------------------------------------------

@dataclass
class Instance:
    pos: Pos
    tile: str
    step: int
    kind: str                      # "seed" | "msg" | "coop"
    side: Direction | None = None  # message side or path side
    geom: Direction | None = None  # geometry side of a cooperative attachment

    @property
    def key(self) -> tuple:
        return (self.tile, self.kind, self.side, self.geom)

    @property
    def parent(self) -> Pos | None:
        return None if self.side is None else self.side.step(self.pos)


@dataclass
class Variant:
    tile: str
    kind: str
    side: Direction | None
    geom: Direction | None
    instances: list[Pos] = field(default_factory=list)
    exits: set[Direction] = field(default_factory=set)
    bands: set[Direction] = field(default_factory=set)
    plugs: set[Direction] = field(default_factory=set)
    sweep: bool = False

    @property
    def name(self) -> str:
        if self.kind == "seed":
            tag = "seed"
        elif self.kind == "msg":
            tag = f"m{self.side.name}"
        else:
            tag = f"c{self.side.name}{self.geom.name}"
        return f"{self.tile}/{tag}"


def _attach_info(sys: TileSystem, cells, pos: Pos, name: str, steps) -> list[tuple[Direction, int, int]]:
    t = sys.tiles[name]
    out = []
    for d in DIRS:
        q = d.step(pos)
        nb = cells.get(q)
        if nb is None:
            continue
        g = t.glue(d)
        if g.strength > 0 and g == sys.tiles[nb].glue(-d):
            out.append((d, g.strength, steps[q]))
    return out


def analyze_roles(sys: TileSystem, max_steps: int = 10**6) -> tuple[dict[Pos, Instance], dict[Pos, str]]:
    """Run the source system and classify how every tile attached."""
    if len(sys.seed) != 1:
        raise PreconditionError("only single-tile seeds are supported")
    seq = run(sys, LexMin(), max_steps=max_steps)
    if not seq.terminal:
        raise PreconditionError(f"source did not terminate within {max_steps} steps")
    (sp, sn), = sys.seed.items()
    cells = {sp: sn}
    steps = {sp: 0}
    inst = {sp: Instance(sp, sn, 0, "seed")}
    tau = sys.temperature
    for i, p in enumerate(seq.placements, 1):
        if len(p.cells) != 1:
            raise PreconditionError("source must not use duples")
        (c,), (n,) = p.cells, p.types
        bound = _attach_info(sys, cells, c, n, steps)
        strong = [x for x in bound if x[1] >= tau]
        if strong:
            d = max(strong, key=lambda x: x[2])[0]
            inst[c] = Instance(c, n, i, "msg", d)
        else:
            bound.sort(key=lambda x: -x[2])
            inst[c] = Instance(c, n, i, "coop", bound[0][0], bound[1][0])
        cells[c] = n
        steps[c] = i
    return inst, cells


def derive_variants(inst: dict[Pos, Instance], cells: dict[Pos, str],
                    sweep_north: bool = False) -> dict[tuple, Variant]:
    var: dict[tuple, Variant] = {}
    for c in sorted(inst, key=lambda q: inst[q].step):
        i = inst[c]
        v = var.setdefault(i.key, Variant(i.tile, i.kind, i.side, i.geom))
        v.instances.append(c)
    of = lambda c: var[inst[c].key]  # noqa: E731

    # exits and bands
    for c, i in inst.items():
        for d in DIRS:
            q = d.step(c)
            j = inst.get(q)
            if j is None or j.step < i.step:
                continue
            if j.kind in ("msg", "coop") and j.side is -d:
                of(c).exits.add(d)
            elif j.kind == "coop" and j.geom is -d:
                of(c).bands.add(d)

    def ancestors(c: Pos) -> set[Pos]:
        out = set()
        while c is not None and c not in out:
            out.add(c)
            c = inst[c].parent
        return out

    for key, v in var.items():
        for c in v.instances:
            for d in v.exits:
                q = d.step(c)
                j = inst.get(q)
                if j is None:
                    raise PreconditionError(f"{v.name} at {c} exits {d.name} into a cell that stays empty")
                if j.step > inst[c].step:
                    if j.side is not -d:
                        raise PreconditionError(f"{v.name} at {c} exits {d.name} but {j.tile} at {q} "
                                                f"enters from {j.side and j.side.name}")
                else:
                    if q not in ancestors(c):
                        raise PreconditionError(f"exit of {v.name} at {c} hits {q}, which is not an "
                                                "ancestor, so its plug could race")
                    of(q).plugs.add(-d)
            i = inst[c]
            if i.kind == "coop":
                g = i.geom.step(c)
                if g not in ancestors(i.parent):
                    raise PreconditionError(f"geometry for {v.name} at {c} is not causally before its path")
    if sweep_north:
        for v in var.values():
            if all(N.step(c) not in cells for c in v.instances):
                v.sweep = True
    for v in var.values():
        v.plugs -= v.exits
        if v.side is not None:
            v.plugs.discard(v.side)
        busy = set(v.exits) | ({v.side} if v.side else set())
        if v.geom is not None:
            busy.add(v.geom)
            if v.geom in v.plugs:
                raise PreconditionError(f"{v.name} needs a plug on its geometry side")
        if v.bands & busy:
            raise PreconditionError(f"{v.name} has a band on a side it also uses as a port or lane")
        if v.bands & v.plugs:
            raise PreconditionError(f"{v.name} needs a plug on a band side")
        if v.sweep and (N in busy or N in v.plugs or N in v.bands):
            v.sweep = False
    return var


# -- output -----------------------------------------------------------------------

@dataclass
class CompilationOutput:
    dtas: TileSystem
    repr: RepresentationFunction
    m: int
    b: int
    codes: dict[Glue, GlueCode]
    stats: dict
    tile_cells: dict[str, Pos] = field(default_factory=dict)
    probes: dict[str, dict] = field(default_factory=dict)
    variants: dict[str, Variant] = field(default_factory=dict)


class _Builder:
    def __init__(self, lay: Layout):
        self.lay = lay
        self.glues: dict[str, dict[Direction, Glue]] = {}
        self.cells: dict[str, Pos] = {}
        self.duples: set[DupleType] = set()
        self.duple_halves: set[str] = set()

    def tile(self, name: str, cell: Pos) -> str:
        old = self.cells.get(name)
        if old is not None and old != cell:
            raise AssertionError(f"tile {name} placed at {old} and {cell}")
        self.cells[name] = cell
        self.glues.setdefault(name, {})
        return name

    def glue(self, name: str, d: Direction, g: Glue):
        cur = self.glues[name].get(d)
        if cur is not None and cur != g:
            raise AssertionError(f"glue clash on {name} side {d.name}: {cur} vs {g}")
        self.glues[name][d] = g

    def link(self, a: str, b: str, label: str | None = None):
        ca, cb = self.cells[a], self.cells[b]
        d = Direction.from_vector((cb[0] - ca[0], cb[1] - ca[1]))
        g = Glue(label or f"{a}>{d.name}", 1)
        self.glue(a, d, g)
        self.glue(b, -d, g)

    def duple(self, touch: str, other: str):
        ct, co = self.cells[touch], self.cells[other]
        self.link(touch, other, f"{touch}={other}")
        v = (co[0] - ct[0], co[1] - ct[1])
        if v == (1, 0):
            D = DupleType(touch, other, "EW")
        elif v == (-1, 0):
            D = DupleType(other, touch, "EW")
        elif v == (0, 1):
            D = DupleType(touch, other, "NS")
        else:
            D = DupleType(other, touch, "NS")
        self.duples.add(D)
        self.duple_halves |= {touch, other}

    def tiles(self) -> list[TileType]:
        out = []
        for name in sorted(self.glues):
            g = self.glues[name]
            out.append(TileType(name, g.get(N, NULL), g.get(E, NULL), g.get(S, NULL), g.get(W, NULL)))
        return out


def message_label(d: Direction, g: Glue) -> str:
    """Label carried across a block boundary travelling in direction ``d``."""
    return f"M:{d.name}:{g.label}:{g.strength}"


def _bfs(lay: Layout, start: Pos, goal: Pos, blocked: set[Pos], order) -> list[Pos] | None:
    """Shortest path start -> goal (both included) through free block cells."""
    if start == goal:
        return [start]
    prev = {start: None}
    dq = collections.deque([start])
    while dq:
        c = dq.popleft()
        for d in order:
            q = d.step(c)
            if q in prev or not lay.inside(q):
                continue
            if q != goal and q in blocked:
                continue
            prev[q] = c
            if q == goal:
                path = [q]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            dq.append(q)
    return None


def _reachable(lay: Layout, start: Pos, goals: list[Pos], blocked: set[Pos]) -> bool:
    seen = {start}
    dq = collections.deque([start])
    want = set(goals)
    while dq and want:
        c = dq.popleft()
        for d in DIRS:
            q = d.step(c)
            if q in seen or not lay.inside(q):
                continue
            if q in want:
                want.discard(q)
                seen.add(q)
                continue
            if q in blocked:
                continue
            seen.add(q)
            dq.append(q)
    return not want


_ORDERS = list(itertools.permutations(DIRS))


class _Router:
    """Grows one single-tile-wide path inside a block through a list of waypoints."""

    def __init__(self, lay: Layout, used: set[Pos], reserved: set[Pos]):
        self.lay = lay
        self.used = set(used)
        self.reserved = set(reserved)

    def route(self, cur: Pos, goal: Pos, pending: list[Pos], tail: list[Pos] = ()) -> list[Pos]:
        """Cells after ``cur`` up to ``goal``, followed by the fixed cells ``tail``.

        Among shortest routes (one per neighbour order) prefer one after which every
        pending target is still reachable from the end of the tail.
        """
        p = self.try_route(cur, goal, pending, tail)
        if p is None:
            p = self.try_route(cur, goal, pending, tail, strict=False)
        if p is None:
            raise PreconditionError(f"no route inside the macrotile from {cur} to {goal}")
        self.used |= set(p)
        return p

    def try_route(self, cur, goal, pending, tail=(), strict=True):
        tail = list(tail)
        blocked = self.used | self.reserved | set(pending) | set(tail)
        end = tail[-1] if tail else goal
        later = [x for x in pending if x != goal and x not in tail]
        for order in _ORDERS:
            p = _bfs(self.lay, cur, goal, blocked - {goal}, order)
            if p is None:
                return None
            if not strict or _reachable(self.lay, end, later, (blocked | set(p)) - set(later)):
                return p[1:] + tail
        return None

def _component(cells: set[Pos], start: Pos) -> set[Pos]:
    comp = {start}
    dq = collections.deque([start])
    while dq:
        c = dq.popleft()
        for d in DIRS:
            q = d.step(c)
            if q in cells and q not in comp:
                comp.add(q)
                dq.append(q)
    return comp


def _fill_tree(bld: _Builder, prefix: str, holes: set[Pos], roots: dict[Pos, str]) -> None:
    """Cover ``holes`` with trees of fresh tiles, each rooted at an adjacent tile in ``roots``."""
    left = set(holes)
    while left:
        start = min(left)
        comp = _component(left, start)
        left -= comp
        anchor = None
        for c in sorted(comp):
            for d in DIRS:
                q = d.step(c)
                if q in roots:
                    anchor = (roots[q], c)
                    break
            if anchor:
                break
        if anchor is None:
            raise PreconditionError(f"fill region at {start} touches no tile that may seed it")
        root, first = anchor
        bld.link(root, bld.tile(f"{prefix}{first[0]},{first[1]}", first))
        seen = {first}
        dq = collections.deque([first])
        while dq:
            c = dq.popleft()
            for d in DIRS:
                q = d.step(c)
                if q in comp and q not in seen:
                    seen.add(q)
                    bld.link(f"{prefix}{c[0]},{c[1]}", bld.tile(f"{prefix}{q[0]},{q[1]}", q))
                    dq.append(q)


def compile(sys: TileSystem, bounds: Bounds = Bounds(), *, require_zigzag: bool = True,
            fill: bool = False, sweep_north: bool = False,
            anchors: dict[str, list[tuple[Pos, Direction, Glue]]] | None = None,
            cap_reads: bool = False) -> CompilationOutput:
    """Compile a temperature-2 system into a temperature-1 duple system.

    ``require_zigzag`` gates on the bounded compact zig-zag check. Without it, the source
    only has to be directed and satisfy the per-type role checks derived from its trace.
    ``fill`` additionally fills every macrotile completely (used for exact-shape demos);
    readers then read all ``2b`` slots so they can fill the band cells they probed.
    ``sweep_north`` lines the north edge of macrotiles whose tile never has a north
    neighbor. ``anchors`` adds glues at given block-local cells for named source tiles
    (negative coordinates count back from ``m``).
    """
    if sys.temperature != 2:
        raise UnsupportedTemperatureError(f"only temperature 2 sources are supported (got {sys.temperature})")
    if not sys.is_atam:
        raise PreconditionError("source must be an aTAM system")
    if require_zigzag:
        v = is_compact_zigzag(sys, bounds)
        if v.status != "yes":
            raise PreconditionError(f"source is not a compact zig-zag system: {v.status} ({v.detail})")
    inst, final = analyze_roles(sys, bounds.max_states)
    var = derive_variants(inst, final, sweep_north=sweep_north)
    anchors = anchors or {}

    # glues written as geometry
    encoded = {sys.tiles[v.tile].glue(d) for v in var.values() for d in v.bands}
    codes = assign_palindromes(encoded)
    b = code_width(len(codes) - 1)
    lay = Layout(b, scale_for(b))
    m = lay.m
    # negative block-local coordinates count from the far edge, as in Python indexing
    anchors = {k: [((x % m, y % m), d, g) for (x, y), d, g in v] for k, v in anchors.items()}
    nread = 2 * b if fill else b
    bld = _Builder(lay)
    probes: dict[str, dict] = {}

    # shared readers
    readers: dict[tuple, dict[Glue, str]] = {}
    reader_cells: dict[tuple, set[Pos]] = {}

    def build_reader(path_side: Direction, geom: Direction, msg: Glue, wanted: set[Glue]):
        r = frame_for_band(-geom)  # geometry side is canonical S
        entry_c = rot_dir(path_side, -r)
        if entry_c is S:
            raise PreconditionError("path side equals geometry side")
        plan = WEST_READER if entry_c is E else EAST_READER
        ctx = f"R{r}{entry_c.name}[{msg.label}:{msg.strength}]"
        key = (path_side, geom, msg)
        lane = [rot_cell((x, 0), r, m) for x in range(MARGIN, m - MARGIN)]
        start = rot_cell((MARGIN if plan.direction == "E" else m - MARGIN - 1, 0), r, m)
        reserved = set()
        for d in DIRS:
            if d not in (path_side, geom):
                reserved |= lay.strip(d)
        ports = {lay.port(d) for d in DIRS if d is not path_side}
        port = lay.port(path_side)
        rt = _Router(lay, {port}, reserved | ports | {lay.center} | (set(lane) - {start}))
        route = [port] + rt.route(port, start, [])
        route = route[:-1]
        names = []
        for k, c in enumerate(route):
            names.append(bld.tile(f"{ctx}|e{k}", c))
        first = names[0]
        bld.glue(first, path_side, Glue(message_label(-path_side, msg), 1))
        for a, bb in zip(names, names[1:]):
            bld.link(a, bb)
        want_codes = {codes[g].bits: g for g in wanted}

        def slot_cell(i: int, sc: Pos) -> Pos:
            ox = MARGIN + SLOT * i if plan.direction == "E" else m - MARGIN - SLOT - SLOT * i
            return rot_cell((ox + sc[0], sc[1] - 1), r, m)

        ends: dict[Glue, str] = {}
        # frontier of the prefix tree: prefix -> last tile name
        level = {"": names[-1]}
        for i in range(nread):
            nxt = {}
            for pre, last in sorted(level.items()):
                tag = f"{ctx}|{pre or '-'}"
                prev = last
                for k, sc in enumerate(plan.prefix):
                    t = bld.tile(f"{tag}|p{k}", slot_cell(i, sc))
                    bld.link(prev, t)
                    prev = t
                P = bld.tile(f"{tag}|P", slot_cell(i, plan.probe))
                bld.link(prev, P)
                info = {"slot": i, "direction": plan.direction, "single": None, "duple": None}
                for bit in (0, 1):
                    np = pre + str(bit)
                    if not any(cb.startswith(np) for cb in want_codes):
                        continue
                    btag = f"{ctx}|{np}"
                    if bit == plan.single_bit:
                        s = bld.tile(f"{btag}|s", slot_cell(i, plan.single))
                        bld.link(P, s)
                        info["single"] = s
                        prev2 = s
                        route_cells = plan.single_route
                    else:
                        ta = bld.tile(f"{btag}|dt", slot_cell(i, plan.duple[0]))
                        tb = bld.tile(f"{btag}|do", slot_cell(i, plan.duple[1]))
                        bld.link(P, ta)
                        bld.duple(ta, tb)
                        info["duple"] = (ta, tb)
                        r0 = plan.duple_route[0]
                        adj = lambda a, q: abs(a[0] - q[0]) + abs(a[1] - q[1]) == 1  # noqa: E731
                        prev2 = ta if adj(plan.duple[0], r0) else tb
                        route_cells = plan.duple_route
                    branch = {}
                    if bit == plan.single_bit:
                        branch[slot_cell(i, plan.single)] = info["single"]
                    else:
                        branch[slot_cell(i, plan.duple[0])] = ta
                        branch[slot_cell(i, plan.duple[1])] = tb
                    for k, sc in enumerate(route_cells):
                        t = bld.tile(f"{btag}|r{k}", slot_cell(i, sc))
                        bld.link(prev2, t)
                        prev2 = t
                        branch[bld.cells[t]] = t
                    nxt[np] = prev2
                    if fill:
                        taken = set(_BIT_PATHS[bit]) | set(plan.prefix) | {plan.probe} | set(route_cells)
                        taken |= {plan.single} if bit == plan.single_bit else set(plan.duple)
                        holes = {slot_cell(i, (sx, sy)) for sx in range(SLOT) for sy in range(1, -DEPTH, -1)
                                 if (sx, sy) not in taken}
                        _fill_tree(bld, f"{btag}|f", holes, branch)
                probes[P] = info
            level = nxt
        for pre, last in sorted(level.items()):
            matches = [cb for cb in want_codes if cb.startswith(pre)]
            for cb in matches:
                g = want_codes[cb]
                prev = last
                if nread < 2 * b:
                    for i in range(nread, 2 * b):
                        for k, sc in enumerate(((0, 1), (1, 1), (2, 1), (3, 1)) if plan.direction == "E"
                                               else ((3, 1), (2, 1), (1, 1), (0, 1))):
                            t = bld.tile(f"{ctx}|g{codes[g].index}|w{i}.{k}", slot_cell(i, sc))
                            bld.link(prev, t)
                            prev = t
                ends[g] = prev
        readers[key] = ends
        reader_cells[key] = set(route) | set(lane)
        if fill:
            # pockets cut off from the centre by the reader are filled by the reader itself
            free = {(x, y) for x in range(m) for y in range(m)} - reader_cells[key]
            main = _component(free, lay.center)
            pockets = free - main
            _fill_tree(bld, f"{ctx}|f", pockets, dict(zip(route, names)))
            reader_cells[key] |= pockets
        return ends

    # group cooperative variants by reader context
    coop_groups: dict[tuple, set[Glue]] = collections.defaultdict(set)
    for v in var.values():
        if v.kind == "coop":
            t = sys.tiles[v.tile]
            coop_groups[(v.side, v.geom, t.glue(v.side))].add(t.glue(v.geom))
    entry_keys: dict[tuple, str] = {}
    for (ps, gs, msg), wanted in sorted(coop_groups.items(), key=lambda kv: repr(kv[0])):
        ek = (ps, message_label(-ps, msg))
        if ek in entry_keys:
            raise PreconditionError(f"two macrotile programs start on the same message {ek}")
        entry_keys[ek] = "reader"
        build_reader(ps, gs, msg, wanted)

    lookup: dict[str, str] = {}
    seed_tile = None
    for key in sorted(var, key=repr):
        v = var[key]
        t = sys.tiles[v.tile]
        vn = v.name
        reserved: set[Pos] = set()
        for d in v.bands:
            reserved |= lay.strip(d)
        used: set[Pos] = set()
        names: list[str] = []
        if v.kind == "seed":
            cur = lay.center
            names.append(bld.tile(f"{vn}@C", cur))
            lookup[names[-1]] = v.tile
            seed_tile = names[-1]
        elif v.kind == "msg":
            ek = (v.side, message_label(-v.side, t.glue(v.side)))
            if ek in entry_keys:
                raise PreconditionError(f"two macrotile programs start on the same message {ek}")
            entry_keys[ek] = vn
            cur = lay.port(v.side)
            names.append(bld.tile(f"{vn}#0", cur))
            bld.glue(names[0], v.side, Glue(ek[1], 1))
        else:
            rkey = (v.side, v.geom, t.glue(v.side))
            used |= reader_cells[rkey]
            end = readers[rkey][t.glue(v.geom)]
            cur = bld.cells[end]
            names.append(end)
        used.add(cur)
        ports_used = {d for d in (v.side,) if d is not None} | set(v.exits)
        if v.geom is not None:
            ports_used.add(v.geom)
        plug_sides = sorted(v.plugs - ports_used, key=lambda d: d.name)
        waypoints: list[tuple[str, object]] = [("port", d) for d in plug_sides]
        if v.kind != "seed":
            waypoints.append(("center", None))
        for d in sorted(v.bands, key=lambda d: d.name):
            waypoints.append(("band", d))
        if v.sweep:
            waypoints.append(("sweep", None))
        for cell, d, g in anchors.get(v.tile, ()):
            waypoints.append(("anchor", (cell, d, g)))
        for d in sorted(v.exits, key=lambda d: d.name):
            waypoints.append(("exit", d))

        def target(wp):
            kind, arg = wp
            if kind in ("port", "exit"):
                return lay.port(arg)
            if kind == "center":
                return lay.center
            if kind == "band":
                return lay.band_path(codes[t.glue(arg)].bits, arg)[0]
            if kind == "sweep":
                return (0, m - 1)
            return arg[0]

        pending = [target(w) for w in waypoints]

        def targets_from(i: int) -> list[Pos]:
            out = []
            for kind, arg in waypoints[i:]:
                out.append(target((kind, arg)))
                if kind == "band":
                    out.append(lay.band_path(codes[t.glue(arg)].bits, arg)[-1])
            return out
        # unused ports stay free for routing but never as shortcuts into a neighbour
        other_ports = {lay.port(d) for d in DIRS} - set(targets_from(0)) - {cur}
        rt = _Router(lay, used, reserved | other_ports)
        cells_of: dict[Pos, str] = {cur: names[-1]}

        def extend(cells: list[Pos], center_at: Pos | None = None):
            for c in cells:
                if c == center_at:
                    nm = bld.tile(f"{vn}@C", c)
                    lookup[nm] = v.tile
                else:
                    nm = bld.tile(f"{vn}#{len(names)}", c)
                bld.link(names[-1], nm)
                names.append(nm)
                cells_of[c] = nm

        for wi, wp in enumerate(waypoints):
            kind, arg = wp
            goal = pending[wi]
            later = targets_from(wi + 1)
            if kind == "anchor" and goal in cells_of:
                cell, d, g = arg
                bld.glue(cells_of[goal], d, g)
                continue
            if kind == "band":
                bp = lay.band_path(codes[t.glue(arg)].bits, arg)
                rest = [x for x in later if x not in (bp[0], bp[-1])]
                seg = None
                for path in (bp, bp[::-1]):
                    rt.reserved -= {path[0]}
                    seg = rt.try_route(cur, path[0], rest, path[1:])
                    if seg is not None:
                        break
                    rt.reserved.add(path[0])
                if seg is None:
                    seg = rt.route(cur, bp[0], rest, bp[1:])
                rt.used |= set(seg)
                extend(seg)
                cur = seg[-1]
                continue
            if kind == "sweep":
                seg = rt.route(cur, goal, later)
                extend(seg)
                line = [(x, m - 1) for x in range(1, m)]
                if any(c in rt.used for c in line):
                    raise PreconditionError(f"{vn}: north edge is not free for a sweep")
                rt.reserved -= set(line)
                extend(line)
                rt.used |= set(line)
                cur = line[-1]
                continue
            seg = rt.route(cur, goal, later)
            extend(seg, center_at=lay.center if kind == "center" else None)
            cur = goal
            if kind == "exit":
                bld.glue(names[-1], arg, Glue(message_label(arg, t.glue(arg)), 1))
            elif kind == "anchor":
                cell, d, g = arg
                bld.glue(names[-1], d, g)
        if v.kind != "seed" and f"{vn}@C" not in bld.cells:
            raise AssertionError(f"{vn}: center never placed")
        if fill:
            mine = dict(cells_of)
            if v.kind == "coop":
                mine.pop(bld.cells[names[0]], None)
            taken = set(cells_of) | used | reserved
            holes = {(x, y) for x in range(m) for y in range(m)} - taken
            _fill_tree(bld, f"{vn}|f", holes, mine)

    tiles = bld.tiles()
    singles = [x.name for x in tiles if x.name not in bld.duple_halves]
    (sp, _), = sys.seed.items()
    mid = lay.mid
    seed = {(sp[0] * m + mid, sp[1] * m + mid): seed_tile}
    dtas = TileSystem(tiles, seed, 1, singletons=singles, duples=bld.duples,
                      name=f"compiled({sys.name or 'source'})", check_seed=False)
    R = RepresentationFunction(m, lookup, lay.center, meta={"source": sys.name})
    all_north = {t.n for t in sys.tiles.values() if not _is_null(t.n)}
    used_types = {i.tile for i in inst.values()}
    stats = {
        "m": m, "b": b, "c1": C1, "c2": C2, "c3": C3,
        "source_types": len(sys.tiles),
        "source_types_used": len(used_types),
        "encoded_glues": len(codes) - 1,
        "north_glues": len(all_north),
        "tiles": len(dtas.tiles),
        "singletons": len(dtas.singletons),
        "duples": len(dtas.duples),
        "tile_complexity": dtas.tile_complexity(),
        "variants": len(var),
        "readers": len(readers),
        "trace_steps": max(i.step for i in inst.values()),
        "bounds": {"max_cells": bounds.max_cells, "max_states": bounds.max_states},
    }
    return CompilationOutput(dtas, R, m, b, codes, stats, dict(bld.cells), probes,
                             {v.name: v for v in var.values()})


def check_probe_exclusivity(out: CompilationOutput, seq) -> list[str]:
    """Replay ``seq``; whenever a probe tile lands, exactly one probe option must fit.

    Returns a list of violations (empty when every read was unambiguous).
    """
    sys = out.dtas
    cells = dict(seq.seed.cells)
    pending: list[tuple[str, Pos]] = []
    bad = []
    for i, p in enumerate(seq.placements, 1):
        for c, n in zip(p.cells, p.types):
            cells[c] = n
        for c, n in zip(p.cells, p.types):
            if n in out.probes:
                pending.append((n, c))
        still = []
        for n, c in pending:
            info = out.probes[n]
            options = set()
            for q in ((c[0] + 1, c[1]), (c[0] - 1, c[1]), (c[0], c[1] + 1), (c[0], c[1] - 1)):
                if q in cells:
                    continue
                for pl in sys.placements_at(cells, q):
                    if info["single"] in pl.types:
                        options.add("single")
                    if info["duple"] and info["duple"][0] in pl.types:
                        options.add("duple")
            taken = any(cells.get(q) in (info["single"], *(info["duple"] or ())) for q in
                        ((c[0] + 1, c[1]), (c[0] - 1, c[1]), (c[0], c[1] + 1), (c[0], c[1] - 1)))
            if taken:
                continue
            if len(options) != 1:
                bad.append(f"step {i}: probe {n} at {c} has options {sorted(options)}")
                continue
            still.append((n, c))
        pending = still
    return bad
