"""Generators for the concrete tile systems used in the experiments."""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

from .model import Direction, DupleType, Glue, ModelError, Pos, TileSystem, TileType

N, E, S, W = Direction.N, Direction.E, Direction.S, Direction.W


class GalleryError(ModelError):
    pass


@dataclass(frozen=True)
class GalleryParams:
    """Which construction to build and its size knobs; ranges are checked on creation."""

    construction: str
    n: int = 8
    bits: int = 2
    base: int = 2
    count_from: int = 0
    count_to: int | None = None
    orientation: str = "W"
    k: int = 1
    odd_hook: int | None = None
    height: int = 12
    budget: int = 5
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = self.construction
        if c not in CONSTRUCTIONS:
            raise GalleryError(f"unknown construction {c!r}; choose from {', '.join(CONSTRUCTIONS)}")
        if c == "counter" and not 1 <= self.bits <= 16:
            raise GalleryError("counter bits must be in 1..16")
        if c == "square" and self.n < 8:
            raise GalleryError("square needs n >= 8")
        if c in ("planter", "shape_W", "S8") and self.k < 1:
            raise GalleryError("k must be >= 1")
        if self.odd_hook is not None and not 1 <= self.odd_hook <= self.k:
            raise GalleryError(f"odd_hook must name a counter in 1..{self.k}")
        if c == "finger_candidate" and (self.height < 4 or self.budget < 1):
            raise GalleryError("finger candidate needs height >= 4 and budget >= 1")


def digits(v: int, base: int, n: int) -> list[int]:
    """Base-``base`` digits of ``v``, most significant first, padded to ``n``."""
    out = []
    for _ in range(n):
        out.append(v % base)
        v //= base
    return out[::-1]


# -- tile transforms --------------------------------------------------------------

def rotate_cw(t: TileType, name: str | None = None) -> TileType:
    """Tile rotated a quarter turn clockwise: (x, y) -> (y, -x)."""
    return TileType(name or t.name, n=t.w, e=t.n, s=t.e, w=t.s)


def rotate_tile(t: TileType, quarter_turns: int, name: str | None = None) -> TileType:
    for _ in range(quarter_turns % 4):
        t = rotate_cw(t)
    return t.renamed(name or t.name)


def rotate_pos(p: Pos, quarter_turns: int) -> Pos:
    x, y = p
    for _ in range(quarter_turns % 4):
        x, y = y, -x
    return (x, y)


# -- zig-zag counters -------------------------------------------------------------

@dataclass
class CounterLayout:
    """Geometry of a generated counter in its own (unrotated) frame."""

    width: int
    rows: int
    first: str           # tile placed first (seed or entry tile)
    first_pos: Pos
    last: str            # tile placed last
    last_pos: Pos
    tiles: list[TileType]


def counter_tiles(bits: int, count_from: int, count_to: int, base: int = 2, init: str = "W",
                  prefix: str = "", entry: tuple[Direction, Glue] | None = None,
                  exit: tuple[Direction, Glue] | None = None,
                  digit_prefix: str | None = None, cap: bool = False) -> CounterLayout:
    """Tiles of a compact zig-zag counter growing north.

    Columns: x=0 west boundary, digits at x=1..bits (most significant at x=1), x=bits+1 east
    boundary. West-to-east rows copy their digits and represent digits+1; east-to-west rows
    add 2 (so they show value+1, mod base**bits). Every row advances the count by one, so
    the counter has ``count_to - count_from + 1`` rows. Growth stops after the row whose
    value equals ``count_to``; ``exit`` puts an extra glue on the last tile.
    ``digit_prefix`` (default ``prefix``) labels the north/south digit glues, so several
    counters can share them. ``cap`` adds one more row running back over the final row; its
    tiles read the digits below cooperatively but expose no north glues, and its last tile
    carries ``exit``.
    """
    if not 1 <= bits <= 16:
        raise GalleryError(f"bits must be in 1..16, got {bits}")
    if base < 2:
        raise GalleryError("base must be >= 2")
    if init not in ("W", "E"):
        raise GalleryError("init must be 'W' or 'E'")
    mod = base ** bits
    if not 0 <= count_from <= count_to < mod:
        raise GalleryError(f"need 0 <= count_from <= count_to < {mod}")
    n, p = bits, prefix
    t_digits = digits(count_to, base, n)
    u_digits = digits((count_to + 1) % mod, base, n)
    dp = p if digit_prefix is None else digit_prefix

    def g(label: str, s: int = 1) -> Glue:
        return Glue((dp if label[0] == "d" else p) + label, s)
    rows = count_to - count_from + 1
    tiles: list[TileType] = []

    def final(t: TileType) -> TileType:
        if cap:
            return t.with_glue(N, g("kc", 2))
        if exit is not None:
            t = t.with_glue(exit[0], exit[1])
        return t

    # init row
    if init == "W":
        v = digits(count_from, base, n)
        first = TileType(p + "IW", e=g("I0", 2))
        if entry is not None:
            first = first.with_glue(*entry)
        tiles.append(first)
        for j in range(1, n + 1):
            tiles.append(TileType(p + f"I{j}", w=g(f"I{j-1}", 2), e=g(f"I{j}", 2), n=g(f"d{v[j-1]}")))
        last = TileType(p + "IE", w=g(f"I{n}", 2))
        tiles.append(final(last) if count_from == count_to else last.with_glue(N, g("te", 2)))
        first_pos = (0, 0)
    else:
        v = digits((count_from + 1) % mod, base, n)
        first = TileType(p + "JE", w=g(f"J{n}", 2))
        if entry is not None:
            first = first.with_glue(*entry)
        tiles.append(first)
        for j in range(n, 0, -1):
            west = g(f"J{j-1}", 2) if j > 1 else g(f"ae:{int(count_from == count_to)}", 2)
            tiles.append(TileType(p + f"J{j}", e=g(f"J{j}", 2), w=west, n=g(f"d{v[j-1]}")))
        first_pos = (n + 1, 0)

    # copy rows (west to east)
    tiles.append(TileType(p + "TW", s=g("tw", 2), e=g("c1:1")))
    for j in range(1, n + 1):
        for e in (0, 1):
            for d in range(base):
                e2 = int(e and d == t_digits[j - 1])
                east = g(f"c{j+1}:{e2}") if j < n else g(f"ce:{e2}", 2)
                tiles.append(TileType(p + f"C{j}.{e}.{d}", w=g(f"c{j}:{e}"), s=g(f"d{d}"),
                                      n=g(f"d{d}"), e=east))
    tiles.append(TileType(p + "BE0", w=g("ce:0", 2), n=g("te", 2)))
    tiles.append(final(TileType(p + "BE1", w=g("ce:1", 2))))

    # add-two rows (east to west)
    tiles.append(TileType(p + "TE", s=g("te", 2), w=g(f"a{n}:2:1")))
    for j in range(n, 0, -1):
        carries = (2,) if j == n else (0, 1)
        for c in carries:
            for e in (0, 1):
                for d in range(base):
                    nd, c2 = (d + c) % base, (d + c) // base
                    e2 = int(e and nd == u_digits[j - 1])
                    west = g(f"a{j-1}:{c2}:{e2}") if j > 1 else g(f"ae:{e2}", 2)
                    tiles.append(TileType(p + f"A{j}.{c}.{e}.{d}", e=g(f"a{j}:{c}:{e}"),
                                          s=g(f"d{d}"), n=g(f"d{nd}"), w=west))
    tiles.append(TileType(p + "BW0", e=g("ae:0", 2), n=g("tw", 2)))
    tiles.append(final(TileType(p + "BW1", e=g("ae:1", 2))))

    # which row is last: init row has index 0 and direction init
    last_dir_east = (init == "W") == ((rows - 1) % 2 == 0)
    if rows == 1:
        last_name = p + ("IE" if init == "W" else "BW1")
        last_pos = (n + 1, 0) if init == "W" else (0, 0)
    else:
        last_name = p + ("BE1" if last_dir_east else "BW1")
        last_pos = ((n + 1) if last_dir_east else 0, rows - 1)
    if cap:
        east = last_pos[0] == n + 1   # final row ended at the east boundary: cap runs west
        top = rows
        if east:
            tiles.append(TileType(p + "KE", s=g("kc", 2), w=g(f"k{n}")))
            for j in range(1, n + 1):
                west = g("k0", 2) if j == 1 else g(f"k{j-1}")
                for d in range(base):
                    tiles.append(TileType(p + f"K{j}.{d}", e=g(f"k{j}"), s=g(f"d{d}"), w=west))
            end = TileType(p + "KW", e=g("k0", 2))
            last_pos = (0, top)
        else:
            tiles.append(TileType(p + "KW", s=g("kc", 2), e=g("k1")))
            for j in range(1, n + 1):
                east_g = g(f"k{n+1}", 2) if j == n else g(f"k{j+1}")
                for d in range(base):
                    tiles.append(TileType(p + f"K{j}.{d}", w=g(f"k{j}"), s=g(f"d{d}"), e=east_g))
            end = TileType(p + "KE", w=g(f"k{n+1}", 2))
            last_pos = (n + 1, top)
        if exit is not None:
            end = end.with_glue(exit[0], exit[1])
        tiles.append(end)
        rows += 1
        last_name = end.name
    return CounterLayout(n + 2, rows, first.name, first_pos, last_name, last_pos, tiles)


def make_zigzag_counter(bits: int, count_from: int = 0, count_to: int | None = None,
                        orientation: str = "W", base: int = 2, prefix: str = "") -> TileSystem:
    """Temperature-2 compact zig-zag counter from ``count_from`` to ``count_to``.

    ``orientation`` picks the end of the first row holding the seed ("W" or "E").
    """
    if count_to is None:
        count_to = base ** bits - 1 if bits <= 16 else 0
    lay = counter_tiles(bits, count_from, count_to, base, orientation, prefix)
    return TileSystem(lay.tiles, {lay.first_pos: lay.first}, 2,
                      name=f"counter(bits={bits},base={base},{count_from}->{count_to},{orientation})")


def place_tiles(tiles: list[TileType], quarter_turns: int) -> list[TileType]:
    return [rotate_tile(t, quarter_turns) for t in tiles]


def _place(p: Pos, quarter_turns: int, offset: Pos) -> Pos:
    x, y = rotate_pos(p, quarter_turns)
    return (x + offset[0], y + offset[1])


# -- squares ----------------------------------------------------------------------

SQUARE_BASE = 4


@dataclass(frozen=True)
class SquarePlan:
    """Counter widths for an N x N square (see make_square_system)."""

    n: int
    bits_w: int
    bits_n: int
    bits_e: int

    @property
    def w(self) -> int:
        return self.bits_w + 2

    @property
    def wn(self) -> int:
        return self.bits_n + 2

    @property
    def we(self) -> int:
        return self.bits_e + 2


def _fits(bits: int, length: int, base: int = SQUARE_BASE) -> bool:
    # a capped counter of ``length`` rows counts through length - 1 values
    return bits >= 1 and length >= 2 and base ** bits >= length - 1


def plan_square(n: int) -> SquarePlan:
    """Smallest counter widths that tile the border of the square.

    CW climbs the west edge (n rows), CN runs east along the top (n - w columns), CE runs
    down the east edge below CN (n - wn rows). The zig-zag end positions force CN and CE
    to have an odd number of rows (cap row included).
    """
    best = None
    for bw in range(1, 17):
        if not _fits(bw, n):
            continue
        rn = n - (bw + 2)
        if rn < 1 or rn % 2 == 0:
            continue
        for bn in range(1, 17):
            if not _fits(bn, rn):
                continue
            re = n - (bn + 2)
            if re < 1 or re % 2 == 0:
                continue
            for be in range(1, 17):
                if be + 2 > rn:
                    break
                if _fits(be, re):
                    cand = SquarePlan(n, bw, bn, be)
                    if best is None or bw + bn + be < best.bits_w + best.bits_n + best.bits_e:
                        best = cand
                    break
    if best is None:
        raise GalleryError(f"no counter layout for a {n} x {n} square")
    return best


def make_square_system(n: int, metadata: dict | None = None) -> TileSystem:
    """Temperature-2 system whose unique terminal assembly is the ``n x n`` square.

    Three capped base-4 zig-zag counters line the west, north and east edges (the cap row
    reads the final count so every digit row has a reader above it); the last counter
    launches a path west along the bottom row, and constant filler columns grow north from
    it until they meet the north counter.
    """
    if n < 8:
        raise GalleryError("square size must be >= 8")
    pl = plan_square(n)
    w, wn = pl.w, pl.wn
    x1, x2, p_glue, f_glue = Glue("sq:x1", 2), Glue("sq:x2", 2), Glue("sq:p", 2), Glue("sq:f", 2)
    tiles: list[TileType] = []
    # CW: unrotated, last tile at the east end of the top row
    init_w = "E" if n % 2 == 0 else "W"
    cw = counter_tiles(pl.bits_w, 0, n - 2, SQUARE_BASE, init_w, "W:", exit=(E, x1), digit_prefix="",
                       cap=True)
    tiles += cw.tiles
    seed = {cw.first_pos: cw.first}
    # CN: quarter turn clockwise, first column at x = w, entered from the west (own south)
    rn = n - w
    cn = counter_tiles(pl.bits_n, 0, rn - 2, SQUARE_BASE, "W", "N:", entry=(S, x1), exit=(E, x2),
                       digit_prefix="", cap=True)
    tiles += place_tiles(cn.tiles, 1)
    # CE: half turn, below CN's last column, entered from the north (own south)
    re = n - wn
    ce = counter_tiles(pl.bits_e, 0, re - 2, SQUARE_BASE, "W", "E:", entry=(S, x2), exit=(E, p_glue),
                       digit_prefix="", cap=True)
    tiles += place_tiles(ce.tiles, 2)
    tiles.append(TileType("P", e=p_glue, w=p_glue, n=f_glue))
    tiles.append(TileType("F", s=f_glue, n=f_glue))
    meta = {"construction": "square", "n": n, "plan": (pl.bits_w, pl.bits_n, pl.bits_e),
            "base": SQUARE_BASE, "counter_rows": (n, rn, re)}
    meta.update(metadata or {})
    return TileSystem(tiles, seed, 2, name=f"square({n})", metadata=meta)


# -- planter ----------------------------------------------------------------------

@dataclass(frozen=True)
class PlanterStage:
    """World geometry of one planter stage (x grows east, the planter bottom is y = 0)."""

    index: int
    bits: int
    counter_x: int       # first column of the horizontal counter
    square_x: int        # first column of the '#' square
    side: int            # square side; also the width of the vertical counter above it
    padded: bool         # a padding column follows the square
    counter_height: int  # rows of the vertical counter standing on the square

    @property
    def end_x(self) -> int:
        return self.square_x + self.side + int(self.padded)

    @property
    def counter_top(self) -> int:
        return self.side + self.counter_height - 1


def planter_stages(k: int, heights: list[int] | None = None) -> list[PlanterStage]:
    if k < 1:
        raise GalleryError("need at least one vertical counter")
    heights = list(heights) if heights is not None else [2 ** (s + 1) for s in range(1, k + 1)]
    if len(heights) != k:
        raise GalleryError("one height per vertical counter")
    out, x = [], 0
    for s in range(1, k + 1):
        side = s + 3
        h = heights[s - 1]
        if not 2 <= h <= 2 ** (side - 2) + 1:
            raise GalleryError(f"counter height {h} does not fit a {side - 2}-bit counter")
        xq = x + 2 ** s + 1
        st = PlanterStage(s, s, x, xq, side, side % 2 == 0, h)
        out.append(st)
        x = st.end_x
    return out


def _square_tiles(s: int, side: int) -> list[TileType]:
    """Column-by-column '#' square of the given side for stage ``s``.

    Column 0 climbs from the bottom with positional tiles; later columns alternate
    down/up and read their west neighbours cooperatively. The '#' token sits at row i of
    column i. Upward columns publish the token shifted one row up (the next column reads
    it directly), downward columns publish it in place (the next column shifts it while
    climbing, via its chain). A downward column that finds the token just below its top
    marks the next column as the last one; the square is done when the token reaches the
    top row, and the last column ends on the handover glue ``Q{s}:X``.
    """
    q, H = f"Q{s}:", side
    s2 = lambda label: Glue(q + label, 2)          # noqa: E731
    s1 = lambda label: Glue(q + label, 1)          # noqa: E731
    pub = lambda label: Glue("sq:" + label, 1)     # noqa: E731
    tiles: list[TileType] = []
    for r in range(H):
        t = TileType(f"{q}0.{r}", w=Glue(f"P{s}:sq", 2)) if r == 0 else TileType(f"{q}0.{r}", s=s2(f"0.{r}"))
        if r < H - 1:
            t = t.with_glue(N, s2(f"0.{r+1}")).with_glue(E, pub("ub0" if r == 0 else f"um{int(r == 1)}"))
        else:
            t = t.with_glue(E, s2("T0")).with_glue(N, Glue(f"V{s}:go", 2))
        tiles.append(t)
    # downward columns; chain below a tile carries (above-is-top, done, last)
    for f in (0, 1):
        t = TileType(f"{q}D.t{f}", w=s2(f"T{f}"), s=s1(f"d1{f}0"))
        tiles.append(t if f else t.with_glue(E, pub("dt")))
    for top in (0, 1):
        for done in (0, 1):
            for last in (0, 1):
                if top and last:
                    continue
                for kind in ("m", "b"):
                    for f in (0, 1) if not done else (0,):
                        nl = int(last or (f and top))
                        t = TileType(f"{q}D.{kind}{top}{done}{last}{f}", n=s1(f"d{top}{done}{last}"),
                                     w=pub(f"u{kind}{f}"))
                        if kind == "m":
                            t = t.with_glue(S, s1(f"d0{done}{nl}"))
                            if not done:
                                t = t.with_glue(E, pub(f"dm{f}{nl}"))
                        else:
                            t = t.with_glue(E, s2("X") if done else s2(f"B{f}{nl}"))
                        tiles.append(t)
    # upward columns; chain above a tile carries (west-of-me-is-#, I-am-#, last)
    for h in (0, 1):
        for last in (0, 1):
            t = TileType(f"{q}U.b{h}{last}", w=s2(f"B{h}{last}"), n=s1(f"u{h}0{last}"))
            tiles.append(t if last else t.with_glue(E, pub("ub0")))
    for x in (0, 1):
        for y in (0, 1):
            for last in (0, 1):
                for h in (0, 1):
                    t = TileType(f"{q}U.m{x}{y}{last}{h}", s=s1(f"u{x}{y}{last}"), w=pub(f"dm{h}{last}"),
                                 n=s1(f"u{h}{x}{last}"))
                    tiles.append(t if last else t.with_glue(E, pub(f"um{y}")))
                t = TileType(f"{q}U.t{x}{y}{last}", s=s1(f"u{x}{y}{last}"), w=pub("dt"))
                tiles.append(t.with_glue(E, s2("X") if x else s2(f"T{y}")))
    return tiles


def make_planter_system(k: int, heights: list[int] | None = None,
                        metadata: dict | None = None) -> TileSystem:
    """Temperature-2 planter with its first ``k`` vertical counters.

    Stage ``s`` is an ``s``-bit horizontal counter (capped, rotated to grow east) that
    runs up to all ones, followed by an ``(s+3) x (s+3)`` square with a '#' diagonal, an
    optional padding column that fixes the zig-zag parity, and the reset column that starts
    stage ``s+1`` one row taller. The top-left tile of each square launches a vertical
    counter of width ``s+3``; by default counter ``s`` is ``2**(s+1)`` rows tall (cap row
    included). After square ``k`` a single truncation tile ends the planter.
    """
    stages = planter_stages(k, heights)
    tiles: list[TileType] = []
    seed = None
    handover = None
    for st in stages:
        s = st.index
        entry = None if handover is None else (S, handover)
        lay = counter_tiles(s, 0, 2 ** s - 1, 2, "W", f"P{s}:", entry=entry,
                            exit=(N, Glue(f"P{s}:sq", 2)), digit_prefix="", cap=True)
        tiles += place_tiles(lay.tiles, 1)
        if s == 1:
            seed = {_place(lay.first_pos, 1, (st.counter_x, s + 1)): lay.first}
        tiles += _square_tiles(s, st.side)
        handover = Glue(f"Q{s}:X", 2)
        if st.padded:
            # the square ended at the bottom: climb one column, hand over at the top
            for r in range(st.side):
                t = TileType(f"Z{s}.{r}", w=handover) if r == 0 else TileType(f"Z{s}.{r}", s=Glue(f"Z{s}:{r}", 2))
                if r < st.side - 1:
                    t = t.with_glue(N, Glue(f"Z{s}:{r+1}", 2))
                tiles.append(t)
            handover = Glue(f"Z{s}:out", 2)
            tiles[-1] = tiles[-1].with_glue(E, handover)
        v = counter_tiles(st.side - 2, 0, st.counter_height - 2, 2, "W", f"V{s}:",
                          entry=(S, Glue(f"V{s}:go", 2)), digit_prefix="", cap=True)
        tiles += v.tiles
    tiles.append(TileType("TRUNC", w=handover))
    meta = {"construction": "planter", "k": k, "finitized": True,
            "truncation": "TRUNC ends the planter after the last square",
            "stages": [st.__dict__ for st in stages],
            "counter_heights": [st.counter_height for st in stages]}
    meta.update(metadata or {})
    return TileSystem(tiles, seed, 2, name=f"planter({k})", metadata=meta)


# -- shape W and the S1..S8 line ----------------------------------------------------

SPACERS = 6
LINE = 8


@dataclass(frozen=True)
class FingerGeometry:
    """Where one finger lives in the compiled assembly (absolute cells)."""

    stage: int
    x: int                 # finger column
    arm_y: int             # row of the spacer arm
    gap_y: int             # the cell row that must stay empty (one above the planter)
    planter_top: int       # topmost planter row under the finger
    hooked: bool

    @property
    def available(self) -> int:
        """Free cells between the arm and the planter top."""
        return self.arm_y - self.gap_y

    @property
    def gap_cell(self) -> Pos:
        return (self.x, self.gap_y)

    def finger_cells(self) -> list[Pos]:
        return [(self.x, y) for y in range(self.arm_y - 1, self.gap_y - 1, -1)]


@functools.lru_cache(maxsize=8)
def _compiled_planter(k: int, heights: tuple[int, ...] | None, hook: int | None):
    from .compiler import compile as compile_system
    from .engine import Bounds

    src = make_planter_system(k, list(heights) if heights else None)
    stages = planter_stages(k, list(heights) if heights else None)
    anchors = {}
    for st in stages:
        s = st.index
        side = N if s == hook else W
        anchors[f"V{s}:KW"] = [((0, -1), side, Glue("w:rise" if s == hook else "w:arm", 1))]
        anchors[f"Q{s}:0.{st.side - 1}"] = [((0, 0), W, Glue("w:s", 1))]
    out = compile_system(src, Bounds(10**6, 10**6), require_zigzag=False, fill=True, anchors=anchors)
    return src, stages, out


def _finger_tiles(s_line: bool) -> tuple[list[TileType], list[DupleType]]:
    tiles = [TileType("W:R", s=Glue("w:rise", 1), w=Glue("w:arm", 1))]
    for i in range(1, SPACERS + 1):
        t = TileType(f"W:A{i}", e=Glue("w:arm" if i == 1 else f"w:a{i-1}", 1))
        t = t.with_glue(S, Glue("w:fg", 1)) if i == SPACERS else t.with_glue(W, Glue(f"w:a{i}", 1))
        tiles.append(t)
    tiles.append(TileType("W:Fb", s=Glue("w:fg", 1), n=Glue("w:fi", 1)))
    tiles.append(TileType("W:Ft", s=Glue("w:fi", 1), n=Glue("w:fg", 1)))
    if s_line:
        for i in range(1, LINE + 1):
            t = TileType(f"W:S{i}", e=Glue("w:s" if i == 1 else f"w:s{i-1}", 1))
            tiles.append(t if i == LINE else t.with_glue(W, Glue(f"w:s{i}", 1)))
    return tiles, [DupleType("W:Fb", "W:Ft", "NS")]


def _shape_w(k: int, odd_hook: int | None, heights, s_line: bool) -> TileSystem:
    if k < 1:
        raise GalleryError("need at least one vertical counter")
    if odd_hook is not None and not 1 <= odd_hook <= k:
        raise GalleryError(f"odd_hook must name a counter in 1..{k}")
    hkey = tuple(heights) if heights is not None else None
    src, stages, out = _compiled_planter(k, hkey, odd_hook)
    m = out.m
    extra, duples = _finger_tiles(s_line)
    base = out.dtas
    tiles = list(base.tiles.values()) + extra
    singles = set(base.singletons) | {t.name for t in extra if t.name not in ("W:Fb", "W:Ft")}
    fingers = []
    for st in stages:
        hooked = st.index == odd_hook
        arm_y = (st.side + st.counter_height) * m - 1 + int(hooked)
        fingers.append(FingerGeometry(st.index, st.square_x * m - SPACERS, arm_y,
                                      (st.side - 1) * m, (st.side - 1) * m - 1, hooked))
    meta = {"construction": "S8" if s_line else "shape_W", "k": k, "m": m, "b": out.b,
            "finitized": True, "odd_hook": odd_hook, "spacers": SPACERS,
            "counter_heights": [st.counter_height for st in stages],
            "fingers": fingers, "source": src, "compiled": out}
    if s_line:
        meta["line"] = {f.stage: [(st.square_x * m - i, f.gap_y) for i in range(1, LINE + 1)]
                        for f, st in zip(fingers, stages)}
    return TileSystem(tiles, base.seed, 1, singletons=singles, duples=list(base.duples) + duples,
                      name=f"{meta['construction']}({k})", check_seed=False, metadata=meta)


def make_shape_W_system(k: int, odd_hook: int | None = None,
                        heights: list[int] | None = None) -> TileSystem:
    """Temperature-1 duple system whose terminal shape is the planter/finger shape W.

    The planter of ``make_planter_system(k)`` is compiled into macrotiles (filled, so each
    block is solid). The top-left macrotile of every vertical counter carries an anchor
    glue: six spacers grow west from it and the last one drops a column of vertical duples.
    The free column below the arm has ``(h + 1) * m - 1`` cells, odd because ``m`` is even,
    so the finger stops with one empty cell above the planter.

    ``odd_hook`` (tests only) puts counter ``odd_hook``'s arm on a one-tile riser, making
    that counter an odd number of tiles tall; its finger then runs into the planter.
    """
    return _shape_w(k, odd_hook, heights, s_line=False)


def make_S8_system(k: int, odd_hook: int | None = None, heights: list[int] | None = None) -> TileSystem:
    """Shape W plus an 8-tile line growing west along the gap row from each counter base.

    The line starts on the west face of the macrotile under the counter's first row; its
    sixth tile lands exactly in the gap between finger and planter.
    """
    return _shape_w(k, odd_hook, heights, s_line=True)


# -- an aTAM candidate for the finger (pumping demos) ------------------------------

@dataclass(frozen=True)
class CandidateGeometry:
    planter_y: int
    counter_x: int
    finger_x: int
    arm_y: int
    gap_y: int
    line: tuple[Pos, ...]

    def finger_cells(self) -> list[Pos]:
        return [(self.finger_x, y) for y in range(self.arm_y - 1, self.gap_y, -1)]


def make_finger_candidate(height: int = 12, budget: int = 5, s_line: bool = True) -> TileSystem:
    """Scale-1 temperature-2 aTAM attempt at the finger gadget.

    A planter row, one counter column of ``height`` tiles standing on it, six spacers west
    from the column top and a single-tile-wide finger dropping from the last spacer. The
    finger cycles through ``budget`` tile types; since a column cannot count past its type
    budget, the finger's end tile ``Z*`` competes with the next finger tile at every row.
    Pinning the end one row above the gap gives the W-like terminal; pumping shows the
    same tile set can also fill the gap. With ``s_line`` the 8-tile line grows west from
    the column base along the gap row.
    """
    if height < 4 or height % 2:
        raise GalleryError("height must be even and >= 4")
    if budget < 1:
        raise GalleryError("budget must be positive")
    c = LINE + 2
    g2 = lambda label: Glue("c:" + label, 2)  # noqa: E731
    tiles = []
    for x in range(c + 1):
        t = TileType(f"C:P{x}")
        if x > 0:
            t = t.with_glue(W, g2(f"p{x}"))
        if x < c:
            t = t.with_glue(E, g2(f"p{x+1}"))
        else:
            t = t.with_glue(N, g2("k1"))
        tiles.append(t)
    for y in range(1, height + 1):
        t = TileType(f"C:K{y}", s=g2(f"k{y}"))
        if y < height:
            t = t.with_glue(N, g2(f"k{y+1}"))
        else:
            t = t.with_glue(W, g2("a1"))
        if y == 1 and s_line:
            t = t.with_glue(W, g2("s1"))
        tiles.append(t)
    for i in range(1, SPACERS + 1):
        t = TileType(f"C:A{i}", e=g2(f"a{i}"))
        tiles.append(t.with_glue(S, g2("f0")) if i == SPACERS else t.with_glue(W, g2(f"a{i+1}")))
    for i in range(budget):
        tiles.append(TileType(f"C:F{i}", n=g2(f"f{i}"), s=g2(f"f{(i + 1) % budget}")))
        tiles.append(TileType(f"C:Z{i}", n=g2(f"f{i}")))
    if s_line:
        for i in range(1, LINE + 1):
            t = TileType(f"C:S{i}", e=g2(f"s{i}"))
            tiles.append(t if i == LINE else t.with_glue(W, g2(f"s{i+1}")))
    geo = CandidateGeometry(0, c, c - SPACERS, height, 1,
                            tuple((c - i, 1) for i in range(1, LINE + 1)) if s_line else ())
    meta = {"construction": "finger_candidate", "height": height, "budget": budget, "geometry": geo}
    return TileSystem(tiles, {(0, 0): "C:P0"}, 2, name=f"finger_candidate({height},{budget})",
                      metadata=meta)


def pin_finger_end(sys: TileSystem, defer_line: bool = True, rng: random.Random | None = None):
    """Chooser for ``engine.run``: end the candidate's finger one row above the gap and,
    optionally, keep the 8-tile line waiting until the finger is done. Among the allowed
    placements it takes the first, or a random one when ``rng`` is given."""
    geo: CandidateGeometry = sys.metadata["geometry"]
    stop_y = geo.gap_y + 1

    def allowed(p, finger_done):
        (_, y), n = p.cells[0], p.types[0]
        if n.startswith(("C:Z", "C:F")):
            return n.startswith("C:Z") == (y == stop_y)
        return not (defer_line and n.startswith("C:S") and not finger_done)

    def choose(frontier, cells):
        done = any(n.startswith("C:Z") for n in cells.values())
        ok = [p for p in frontier if allowed(p, done)]
        if not ok:
            raise StopIteration
        return rng.choice(ok) if rng is not None else ok[0]
    return choose


# -- finger / flagpole ----------------------------------------------------------------

FLAGPOLE_STRENGTH_1 = ("g11", "g14")


def make_finger_flagpole() -> TileSystem:
    """The 18-type temperature-2 system with two nondeterministic arms and a keystone.

    From the seed, stems go up and down two rows and turn east into one-tile-wide arms.
    Each arm repeats one tile type on a shared east-west glue until its end tile wins the
    race; the end tile drops (or raises) a one-tile finger toward the seed row. Only when
    both arms have the same length do the fingers' strength-1 glues ``g11`` and ``g14``
    meet across one cell, where the keystone binds cooperatively; a three-tile flagpole runs
    east from it and a three-tile flag hangs off the pole.
    """
    def g(i: int) -> Glue:
        return Glue(f"g{i}", 1 if f"g{i}" in FLAGPOLE_STRENGTH_1 else 2)
    tiles = [
        TileType("seed", n=g(1), s=g(5)),
        TileType("top_stem", s=g(1), n=g(2)),
        TileType("top_corner", s=g(2), e=g(3)),
        TileType("top_arm", w=g(3), e=g(3)),
        TileType("top_end", w=g(3), s=g(4)),
        TileType("top_finger", n=g(4), s=g(11)),
        TileType("bottom_stem", n=g(5), s=g(6)),
        TileType("bottom_corner", n=g(6), e=g(7)),
        TileType("bottom_arm", w=g(7), e=g(7)),
        TileType("bottom_end", w=g(7), n=g(8)),
        TileType("bottom_finger", s=g(8), n=g(14)),
        TileType("keystone", n=g(11), s=g(14), e=g(9)),
        TileType("pole1", w=g(9), e=g(10)),
        TileType("pole2", w=g(10), e=g(12)),
        TileType("pole3", w=g(12), n=g(13)),
        TileType("flag1", s=g(13), n=g(15)),
        TileType("flag2", s=g(15), e=g(16)),
        TileType("flag3", w=g(16)),
    ]
    return TileSystem(tiles, {(0, 0): "seed"}, 2, name="finger_flagpole",
                      metadata={"construction": "flagpole", "arm_rows": (2, -2)})


def pin_arms(top: int, bottom: int):
    """Chooser fixing the arm lengths (tiles east of each corner, end tile included)."""
    if top < 1 or bottom < 1:
        raise GalleryError("arm lengths must be positive")

    def choose(frontier, cells):
        for p in frontier:
            (x, y), n = p.cells[0], p.types[0]
            want = top if y > 0 else bottom
            if n.endswith("_arm") and x >= want:
                continue
            if n.endswith("_end") and x != want:
                continue
            return p
        raise StopIteration
    return choose


# -- a one-wide duple tower ---------------------------------------------------------

def make_tower_system() -> TileSystem:
    """Four-type temperature-1 duple tower: a seed, one vertical duple repeated on the same
    north/south glue, and a cap that may end the tower at any duple boundary."""
    g, gi = Glue("t:g", 1), Glue("t:i", 1)
    tiles = [TileType("T:seed", n=g), TileType("T:lo", s=g, n=gi), TileType("T:hi", s=gi, n=g),
             TileType("T:cap", s=g)]
    return TileSystem(tiles, {(0, 0): "T:seed"}, 1, singletons=["T:seed", "T:cap"],
                      duples=[DupleType("T:lo", "T:hi", "NS")], name="tower",
                      metadata={"construction": "tower"})


def pin_height(height: int):
    """Chooser capping a tower (or any column) so its top cell is at row ``height - 1``."""
    def choose(frontier, cells):
        for p in frontier:
            top = max(y for _, y in p.cells)
            if p.types[-1].endswith("cap"):
                if top == height - 1:
                    return p
                continue
            if top < height - 1:
                return p
        raise StopIteration
    return choose


CONSTRUCTIONS = ("counter", "square", "planter", "shape_W", "S8", "flagpole", "tower",
                 "finger_candidate")


def build(params: GalleryParams) -> TileSystem:
    """Dispatch ``params`` to the matching generator."""
    c = params.construction
    if c == "counter":
        return make_zigzag_counter(params.bits, params.count_from, params.count_to,
                                   params.orientation, params.base)
    if c == "square":
        return make_square_system(params.n)
    if c == "planter":
        return make_planter_system(params.k)
    if c == "shape_W":
        return make_shape_W_system(params.k, params.odd_hook)
    if c == "S8":
        return make_S8_system(params.k, params.odd_hook)
    if c == "flagpole":
        return make_finger_flagpole()
    if c == "tower":
        return make_tower_system()
    return make_finger_candidate(params.height, params.budget)


def random_small_system(rng: random.Random, max_types: int = 12) -> TileSystem:
    """A random system with at most ``max_types`` tile types and a single-tile seed.

    Temperature 1 or 2, two to five glue labels, and in half the cases the last two types
    form a duple. Used as a fuzzing family for the window-movie machinery.
    """
    tau = rng.choice([1, 1, 2])
    n = rng.randint(3, min(10, max_types))
    labels = [f"g{i}" for i in range(rng.randint(2, 5))]

    def glue() -> Glue:
        if rng.random() < 0.35:
            return Glue()
        return Glue(rng.choice(labels), rng.choice([1, 1, 2]) if tau == 2 else 1)

    tiles = [TileType(f"t{i}", glue(), glue(), glue(), glue()) for i in range(n)]
    duples = []
    if n >= 4 and rng.random() < 0.5:
        axis = rng.choice(["EW", "NS"])
        gi = Glue("int", tau)
        side = Direction.E if axis == "EW" else Direction.N
        tiles[-2] = tiles[-2].with_glue(side, gi)
        tiles[-1] = tiles[-1].with_glue(-side, gi)
        duples = [DupleType(tiles[-2].name, tiles[-1].name, axis)]
    halves = {d for D in duples for d in (D.a, D.b)}
    singles = [t.name for t in tiles if t.name not in halves]
    return TileSystem(tiles, {(0, 0): tiles[0].name}, tau, singletons=singles, duples=duples,
                      name="random", check_seed=False)
