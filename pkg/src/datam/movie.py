"""Windows, window movies, sequence splicing and pumping."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

import networkx as nx

from .engine import AssemblySequence, Random, run
from .model import DIRS, Assembly, Glue, ModelError, Placement, Pos, TileSystem


class UnsupportedWindowError(ModelError):
    pass


class SplicePreconditionError(ModelError):
    pass


class SpliceInvalidError(ModelError):
    def __init__(self, msg: str, step: int, placement: Placement, partial: AssemblySequence):
        super().__init__(msg)
        self.step = step
        self.placement = placement
        self.partial = partial


@dataclass(frozen=True)
class Window:
    """An edge cut of the grid graph, given by the side each cell lies on.

    ``kind`` is one of:

    * ``"rect"``: closed rectangle; inside cells are ``[x0, x0+width) x [y0, y0+height)``.
    * ``"vline"``: vertical line left of column ``x0``; inside cells have ``x >= x0``.
    * ``"hline"``: horizontal line below row ``y0``; inside cells have ``y >= y0``.
    * ``"region"``: inside cells listed explicitly in ``cells``.
    """

    kind: str
    x0: int = 0
    y0: int = 0
    width: int = 0
    height: int = 0
    cells: frozenset[Pos] = frozenset()

    def __post_init__(self):
        if self.kind not in ("rect", "vline", "hline", "region"):
            raise UnsupportedWindowError(f"unknown window kind {self.kind!r}")
        if self.kind == "rect" and (self.width < 1 or self.height < 1):
            raise UnsupportedWindowError("rectangle must have positive size")

    @classmethod
    def rect(cls, x0: int, y0: int, width: int, height: int) -> "Window":
        return cls("rect", x0, y0, width, height)

    @classmethod
    def vline(cls, x: int) -> "Window":
        return cls("vline", x0=x)

    @classmethod
    def hline(cls, y: int) -> "Window":
        return cls("hline", y0=y)

    @classmethod
    def region(cls, cells: Iterable[Pos]) -> "Window":
        return cls("region", cells=frozenset(cells))

    @property
    def top(self) -> int:
        """Row just above the rectangle (its top edge lies below this row)."""
        return self.y0 + self.height

    def inside(self, c: Pos) -> bool:
        x, y = c
        if self.kind == "rect":
            return self.x0 <= x < self.x0 + self.width and self.y0 <= y < self.y0 + self.height
        if self.kind == "vline":
            return x >= self.x0
        if self.kind == "hline":
            return y >= self.y0
        return c in self.cells

    def crosses(self, a: Pos, b: Pos) -> bool:
        return self.inside(a) != self.inside(b)

    @property
    def anchor(self) -> Pos:
        """Reference point used to relate translated windows (top-left for rectangles)."""
        if self.kind == "rect":
            return (self.x0, self.top)
        if self.kind == "vline":
            return (self.x0, 0)
        if self.kind == "hline":
            return (0, self.y0)
        return min(self.cells) if self.cells else (0, 0)

    def translated(self, c: Pos) -> "Window":
        dx, dy = c
        if self.kind == "region":
            return Window.region((x + dx, y + dy) for x, y in self.cells)
        return Window(self.kind, self.x0 + dx, self.y0 + dy, self.width, self.height)

    def edges(self, bbox: tuple[int, int, int, int]) -> list[tuple[Pos, Pos]]:
        """Cut edges with both ends in ``bbox = (xmin, ymin, xmax, ymax)``."""
        xmin, ymin, xmax, ymax = bbox
        out = []
        for x in range(xmin, xmax + 1):
            for y in range(ymin, ymax + 1):
                if x < xmax and self.crosses((x, y), (x + 1, y)):
                    out.append(((x, y), (x + 1, y)))
                if y < ymax and self.crosses((x, y), (x, y + 1)):
                    out.append(((x, y), (x, y + 1)))
        return out


def transform_window(w: Window, h: int, c: Pos = (0, 0)) -> Window:
    """Resize a rectangular window to height ``h`` keeping its top edge, then translate."""
    if w.kind != "rect":
        raise UnsupportedWindowError("only closed rectangular windows can be resized")
    if h < 1:
        raise ValueError("height must be >= 1")
    return Window.rect(w.x0 + c[0], w.top - h + c[1], w.width, h)


# -- movies -----------------------------------------------------------------------

@dataclass(frozen=True)
class MovieEntry:
    position: Pos
    glue: Glue
    orientation: tuple[int, int]
    step: int


@dataclass
class WindowMovie:
    """Glue appearances along a window, grouped by the step that produced them.

    Seed tiles contribute a group at step 0. ``bond_forming`` movies keep only glues that
    bind to a tile already present across the window (experimental).
    """

    window: Window
    groups: list[list[MovieEntry]] = field(default_factory=list)
    bond_forming: bool = False
    cut_duples: int = 0                  # placements with cells on both sides

    @property
    def entries(self) -> list[MovieEntry]:
        return [e for g in self.groups for e in g]

    def __len__(self):
        return len(self.entries)

    def normalized(self, origin: Pos | None = None) -> tuple:
        """Step-free form relative to ``origin`` (the window anchor by default)."""
        ox, oy = self.window.anchor if origin is None else origin
        return tuple(tuple(((e.position[0] - ox, e.position[1] - oy), e.glue.label, e.glue.strength,
                            e.orientation) for e in g) for g in self.groups)

    def multiset(self) -> dict:
        out: dict = {}
        for e in self.entries:
            k = (e.glue.label, e.glue.strength, e.orientation)
            out[k] = out.get(k, 0) + 1
        return out

    def translated(self, c: Pos) -> "WindowMovie":
        dx, dy = c
        return WindowMovie(self.window.translated(c),
                           [[MovieEntry((e.position[0] + dx, e.position[1] + dy), e.glue, e.orientation,
                                        e.step) for e in g] for g in self.groups], self.bond_forming,
                           self.cut_duples)


_STEPS = tuple((d, d.value) for d in DIRS)


def _entries_for(sys: TileSystem, cells: dict, placed: Iterable[tuple[Pos, str]], w: Window, step: int,
                 bond_forming: bool) -> list[MovieEntry]:
    out = []
    inside = w.inside
    for c, n in placed:
        t = sys.tiles[n]
        side = inside(c)
        x, y = c
        for d, (dx, dy) in _STEPS:
            g = t.glue(d)
            if g.strength <= 0:
                continue
            q = (x + dx, y + dy)
            if inside(q) == side:
                continue
            if bond_forming:
                nb = cells.get(q)
                if nb is None or sys.tiles[nb].glue(-d) != g:
                    continue
            out.append(MovieEntry(c, g, (dx, dy), step))
    # unit vectors sorted as integer pairs: (-1,0) < (0,-1) < (0,1) < (1,0)
    out.sort(key=lambda e: (e.orientation, e.position))
    return out


def extract_movie(seq: AssemblySequence, w: Window, bond_forming: bool = False) -> WindowMovie:
    sys = seq.system
    cells = dict(seq.seed.cells)
    mv = WindowMovie(w, bond_forming=bond_forming)
    g0 = _entries_for(sys, cells, sorted(cells.items()), w, 0, bond_forming)
    if g0:
        mv.groups.append(g0)
    for i, p in enumerate(seq.placements, 1):
        for c, n in zip(p.cells, p.types):
            cells[c] = n
        g = _entries_for(sys, cells, zip(p.cells, p.types), w, i, bond_forming)
        if len(p.cells) > 1 and len({w.inside(q) for q in p.cells}) == 2:
            mv.cut_duples += 1
        if g:
            mv.groups.append(g)
    return mv


def movies_match(a: WindowMovie, b: WindowMovie) -> bool:
    return a.normalized() == b.normalized()


def find_matching_windows(seq: AssemblySequence, family: list[Window], bond_forming: bool = False,
                          allow_cut_duples: bool = False) -> list[tuple[int, int, Pos]]:
    """Pairs ``(i, j, c)`` of windows with equal movies, where ``family[j]`` sits at ``c``
    relative to ``family[i]`` (anchor difference). Empty movies never match.

    Windows cutting a duple in half are skipped unless ``allow_cut_duples``: equal movies do
    not make such a splice valid, since one sequence may bind the duple through its inside
    half and the other through its outside half (see ``tests/test_movie.py``)."""
    keys = []
    for w in family:
        mv = extract_movie(seq, w, bond_forming)
        ok = mv.groups and (allow_cut_duples or not mv.cut_duples)
        keys.append(mv.normalized() if ok else None)
    out = []
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if keys[i] is not None and keys[i] == keys[j]:
                ai, aj = family[i].anchor, family[j].anchor
                out.append((i, j, (aj[0] - ai[0], aj[1] - ai[1])))
    return out


# -- splicing ---------------------------------------------------------------------

@dataclass
class SpliceResult:
    sequence: AssemblySequence
    status: str                          # "complete" | "collision"
    collision: Placement | None = None
    translation: Pos = (0, 0)

    @property
    def assembly(self) -> Assembly:
        return self.sequence.result


def _seed_side(seq: AssemblySequence, w: Window) -> bool:
    sides = {w.inside(c) for c in seq.seed.cells}
    if len(sides) != 1:
        raise SplicePreconditionError("the window cuts through the seed")
    return sides.pop()


def splice(seq_a: AssemblySequence, seq_b: AssemblySequence, w: Window, w2: Window,
           translation: Pos | None = None) -> SpliceResult:
    """Interior growth of ``seq_a`` behind ``w``, moved onto ``w2``, merged with the exterior
    growth of ``seq_b`` outside ``w2`` (exterior: the side holding the seed).

    Steps are interleaved by the shared window movie and every emitted step is checked
    against the frontier. A step blocked by an occupied cell ends the splice with status
    ``"collision"`` and the partial sequence; a step lacking binding strength raises
    ``SpliceInvalidError``.
    """
    sys = seq_b.system
    c = translation if translation is not None else (w2.anchor[0] - w.anchor[0], w2.anchor[1] - w.anchor[1])
    wa = w.translated(c)
    ext_a = _seed_side(seq_a, w)
    ext_b = _seed_side(seq_b, w2)
    ma = extract_movie(seq_a, w).translated(c)
    mb = extract_movie(seq_b, w2)
    if ma.normalized(w2.anchor) != mb.normalized(w2.anchor):
        raise SplicePreconditionError("window movies differ")

    def a_interior(p: Placement) -> list[int]:
        return [k for k, q in enumerate(p.cells) if wa.inside(q) != ext_a]

    def b_exterior(p: Placement) -> list[int]:
        return [k for k, q in enumerate(p.cells) if w2.inside(q) == ext_b]

    pa = [p.translated(c) for p in seq_a.placements]
    pb = list(seq_b.placements)
    cells = dict(seq_b.seed.cells)
    out: list[Placement] = []
    result = None

    def emit(p: Placement) -> bool:
        nonlocal result
        if any(q in cells for q in p.cells):
            result = "collision", p
            return False
        if not sys.is_legal(cells, p):
            partial = AssemblySequence(sys, out, seq_b.seed, False, dict(cells))
            raise SpliceInvalidError(f"step {len(out)} ({p}) lacks binding strength", len(out), p, partial)
        p = p.with_pid(len(out) + 1)
        out.append(p)
        for q, n in zip(p.cells, p.types):
            cells[q] = n
        return True

    def from_a(p: Placement) -> Placement | None:
        keep = a_interior(p)
        if len(keep) == len(p.cells):
            return p
        return None

    def from_b(p: Placement) -> Placement | None:
        keep = b_exterior(p)
        if len(keep) == len(p.cells):
            return p
        return None

    i = j = 0
    # events are matched by group index; positions tell which side owns each group
    for ga, gb in zip(ma.groups, mb.groups):
        step_a, step_b = ga[0].step, gb[0].step
        a_side = any(wa.inside(e.position) != ext_a for e in ga)
        b_side = any(w2.inside(e.position) == ext_b for e in gb)
        if a_side:
            while i < step_a:
                q = from_a(pa[i])
                i += 1
                if q is not None and not emit(q):
                    return _finish(sys, seq_b, out, cells, result, c)
        if b_side:
            while j < step_b:
                q = from_b(pb[j])
                j += 1
                if q is not None and not emit(q):
                    return _finish(sys, seq_b, out, cells, result, c)
        if a_side and b_side and step_a > 0:
            # a duple straddling the window: place it once, from the interior sequence
            if not emit(pa[step_a - 1]):
                return _finish(sys, seq_b, out, cells, result, c)
            i = max(i, step_a)
            j = max(j, step_b)
            continue
        # seed groups (step 0) are already present
    while i < len(pa) or j < len(pb):
        if i < len(pa):
            q = from_a(pa[i])
            i += 1
            if q is not None and not emit(q):
                break
        if j < len(pb):
            q = from_b(pb[j])
            j += 1
            if q is not None and not emit(q):
                break
    return _finish(sys, seq_b, out, cells, result, c)


def _finish(sys, seq_b, out, cells, result, c) -> SpliceResult:
    seq = AssemblySequence(sys, out, seq_b.seed, False, dict(cells))
    if result is not None:
        return SpliceResult(seq, "collision", result[1], c)
    return SpliceResult(seq, "complete", None, c)


# -- pumping ----------------------------------------------------------------------

@dataclass
class PumpResult:
    witness: tuple[int, int] | None       # path indices with the same tile type
    sequence: AssemblySequence | None
    repeats: int = 0
    valid: bool = False
    escaped: bool | None = None
    first_invalid: int | None = None
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.witness is not None


def pump_path(sys: TileSystem, seq: AssemblySequence, path_cells: list[Pos], *,
              repeats: int = 1, target: Iterable[Pos] | None = None,
              stop: Callable[[Placement], bool] | None = None, max_repeats: int = 1000) -> PumpResult:
    """Repeat (``repeats > 0``) or skip (``repeats == -1``) a path segment between two tiles
    of the same type.

    ``path_cells`` lists a simple single-tile-wide path in growth order. With ``stop`` the
    segment is repeated up to ``max_repeats`` times and the sequence is cut right after
    the first placement for which ``stop`` holds. The result is replayed through the engine.
    """
    cells = seq.result.cells
    first = seq.first_index()
    names = [cells.get(p) for p in path_cells]
    if any(n is None for n in names):
        raise ValueError("path leaves the assembly")
    if len(set(path_cells)) != len(path_cells):
        raise ValueError("path is not simple")
    owner = [first[p] for p in path_cells]
    witness = None
    for jj in range(1, len(path_cells)):
        for ii in range(jj):
            if names[ii] != names[jj]:
                continue
            # segment boundaries must fall between placements
            if owner[ii] == owner[ii + 1] or (jj + 1 < len(path_cells) and owner[jj] == owner[jj + 1]):
                continue
            witness = (ii, jj)
            break
        if witness:
            break
    if witness is None:
        return PumpResult(None, None, detail="no repeated tile type along the path")
    ii, jj = witness
    v = (path_cells[jj][0] - path_cells[ii][0], path_cells[jj][1] - path_cells[ii][1])
    seg_ids = sorted({owner[k] for k in range(ii + 1, jj + 1)})
    tail_ids = sorted({owner[k] for k in range(jj + 1, len(path_cells))})
    cut = owner[jj]
    placements = list(seq.placements)
    # skipping drops the segment itself from the prefix
    dropped = set(seg_ids) if repeats == -1 else set()
    prefix = [p for k, p in enumerate(placements, 1) if k <= cut and k not in dropped]
    later = [p for k, p in enumerate(placements, 1) if k > cut and k not in tail_ids]
    segment = [placements[k - 1] for k in seg_ids]
    tail = [placements[k - 1] for k in tail_ids]
    out: list[Placement] = []
    state = dict(seq.seed.cells)
    res = PumpResult(witness, None)

    def push(p: Placement) -> bool:
        if not sys.is_legal(state, p):
            res.first_invalid = len(out)
            return False
        p = p.with_pid(len(out) + 1)
        out.append(p)
        for q, n in zip(p.cells, p.types):
            state[q] = n
        return True

    ok = all(push(p) for p in prefix)
    stopped = False
    if repeats == -1:
        # skip: drop the segment, pull the tail back
        k_used = -1
        body = [p.translated((-v[0], -v[1])) for p in tail]
    else:
        k_used = 0
        body = []
        limit = max_repeats if stop is not None else repeats
        while ok and k_used < limit and not stopped:
            k_used += 1
            for p in segment:
                q = p.translated((v[0] * k_used, v[1] * k_used))
                if not push(q):
                    ok = False
                    break
                if stop is not None and stop(q):
                    stopped = True
                    break
        body = [] if stopped or stop is not None else [p.translated((v[0] * k_used, v[1] * k_used)) for p in tail]
    if ok and not stopped:
        for p in body + (later if stop is None else []):
            if not push(p):
                ok = False
                break
    res.sequence = AssemblySequence(sys, out, seq.seed, False, dict(state))
    res.repeats = k_used
    res.valid = ok
    if stop is not None:
        res.valid = ok and stopped
        res.detail = "stop condition reached" if stopped else "stop condition never reached"
    if target is not None:
        X = set(target)
        res.escaped = any(c not in X for c in state)
    return res


# -- crash analysis ---------------------------------------------------------------

def separated(cells: Iterable[Pos], group_a: Iterable[Pos], group_b: Iterable[Pos], margin: int = 2) -> bool:
    """True when no path of free cells joins ``group_a`` to ``group_b``.

    Cells of the two groups count as free even if occupied. The search is confined to the
    bounding box of everything involved, grown by ``margin`` (so paths may go around).
    """
    occ = set(cells)
    ga, gb = set(group_a), set(group_b)
    pts = occ | ga | gb
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    x0, x1, y0, y1 = min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin
    g = nx.grid_2d_graph(range(x0, x1 + 1), range(y0, y1 + 1))
    g.remove_nodes_from([c for c in occ if c not in ga and c not in gb])
    comp_a = set()
    for c in ga:
        comp_a |= nx.node_connected_component(g, c)
    return not (comp_a & gb)


def finger_windows(x0: int, width: int, bottom: int, tops: Iterable[int]) -> list[Window]:
    """Closed rectangles sharing a bottom row whose top edges cut a vertical finger.

    Each member is ``transform_window`` applied to the one-row base rectangle at ``bottom``,
    so window ``t`` covers rows ``bottom..t`` and its top edge lies between ``t`` and ``t+1``.
    """
    base = Window.rect(x0, bottom, width, 1)
    return [transform_window(base, t - bottom + 1, (0, t - bottom)) for t in tops]


@dataclass
class CrashOutcome:
    kind: str                     # "fuzz" | "collision" | "neither"
    splice: SpliceResult
    pair: tuple[Window, Window]
    detail: str = ""


def classify_crash(res: SpliceResult, pair: tuple[Window, Window], planter_bottom: int, m: int,
                   inner: Iterable[Pos], outer: Iterable[Pos]) -> CrashOutcome:
    """Sort a spliced finger into the two cases of the crash argument.

    ``"fuzz"``: the splice completed and placed a tile more than ``2m`` rows below the
    planter, which plus-mode fuzz cannot excuse. ``"collision"``: the splice stopped on an
    occupied cell and the partial assembly walls off ``inner`` (e.g. the cells of S1..S5)
    from ``outer`` (the cell of S8).
    """
    cells = res.assembly.cells
    if res.status == "complete":
        low = min(y for _, y in cells)
        if low < planter_bottom - 2 * m:
            return CrashOutcome("fuzz", res, pair, f"tile at row {low}, planter bottom {planter_bottom}")
        return CrashOutcome("neither", res, pair, "complete splice stays within fuzz range")
    if separated(cells, inner, outer):
        return CrashOutcome("collision", res, pair, f"blocked at {res.collision.cells}")
    return CrashOutcome("neither", res, pair, "collision leaves the regions connected")


# -- row duplings -----------------------------------------------------------------

@dataclass(frozen=True)
class OrderedDupling:
    """Footprints (offset cells relative to the row's leftmost occupied cell) and tile
    types of the placements meeting a row, in placement order."""

    row: int
    origin: Pos
    entries: tuple[tuple[tuple[Pos, ...], tuple[str, ...]], ...]

    def equivalent(self, other: "OrderedDupling") -> bool:
        return self.entries == other.entries

    def __len__(self):
        return len(self.entries)


def row_dupling_signature(seq: AssemblySequence, row: int) -> OrderedDupling:
    steps = [(0, Placement((c,), (n,))) for c, n in sorted(seq.seed.cells.items())]
    steps += list(enumerate(seq.placements, 1))
    hits = [(k, p) for k, p in steps if any(y == row for _, y in p.cells)]
    if not hits:
        raise ValueError(f"row {row} is empty")
    x0 = min(x for _, p in hits for x, y in p.cells if y == row)
    entries = tuple((tuple((x - x0, y - row) for x, y in p.cells), tuple(p.types)) for _, p in hits)
    return OrderedDupling(row, (x0, row), entries)


def find_equivalent_rows(seq: AssemblySequence, rows: Iterable[int]) -> tuple[int, int] | None:
    seen: dict = {}
    for r in rows:
        try:
            s = row_dupling_signature(seq, r)
        except ValueError:
            continue
        if s.entries in seen:
            return seen[s.entries], r
        seen[s.entries] = r
    return None


@dataclass
class RepeatResult:
    sequence: AssemblySequence
    periods: int
    valid: bool
    first_invalid: int | None = None


def repeat_rows(sys: TileSystem, seq: AssemblySequence, r1: int, r2: int, periods: int) -> RepeatResult:
    """Grow everything below row ``r2`` as in ``seq``, then replay the placements of rows
    ``r1 .. r2-1`` shifted up by whole periods, validating every step."""
    if r2 <= r1:
        raise ValueError("need r1 < r2")
    dy = r2 - r1
    base = [p for p in seq.placements if min(y for _, y in p.cells) < r2]
    block = [p for p in seq.placements if r1 <= min(y for _, y in p.cells) < r2]
    state = dict(seq.seed.cells)
    out: list[Placement] = []
    todo = base + [p.translated((0, dy * k)) for k in range(1, periods + 1) for p in block]
    for p in todo:
        if not sys.is_legal(state, p):
            return RepeatResult(AssemblySequence(sys, out, seq.seed, False, state), periods, False, len(out))
        p = p.with_pid(len(out) + 1)
        out.append(p)
        for q, n in zip(p.cells, p.types):
            state[q] = n
    return RepeatResult(AssemblySequence(sys, out, seq.seed, False, state), periods, True)


def window_family(seq: AssemblySequence, rng, rects: int = 3, spread: int = 2) -> list[Window]:
    """Every vertical and horizontal line cutting the result, plus ``rects`` random small
    rectangles each translated over a ``(2*spread+1)^2`` neighbourhood."""
    cells = seq.result.cells
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    fam = [Window.vline(k) for k in range(min(xs) + 1, max(xs) + 1)]
    fam += [Window.hline(k) for k in range(min(ys) + 1, max(ys) + 1)]
    for _ in range(rects):
        base = Window.rect(rng.randint(min(xs), max(xs)), rng.randint(min(ys), max(ys)),
                           rng.randint(1, 4), rng.randint(1, 4))
        fam += [base.translated((dx, dy)) for dx in range(-spread, spread + 1)
                for dy in range(-spread, spread + 1)]
    return fam


def splice_trials(systems: int = 200, seed: int = 2024, max_types: int = 12, max_cells: int = 300,
                  pairs_per_system: int | None = 50, on_system: Callable[[int, dict], None] | None = None) -> dict:
    """Splice matched window pairs in random small systems and count the outcomes.

    Each system is run for at most ``(max_cells - 1) // 2`` steps, so results stay within
    ``max_cells`` even if every step is a duple. ``pairs_per_system`` caps how many reported
    pairs are tried per system (a seeded random sample); ``None`` tries all of them, in
    both directions. ``invalid`` counts splices with a step failing frontier validation.
    """
    from .gallery import random_small_system

    rng = random.Random(seed)
    stats = dict(systems=0, reported=0, tried=0, complete=0, collision=0, steps=0, invalid=0,
                 precondition=0)
    while stats["systems"] < systems:
        sys = random_small_system(rng, max_types)
        seq = run(sys, Random(rng.randrange(10**6)), max_steps=(max_cells - 1) // 2)
        if len(seq) < 4:
            continue
        stats["systems"] += 1
        fam = window_family(seq, rng, rects=3, spread=1)
        pairs = [(a, b) for i, j, _ in find_matching_windows(seq, fam) for a, b in ((i, j), (j, i))]
        stats["reported"] += len(pairs)
        if pairs_per_system is not None and len(pairs) > pairs_per_system:
            pairs = rng.sample(pairs, pairs_per_system)
        for a, b in pairs:
            stats["tried"] += 1
            try:
                res = splice(seq, seq, fam[a], fam[b])
            except SplicePreconditionError:
                stats["precondition"] += 1
                continue
            except SpliceInvalidError:
                stats["invalid"] += 1
                continue
            stats[res.status] += 1
            stats["steps"] += len(res.sequence)
            if res.sequence.validate() is not None:
                stats["invalid"] += 1
        if on_system is not None:
            on_system(stats["systems"], stats)
    return stats


def finger_crash_trial(sys: TileSystem, seed: int) -> CrashOutcome | None:
    """One seeded crash trial on ``gallery.make_finger_candidate``.

    Grows the candidate with a random schedule, cuts the sequence just before the finger
    comes within one empty row of the planter, picks a random pair of matched windows
    across the finger at least the planter distance apart, splices the upper window's
    interior onto the lower one and classifies the result. ``None`` if no pair matched.
    """
    from .gallery import pin_finger_end

    g = sys.metadata["geometry"]
    rng = random.Random(seed)
    seq = run(sys, Random(seed), choose=pin_finger_end(sys, rng=rng))
    cut = seq.first_index()[(g.finger_x, g.gap_y + 1)] - 1
    beta = AssemblySequence(sys, seq.placements[:cut], seq.seed)
    tip = g.gap_y + 2
    fam = finger_windows(g.finger_x, 1, g.gap_y, range(tip, g.arm_y - 1))
    pairs = [(i, j) for i, j, _ in find_matching_windows(beta, fam)
             if fam[j].top - fam[i].top >= tip - g.planter_y]
    if not pairs:
        return None
    i, j = rng.choice(pairs)
    lo, hi = sorted((fam[i], fam[j]), key=lambda w: w.top)
    res = splice(beta, beta, hi, lo)
    return classify_crash(res, (hi, lo), g.planter_y, 1, g.line[:5], g.line[7:])
