"""Tiles, duples, tile systems, assemblies and the stability/attachment rules."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import networkx as nx

Pos = tuple[int, int]


class ModelError(ValueError):
    pass


class OccupiedCellError(ModelError):
    pass


class InvalidScaleError(ModelError):
    pass


@dataclass(frozen=True, order=True)
class Glue:
    label: str = ""
    strength: int = 0

    def __post_init__(self):
        if self.strength < 0:
            raise ModelError(f"negative glue strength {self.strength}")

    @property
    def is_null(self) -> bool:
        return self.strength == 0 and self.label == ""


NULL = Glue()


def glues_interact(g1: Glue, g2: Glue) -> bool:
    return g1.strength > 0 and g1 == g2


class Direction(enum.Enum):
    N = (0, 1)
    E = (1, 0)
    S = (0, -1)
    W = (-1, 0)

    @property
    def vector(self) -> Pos:
        return self.value

    @property
    def opposite(self) -> "Direction":
        return _OPP[self]

    def __neg__(self) -> "Direction":
        return _OPP[self]

    def step(self, p: Pos, k: int = 1) -> Pos:
        return (p[0] + k * self.value[0], p[1] + k * self.value[1])

    @classmethod
    def from_vector(cls, v: Pos) -> "Direction":
        return _BY_VEC[tuple(v)]


_OPP = {Direction.N: Direction.S, Direction.S: Direction.N,
        Direction.E: Direction.W, Direction.W: Direction.E}
_BY_VEC = {d.value: d for d in Direction}
DIRS = (Direction.N, Direction.E, Direction.S, Direction.W)
# index of each direction in TileType.glues
_IDX = {Direction.N: 0, Direction.E: 1, Direction.S: 2, Direction.W: 3}


@dataclass(frozen=True)
class TileType:
    name: str
    n: Glue = NULL
    e: Glue = NULL
    s: Glue = NULL
    w: Glue = NULL

    def glue(self, d: Direction) -> Glue:
        return (self.n, self.e, self.s, self.w)[_IDX[d]]

    def with_glue(self, d: Direction, g: Glue) -> "TileType":
        key = "nesw"[_IDX[d]]
        return TileType(**{**self.__dict__, key: g})

    def renamed(self, name: str) -> "TileType":
        return TileType(name, self.n, self.e, self.s, self.w)


@dataclass(frozen=True, order=True)
class DupleType:
    """Two tile types pre-joined; ``b`` sits east of ``a`` (EW) or north of ``a`` (NS)."""

    a: str
    b: str
    axis: str

    def __post_init__(self):
        if self.axis not in ("EW", "NS"):
            raise ModelError(f"bad duple axis {self.axis!r}")

    @property
    def offset(self) -> Pos:
        return (1, 0) if self.axis == "EW" else (0, 1)

    @property
    def a_side(self) -> Direction:
        """Side of ``a`` that faces ``b``."""
        return Direction.E if self.axis == "EW" else Direction.N


@dataclass(frozen=True, order=True)
class Placement:
    """One attachment: a singleton (one cell) or a duple (cells ordered a, b)."""

    cells: tuple[Pos, ...]
    types: tuple[str, ...]
    pid: int = field(default=-1, compare=False)

    @property
    def kind(self) -> str:
        return "singleton" if len(self.cells) == 1 else "duple"

    def with_pid(self, pid: int) -> "Placement":
        return Placement(self.cells, self.types, pid)

    def translated(self, c: Pos) -> "Placement":
        return Placement(tuple((x + c[0], y + c[1]) for x, y in self.cells), self.types, self.pid)


class TileSystem:
    """A DTAS (T, S, D, seed, tau). Pure aTAM systems have no duples and S = T."""

    def __init__(self, tiles: Iterable[TileType], seed: Mapping[Pos, str], temperature: int,
                 singletons: Iterable[str] | None = None, duples: Iterable[DupleType] = (),
                 name: str = "", check_seed: bool = True, metadata: Mapping | None = None):
        self.tiles: dict[str, TileType] = {}
        for t in tiles:
            if t.name in self.tiles:
                raise ModelError(f"duplicate tile name {t.name!r}")
            self.tiles[t.name] = t
        if temperature < 1:
            raise ModelError("temperature must be positive")
        self.temperature = temperature
        self.singletons = frozenset(self.tiles if singletons is None else singletons)
        self.duples = tuple(sorted(set(duples)))
        self.seed = dict(sorted(seed.items()))
        self.name = name
        self.metadata = dict(metadata or {})
        for s in self.singletons:
            if s not in self.tiles:
                raise ModelError(f"singleton {s!r} is not a tile type")
        for d in self.duples:
            for n in (d.a, d.b):
                if n not in self.tiles:
                    raise ModelError(f"duple half {n!r} is not a tile type")
            ga = self.tiles[d.a].glue(d.a_side)
            gb = self.tiles[d.b].glue(-d.a_side)
            if ga != gb or ga.strength < temperature:
                raise ModelError(f"duple {d} internal glue must match with strength >= {temperature}")
        for p, n in self.seed.items():
            if n not in self.tiles:
                raise ModelError(f"seed tile {n!r} at {p} is not a tile type")
        if not self.seed:
            raise ModelError("seed must be non-empty")
        if check_seed and len(self.seed) > 1:
            a = Assembly(self.seed)
            if not a.is_connected() or not is_tau_stable(self, a):
                raise ModelError("seed must be connected and tau-stable")
        self._build_index()

    def _build_index(self):
        single: dict[tuple[Direction, Glue], list[str]] = {}
        for n in sorted(self.singletons):
            t = self.tiles[n]
            for d in DIRS:
                g = t.glue(d)
                if g.strength > 0:
                    single.setdefault((d, g), []).append(n)
        self._single = {k: tuple(v) for k, v in single.items()}
        dup: dict[tuple[Direction, Glue], list[tuple[int, int]]] = {}
        for i, D in enumerate(self.duples):
            for half, name in ((0, D.a), (1, D.b)):
                internal = D.a_side if half == 0 else -D.a_side
                t = self.tiles[name]
                for d in DIRS:
                    g = t.glue(d)
                    if d is not internal and g.strength > 0:
                        dup.setdefault((d, g), []).append((i, half))
        self._duple = {k: tuple(v) for k, v in dup.items()}

    @property
    def is_atam(self) -> bool:
        return not self.duples

    def __repr__(self):
        return (f"TileSystem({self.name or 'anon'}: {len(self.tiles)} types, "
                f"{len(self.singletons)} singletons, {len(self.duples)} duples, tau={self.temperature})")

    def tile_complexity(self) -> int:
        return len(self.singletons) + len(self.duples)

    def seed_assembly(self) -> "Assembly":
        return Assembly(self.seed)

    # -- attachment ---------------------------------------------------------
    def _bind(self, cells: Mapping[Pos, str], p: Pos, t: TileType, skip: Direction | None = None) -> int:
        total = 0
        tiles = self.tiles
        for d in DIRS:
            if d is skip:
                continue
            v = d.value
            q = (p[0] + v[0], p[1] + v[1])
            nb = cells.get(q)
            if nb is None:
                continue
            g = t.glue(d)
            if g.strength > 0 and g == tiles[nb].glue(-d):
                total += g.strength
        return total

    def placement_strength(self, cells: Mapping[Pos, str], p: Placement) -> int:
        if len(p.cells) == 1:
            return self._bind(cells, p.cells[0], self.tiles[p.types[0]])
        (ca, cb), (na, nb) = p.cells, p.types
        side = Direction.from_vector((cb[0] - ca[0], cb[1] - ca[1]))
        return (self._bind(cells, ca, self.tiles[na], skip=side)
                + self._bind(cells, cb, self.tiles[nb], skip=-side))

    def placements_at(self, cells: Mapping[Pos, str], c: Pos) -> set[Placement]:
        """All stable placements that use the empty cell ``c``."""
        out: set[Placement] = set()
        tau = self.temperature
        tiles = self.tiles
        single_cands: set[str] = set()
        duple_cands: set[tuple[int, int]] = set()
        for d in DIRS:
            v = d.value
            q = (c[0] + v[0], c[1] + v[1])
            nb = cells.get(q)
            if nb is None:
                continue
            g = tiles[nb].glue(-d)
            if g.strength == 0:
                continue
            single_cands.update(self._single.get((d, g), ()))
            duple_cands.update(self._duple.get((d, g), ()))
        for n in single_cands:
            if self._bind(cells, c, tiles[n]) >= tau:
                out.add(Placement((c,), (n,)))
        for i, half in duple_cands:
            D = self.duples[i]
            off = D.offset
            if half == 0:
                ca, cb = c, (c[0] + off[0], c[1] + off[1])
            else:
                ca, cb = (c[0] - off[0], c[1] - off[1]), c
            if (cb if half == 0 else ca) in cells:
                continue
            p = Placement((ca, cb), (D.a, D.b))
            if self.placement_strength(cells, p) >= tau:
                out.add(p)
        return out

    def is_legal(self, cells: Mapping[Pos, str], p: Placement) -> bool:
        """Frontier membership test for a single placement."""
        if any(c in cells for c in p.cells):
            return False
        if len(p.cells) == 1:
            if p.types[0] not in self.singletons:
                return False
        else:
            (ca, cb), (na, nb) = p.cells, p.types
            off = (cb[0] - ca[0], cb[1] - ca[1])
            axis = {(1, 0): "EW", (0, 1): "NS"}.get(off)
            if axis is None or DupleType(na, nb, axis) not in self._duple_set:
                return False
        return self.placement_strength(cells, p) >= self.temperature

    @property
    def _duple_set(self):
        s = self.__dict__.get("_dset")
        if s is None:
            s = self.__dict__["_dset"] = frozenset(self.duples)
        return s


class Assembly:
    """Finite partial map position -> tile name, with placement provenance ids.

    Treated as immutable; ``with_placement`` returns a new assembly.
    """

    __slots__ = ("cells", "pids")

    def __init__(self, cells: Mapping[Pos, str] | None = None, pids: Mapping[Pos, int] | None = None):
        self.cells: dict[Pos, str] = dict(cells or {})
        self.pids: dict[Pos, int] = dict(pids) if pids is not None else {p: 0 for p in self.cells}

    def __len__(self):
        return len(self.cells)

    def __contains__(self, p):
        return p in self.cells

    def __iter__(self) -> Iterator[Pos]:
        return iter(self.cells)

    def __getitem__(self, p: Pos) -> str:
        return self.cells[p]

    def get(self, p: Pos, default=None):
        return self.cells.get(p, default)

    def __eq__(self, other):
        return isinstance(other, Assembly) and self.cells == other.cells

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Assembly({len(self.cells)} cells)"

    def key(self) -> tuple[tuple[Pos, str], ...]:
        return tuple(sorted(self.cells.items()))

    @property
    def domain(self) -> frozenset[Pos]:
        return frozenset(self.cells)

    def with_placement(self, p: Placement) -> "Assembly":
        for c in p.cells:
            if c in self.cells:
                raise OccupiedCellError(f"cell {c} already occupied")
        cells = dict(self.cells)
        pids = dict(self.pids)
        for c, n in zip(p.cells, p.types):
            cells[c] = n
            pids[c] = p.pid
        return Assembly(cells, pids)

    def translated(self, c: Pos) -> "Assembly":
        return Assembly({(x + c[0], y + c[1]): n for (x, y), n in self.cells.items()},
                        {(x + c[0], y + c[1]): i for (x, y), i in self.pids.items()})

    def bbox(self) -> tuple[int, int, int, int]:
        xs = [p[0] for p in self.cells]
        ys = [p[1] for p in self.cells]
        return min(xs), min(ys), max(xs), max(ys)

    def is_connected(self) -> bool:
        if not self.cells:
            return False
        start = next(iter(self.cells))
        seen = {start}
        stack = [start]
        while stack:
            x, y = stack.pop()
            for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if q in self.cells and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(self.cells)

    def bond_graph(self, sys: TileSystem) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.cells)
        for (x, y), n in self.cells.items():
            t = sys.tiles[n]
            for d in (Direction.E, Direction.N):
                q = d.step((x, y))
                m = self.cells.get(q)
                if m is None:
                    continue
                ga = t.glue(d)
                if glues_interact(ga, sys.tiles[m].glue(-d)):
                    g.add_edge((x, y), q, weight=ga.strength)
        return g


def binding_strength(sys: TileSystem, asm: Assembly, p: Placement) -> int:
    for c in p.cells:
        if c in asm.cells:
            raise OccupiedCellError(f"cell {c} already occupied")
    return sys.placement_strength(asm.cells, p)


def is_tau_stable(sys: TileSystem, asm: Assembly, tau: int | None = None) -> bool:
    tau = sys.temperature if tau is None else tau
    if len(asm) <= 1:
        return True
    g = asm.bond_graph(sys)
    if not nx.is_connected(g):
        return False
    cut, _ = nx.stoer_wagner(g)
    return cut >= tau


def frontier(sys: TileSystem, asm: Assembly | Mapping[Pos, str]) -> list[Placement]:
    cells = asm.cells if isinstance(asm, Assembly) else asm
    out: set[Placement] = set()
    for c in boundary_cells(cells):
        out |= sys.placements_at(cells, c)
    return sorted(out)


def boundary_cells(cells: Mapping[Pos, str]) -> set[Pos]:
    out = set()
    for x, y in cells:
        for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if q not in cells:
                out.add(q)
    return out


def subassembly(a: Assembly, b: Assembly) -> bool:
    bc = b.cells
    return all(bc.get(p) == n for p, n in a.cells.items())


def scale_shape(shape: Iterable[Pos], c: int) -> frozenset[Pos]:
    if c < 1:
        raise InvalidScaleError(f"scale must be >= 1, got {c}")
    out = set()
    for x, y in shape:
        for i in range(c):
            for j in range(c):
                out.add((x * c + i, y * c + j))
    return frozenset(out)


def rectangle(w: int, h: int, origin: Pos = (0, 0)) -> frozenset[Pos]:
    return frozenset((origin[0] + i, origin[1] + j) for i in range(w) for j in range(h))
