"""Assembly sequences, scheduling policies and bounded exhaustive enumeration."""
from __future__ import annotations

import collections
import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .model import Assembly, Placement, Pos, ModelError, TileSystem, frontier


class IllegalStepError(ModelError):
    pass


@dataclass(frozen=True)
class Random:
    seed: int = 0


@dataclass(frozen=True)
class FairFIFO:
    pass


@dataclass(frozen=True)
class LexMin:
    pass


Policy = Random | FairFIFO | LexMin


def parse_policy(name: str, seed: int = 0) -> Policy:
    name = name.lower()
    if name == "random":
        return Random(seed)
    if name in ("fifo", "fairfifo"):
        return FairFIFO()
    if name in ("lex", "lexmin"):
        return LexMin()
    raise ValueError(f"unknown policy {name!r}")


def lex_key(p: Placement):
    cells = sorted((y, x) for x, y in p.cells)
    return (cells[0], p.types)


def step(sys: TileSystem, asm: Assembly, p: Placement) -> Assembly:
    if not sys.is_legal(asm.cells, p):
        raise IllegalStepError(f"placement {p} is not in the frontier")
    if p.pid < 0:
        p = p.with_pid(max(asm.pids.values(), default=0) + 1)
    return asm.with_placement(p)


def update_frontier(sys: TileSystem, cells: Mapping[Pos, str], fr: set[Placement],
                    placed: Iterable[Pos]) -> set[Placement]:
    """Frontier after ``placed`` cells were filled (``cells`` already contains them)."""
    placed = set(placed)
    out = {p for p in fr if placed.isdisjoint(p.cells)}
    touched = set()
    for x, y in placed:
        for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if q not in cells:
                touched.add(q)
    for c in touched:
        out |= sys.placements_at(cells, c)
    return out


@dataclass
class AssemblySequence:
    system: TileSystem
    placements: list[Placement]
    seed: Assembly
    terminal: bool = False
    final_cells: dict[Pos, str] | None = None

    def __len__(self):
        return len(self.placements)

    def snapshot(self, i: int | None = None) -> Assembly:
        """Assembly after the first ``i`` placements (all of them by default)."""
        i = len(self.placements) if i is None else i
        cells = dict(self.seed.cells)
        pids = dict(self.seed.pids)
        for p in self.placements[:i]:
            for c, n in zip(p.cells, p.types):
                cells[c] = n
                pids[c] = p.pid
        return Assembly(cells, pids)

    @property
    def result(self) -> Assembly:
        return self.snapshot()

    def first_index(self) -> dict[Pos, int]:
        """Step index at which each position was first filled (seed cells -> 0)."""
        out = {p: 0 for p in self.seed.cells}
        for i, p in enumerate(self.placements, 1):
            for c in p.cells:
                out[c] = i
        return out

    def validate(self) -> int | None:
        """Replay through the engine; index of the first illegal step or None."""
        cells = dict(self.seed.cells)
        for i, p in enumerate(self.placements):
            if not self.system.is_legal(cells, p):
                return i
            for c, n in zip(p.cells, p.types):
                cells[c] = n
        return None


def run(sys: TileSystem, policy: Policy = LexMin(), max_steps: int = 10**7,
        on_step: Callable[[int, Placement, dict], None] | None = None,
        choose: Callable[[list[Placement], dict], Placement | None] | None = None) -> AssemblySequence:
    """Grow from the seed until terminal or ``max_steps``.

    ``choose(options, cells)`` may override the policy: it receives the sorted frontier and
    returns the placement to make, ``None`` to defer to the policy, or raises StopIteration
    to end the run early (the sequence is then not terminal).
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    seed = sys.seed_assembly()
    cells = dict(seed.cells)
    fr = set(frontier(sys, cells))
    rng = random.Random(policy.seed) if isinstance(policy, Random) else None
    queue: collections.deque[Placement] = collections.deque()
    if isinstance(policy, FairFIFO):
        queue.extend(sorted(fr))
    placements: list[Placement] = []
    while fr and len(placements) < max_steps:
        p = None
        if choose is not None:
            try:
                p = choose(sorted(fr), cells)
            except StopIteration:
                break
            if p is not None and p not in fr:
                raise IllegalStepError(f"chooser picked {p}, which is not in the frontier")
        if p is not None:
            pass
        elif rng is not None:
            p = rng.choice(sorted(fr))
        elif isinstance(policy, FairFIFO):
            while True:
                p = queue.popleft()
                if p in fr:
                    break
        else:
            p = min(fr, key=lex_key)
        p = p.with_pid(len(placements) + 1)
        placements.append(p)
        for c, n in zip(p.cells, p.types):
            cells[c] = n
        new = update_frontier(sys, cells, fr, p.cells)
        if isinstance(policy, FairFIFO):
            queue.extend(sorted(new - fr))
        fr = new
        if on_step is not None:
            on_step(len(placements), p, cells)
    return AssemblySequence(sys, placements, seed, terminal=not fr, final_cells=cells)


def is_terminal(sys: TileSystem, asm: Assembly) -> bool:
    return not frontier(sys, asm)


# -- enumeration ---------------------------------------------------------------

_MASK = (1 << 128) - 1


class _Zobrist:
    """128-bit fingerprint of a configuration: sum of per-(position, tile) hashes."""

    def __init__(self):
        self._cache: dict[tuple[Pos, str], int] = {}

    def __call__(self, p: Pos, n: str) -> int:
        k = (p, n)
        h = self._cache.get(k)
        if h is None:
            h = int.from_bytes(hashlib.blake2b(repr(k).encode(), digest_size=16).digest(), "big")
            self._cache[k] = h
        return h

    def of(self, cells: Mapping[Pos, str]) -> int:
        return sum(self(p, n) for p, n in cells.items()) & _MASK


@dataclass
class ProducibleSet:
    system: TileSystem
    parent: list[int]
    via: list[Placement | None]
    sizes: list[int]
    terminal: list[bool]
    edges: list[tuple[int, int]]
    truncated: bool
    keys: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.parent)

    def path(self, i: int) -> list[Placement]:
        out = []
        while i > 0:
            out.append(self.via[i])
            i = self.parent[i]
        return out[::-1]

    def assembly(self, i: int) -> Assembly:
        seq = AssemblySequence(self.system, self.path(i), self.system.seed_assembly())
        return seq.snapshot()

    def assemblies(self) -> list[Assembly]:
        return [self.assembly(i) for i in range(len(self))]

    def terminals(self) -> list[int]:
        return [i for i, t in enumerate(self.terminal) if t]


def enumerate_producibles(sys: TileSystem, max_cells: int = 10**6, max_states: int = 10**5,
                          visit: Callable[[int, int, Placement | None, dict[Pos, str]], object] | None = None
                          ) -> ProducibleSet:
    """Breadth-first closure of the seed under single attachments.

    States are deduplicated by configuration (positions and tile names; provenance
    ignored) through a 128-bit fingerprint. ``visit(index, parent, placement, cells)``
    is called once per new state.
    """
    if max_cells < 1 or max_states < 1:
        raise ValueError("bounds must be positive")
    z = _Zobrist()
    seed_cells = dict(sys.seed)
    k0 = z.of(seed_cells)
    index = {k0: 0}
    ps = ProducibleSet(sys, [-1], [None], [len(seed_cells)], [False], [], False, [k0])
    if visit is not None:
        visit(0, -1, None, seed_cells)
    queue = collections.deque([(0, seed_cells, set(frontier(sys, seed_cells)), k0)])
    truncated = False
    while queue:
        i, cells, fr, key = queue.popleft()
        if not fr:
            ps.terminal[i] = True
            continue
        if len(cells) >= max_cells:
            truncated = True
            continue
        for p in sorted(fr):
            k = key
            for c, n in zip(p.cells, p.types):
                k += z(c, n)
            k &= _MASK
            j = index.get(k)
            if j is None:
                if len(ps.parent) >= max_states:
                    truncated = True
                    continue
                j = len(ps.parent)
                index[k] = j
                child = dict(cells)
                for c, n in zip(p.cells, p.types):
                    child[c] = n
                ps.parent.append(i)
                ps.via.append(p)
                ps.sizes.append(len(child))
                ps.terminal.append(False)
                ps.keys.append(k)
                if visit is not None:
                    visit(j, i, p, child)
                queue.append((j, child, update_frontier(sys, child, fr, p.cells), k))
            ps.edges.append((i, j))
    ps.truncated = truncated
    return ps


# -- verdicts -------------------------------------------------------------------

@dataclass
class Verdict:
    status: str  # "yes" | "no" | "unknown"
    witness: object = None
    detail: str = ""

    def __bool__(self):
        return self.status == "yes"


@dataclass(frozen=True)
class Bounds:
    max_cells: int = 10**6
    max_states: int = 10**5


def strictly_self_assembles(sys: TileSystem, shape: Iterable[Pos], bounds: Bounds = Bounds()) -> Verdict:
    X = frozenset(shape)
    escaped: list[int] = []

    def visit(j, parent, p, cells):
        if p is not None and not escaped and any(c not in X for c in p.cells):
            escaped.append(j)
    seed_out = [p for p in sys.seed if p not in X]
    ps = enumerate_producibles(sys, bounds.max_cells, bounds.max_states, visit)
    if seed_out:
        return Verdict("no", ps.assembly(0), "seed leaves the shape")
    if escaped:
        return Verdict("no", ps.assembly(escaped[0]), "producible assembly leaves the shape")
    for i in ps.terminals():
        if ps.sizes[i] != len(X):
            return Verdict("no", ps.assembly(i), "terminal domain differs from the shape")
    if ps.truncated:
        return Verdict("unknown", None, "exploration truncated")
    return Verdict("yes", None, f"{len(ps)} producible assemblies checked")


def is_directed_bounded(sys: TileSystem, bounds: Bounds = Bounds()) -> Verdict:
    ps = enumerate_producibles(sys, bounds.max_cells, bounds.max_states)
    terms = ps.terminals()
    if len(terms) >= 2:
        return Verdict("no", (ps.assembly(terms[0]), ps.assembly(terms[1])), "two distinct terminal assemblies")
    if ps.truncated:
        return Verdict("unknown", None, "exploration truncated")
    return Verdict("yes", ps.assembly(terms[0]) if terms else None)
