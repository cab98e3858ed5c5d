"""Representation functions and bounded simulation checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .engine import Bounds, ProducibleSet, _Zobrist, enumerate_producibles
from .model import Assembly, Pos, TileSystem


@dataclass
class RepresentationFunction:
    """Block-wise map from simulator tiles to simulated tiles.

    A block maps to ``lookup[name]`` as soon as the tile at its ``center`` cell has a name in
    ``lookup``; otherwise it maps to empty. Block ``(bx, by)`` covers cells
    ``[bx*m, bx*m+m) x [by*m, by*m+m)``.
    """

    m: int
    lookup: dict[str, str]
    center: Pos = (0, 0)
    mode: str = "block"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("scale must be positive")
        if self.mode not in ("block", "plus"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def block_of(self, p: Pos) -> Pos:
        return (p[0] // self.m, p[1] // self.m)

    def center_of(self, block: Pos) -> Pos:
        return (block[0] * self.m + self.center[0], block[1] * self.m + self.center[1])

    def represent(self, cells: Mapping[Pos, str], block: Pos) -> str | None:
        n = cells.get(self.center_of(block))
        return None if n is None else self.lookup.get(n)


def identity_representation(names) -> RepresentationFunction:
    return RepresentationFunction(1, {n: n for n in names})


def occupied_blocks(R: RepresentationFunction, cells: Mapping[Pos, str]) -> set[Pos]:
    m = R.m
    return {(x // m, y // m) for x, y in cells}


def map_cells(R: RepresentationFunction, cells: Mapping[Pos, str]) -> dict[Pos, str]:
    out = {}
    for b in occupied_blocks(R, cells):
        t = R.represent(cells, b)
        if t is not None:
            out[b] = t
    return out


def map_assembly(R: RepresentationFunction, asm: Assembly | Mapping[Pos, str]) -> Assembly:
    cells = asm.cells if isinstance(asm, Assembly) else asm
    return Assembly(map_cells(R, cells))


# -- bounded simulation checks --------------------------------------------------------

@dataclass
class SimulationReport:
    check: str
    simulator_states: int = 0
    simulated_states: int = 0
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations and not self.truncated

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        state = "ok" if self.ok else ("FAIL" if self.violations else "inconclusive")
        if self.truncated:
            state += " (truncated)"
        return (f"{self.check}: {state} ({self.simulator_states} simulator states, "
                f"{self.simulated_states} simulated states, {len(self.violations)} violations)")


def fuzz_violations(R: RepresentationFunction, cells: Mapping[Pos, str]) -> list[str]:
    """Blocks holding tiles but mapping to empty must sit near a mapped block.

    Block mode allows only the four edge-adjacent blocks; plus mode allows any block within
    Manhattan distance 2.
    """
    mapped = map_cells(R, cells)
    reach = 1 if R.mode == "block" else 2
    out = []
    for b in sorted(occupied_blocks(R, cells) - set(mapped)):
        if not any(abs(b[0] - q[0]) + abs(b[1] - q[1]) <= reach for q in mapped):
            out.append(f"fuzz block {b} is more than {reach} block(s) from the mapped assembly")
    return out


def check_clean_mapping(R: RepresentationFunction, cells: Mapping[Pos, str]) -> list[str]:
    out = fuzz_violations(R, cells)
    if isinstance(R.lookup, dict):
        for b, n in map_cells(R, cells).items():
            if n is None:
                out.append(f"block {b} maps to an unknown tile")
    return out


def _producible_keys(system, bounds) -> tuple[dict[int, int], ProducibleSet]:
    ps = enumerate_producibles(system, bounds.max_cells, bounds.max_states)
    return {k: i for i, k in enumerate(ps.keys)}, ps


def _states(ps: ProducibleSet):
    """Yield (index, cells) over a producible set, reconstructing along the BFS tree."""
    children: dict[int, list[int]] = {}
    for j in range(1, len(ps)):
        children.setdefault(ps.parent[j], []).append(j)
    stack = [(0, dict(ps.system.seed))]
    while stack:
        i, cells = stack.pop()
        yield i, cells
        for j in children.get(i, ()):
            child = dict(cells)
            p = ps.via[j]
            for c, n in zip(p.cells, p.types):
                child[c] = n
            stack.append((j, child))


def _analyze(simulator, simulated, R, bounds):
    z = _Zobrist()
    src_index, src_ps = _producible_keys(simulated, bounds)
    sim_ps = enumerate_producibles(simulator, bounds.max_cells, bounds.max_states)
    mkeys = [0] * len(sim_ps)
    fuzz: list[str] = []
    for i, cells in _states(sim_ps):
        mkeys[i] = z.of(map_cells(R, cells))
        if len(fuzz) < 20:
            for v in check_clean_mapping(R, cells):
                fuzz.append(f"state {i}: {v}")
    return z, src_index, src_ps, sim_ps, mkeys, fuzz


def check_equivalent_productions(simulator: TileSystem, simulated: TileSystem,
                                 R: RepresentationFunction, bounds: Bounds = Bounds()) -> SimulationReport:
    """Bounded check that R maps producibles onto producibles and terminals onto terminals.

    Both systems are enumerated exhaustively (up to ``bounds``). Every simulator producible
    must map to a simulated producible with clean fuzz; every simulated producible must be
    the image of some simulator producible; terminal simulator assemblies must map to
    terminal simulated assemblies, and every simulated terminal must be hit.
    """
    z, src_index, src_ps, sim_ps, mkeys, fuzz = _analyze(simulator, simulated, R, bounds)
    rep = SimulationReport("equivalent_productions", len(sim_ps), len(src_ps),
                           truncated=sim_ps.truncated or src_ps.truncated)
    rep.violations += fuzz
    if R.mode == "plus":
        rep.warnings.append("plus-mode fuzz bound used (Manhattan distance 2)")
    hit = set()
    for i, k in enumerate(mkeys):
        j = src_index.get(k)
        if j is None:
            rep.violations.append(f"simulator state {i} maps to a non-producible assembly")
            continue
        hit.add(j)
        if sim_ps.terminal[i] and not src_ps.terminal[j]:
            rep.violations.append(f"terminal simulator state {i} maps to non-terminal state {j}")
    if rep.truncated:
        rep.warnings.append("exploration truncated; completeness checks skipped")
        return rep
    missing = set(range(len(src_ps))) - hit
    if missing:
        rep.violations.append(f"{len(missing)} simulated producibles are never represented "
                              f"(e.g. state {min(missing)})")
    for j in src_ps.terminals():
        if not any(sim_ps.terminal[i] and mkeys[i] == src_ps.keys[j] for i in range(len(sim_ps))):
            rep.violations.append(f"simulated terminal {j} is not the image of a simulator terminal")
    return rep


def check_dynamics(simulator: TileSystem, simulated: TileSystem, R: RepresentationFunction,
                   bounds: Bounds = Bounds()) -> SimulationReport:
    """Bounded check that the simulator follows and models the simulated system.

    Follows: every simulator step maps to no change or to one legal simulated step.
    Models: from every simulator state, every simulated step available from its image can
    still be realised by some descendant state that maps to the stepped assembly.
    """
    z, src_index, src_ps, sim_ps, mkeys, fuzz = _analyze(simulator, simulated, R, bounds)
    rep = SimulationReport("dynamics", len(sim_ps), len(src_ps),
                           truncated=sim_ps.truncated or src_ps.truncated)
    src_succ: dict[int, set[int]] = {}
    for a, b in src_ps.edges:
        src_succ.setdefault(a, set()).add(b)
    img = [src_index.get(k) for k in mkeys]
    for i, j in sim_ps.edges:
        a, b = img[i], img[j]
        if a is None or b is None:
            rep.violations.append(f"step {i}->{j} leaves the simulated producibles")
        elif a != b and b not in src_succ.get(a, ()):
            rep.violations.append(f"step {i}->{j} maps to {a}->{b}, which is not a single attachment")
    if rep.truncated:
        rep.warnings.append("exploration truncated; models check skipped")
        return rep
    # reachable images as bitsets, children before parents (edges increase the size)
    succ: dict[int, list[int]] = {}
    for i, j in sim_ps.edges:
        succ.setdefault(i, []).append(j)
    reach = [0] * len(sim_ps)
    for i in sorted(range(len(sim_ps)), key=lambda q: -sim_ps.sizes[q]):
        r = 0 if img[i] is None else 1 << img[i]
        for j in succ.get(i, ()):
            r |= reach[j]
        reach[i] = r
    for i in range(len(sim_ps)):
        a = img[i]
        if a is None:
            continue
        for b in src_succ.get(a, ()):
            if not reach[i] >> b & 1:
                rep.violations.append(f"simulator state {i} (image {a}) can no longer realise {a}->{b}")
                break
        if len(rep.violations) > 50:
            break
    return rep
