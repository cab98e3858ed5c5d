"""Brute-force reference semantics, written without the package's attachment code.

Used as an independent oracle: every empty cell and every ordered neighbouring cell pair
is tried against every singleton and duple type, and glues are summed edge by edge.
"""
from __future__ import annotations

from collections import deque

VEC = {"n": (0, 1), "e": (1, 0), "s": (0, -1), "w": (-1, 0)}
OPP = {"n": "s", "s": "n", "e": "w", "w": "e"}


def glue(system, name, side):
    g = getattr(system.tiles[name], side)
    return g.label, g.strength


def edge_strength(system, name, side, other):
    la, sa = glue(system, name, side)
    lb, sb = glue(system, other, OPP[side])
    return sa if sa > 0 and (la, sa) == (lb, sb) else 0


def bind(system, cells, placed):
    """Total strength between the cells in ``placed`` (dict) and ``cells``."""
    total = 0
    for (x, y), name in placed.items():
        for side, (dx, dy) in VEC.items():
            q = (x + dx, y + dy)
            if q in cells and q not in placed:
                total += edge_strength(system, name, side, cells[q])
    return total


def frontier(system, cells):
    """Set of (cells tuple, types tuple) attachable to ``cells``."""
    empty = set()
    for x, y in cells:
        for dx, dy in VEC.values():
            q = (x + dx, y + dy)
            if q not in cells:
                empty.add(q)
    out = set()
    for c in empty:
        for t in system.singletons:
            if bind(system, cells, {c: t}) >= system.temperature:
                out.add(((c,), (t,)))
        for d in system.duples:
            dx, dy = (1, 0) if d.axis == "EW" else (0, 1)
            for a in (c, (c[0] - dx, c[1] - dy)):
                b = (a[0] + dx, a[1] + dy)
                if a in cells or b in cells:
                    continue
                if bind(system, cells, {a: d.a, b: d.b}) >= system.temperature:
                    out.add(((a, b), (d.a, d.b)))
    return out


def producibles(system, max_states=20000):
    """(set of frozen assemblies, set of terminal ones, truncated)."""
    start = frozenset(system.seed.items())
    seen = {start}
    terminal = set()
    queue = deque([start])
    truncated = False
    while queue:
        a = queue.popleft()
        cells = dict(a)
        fr = frontier(system, cells)
        if not fr:
            terminal.add(a)
        for cs, ts in fr:
            b = frozenset({**cells, **dict(zip(cs, ts))}.items())
            if b not in seen:
                if len(seen) >= max_states:
                    truncated = True
                    continue
                seen.add(b)
                queue.append(b)
    return seen, terminal, truncated
