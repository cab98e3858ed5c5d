"""ASCII and SVG renderings of assemblies.

ASCII legend: ``.`` is an empty cell and ``@`` a seed cell. Singleton tiles get one symbol
per tile type (``#`` when there are more types than symbols). Duple halves use a letter
per duple type, uppercase for the first half and lowercase for the second.
"""
from __future__ import annotations

import colorsys
import hashlib
import string
from dataclasses import dataclass

from .model import DIRS, Assembly, Direction, Pos, TileSystem

SINGLETON_SYMBOLS = "0123456789+*=%&$!?~^<>/\\|:;"


def _duple_cells(asm: Assembly, sys: TileSystem | None) -> dict[Pos, tuple[int, bool]]:
    """Cells placed as part of a duple -> (duple index, is first half)."""
    by_pid: dict[int, list[Pos]] = {}
    for c, pid in asm.pids.items():
        if pid > 0:
            by_pid.setdefault(pid, []).append(c)
    index = {}
    if sys is not None:
        index = {(d.a, d.b): i for i, d in enumerate(sys.duples)}
    out = {}
    for cs in by_pid.values():
        if len(cs) != 2:
            continue
        a, b = sorted(cs)
        key = (asm.cells[a], asm.cells[b])
        out[a] = (index.get(key, len(index)), True)
        out[b] = (index.get(key, len(index)), False)
    return out


def ascii_symbols(asm: Assembly, sys: TileSystem | None = None) -> dict[Pos, str]:
    duples = _duple_cells(asm, sys)
    singles = sorted({n for c, n in asm.cells.items() if c not in duples})
    table = {n: SINGLETON_SYMBOLS[i] for i, n in enumerate(singles)} if len(singles) <= len(
        SINGLETON_SYMBOLS) else {}
    seed = sys.seed if sys is not None else {}
    out = {}
    for c, n in asm.cells.items():
        if seed.get(c) == n:
            out[c] = "@"
        elif c in duples:
            i, first = duples[c]
            ch = string.ascii_uppercase[i % 26]
            out[c] = ch if first else ch.lower()
        else:
            out[c] = table.get(n, "#")
    return out


def render_ascii(asm: Assembly, sys: TileSystem | None = None, legend: bool = False) -> str:
    """One character per cell, north at the top."""
    if not len(asm):
        return ""
    sym = ascii_symbols(asm, sys)
    x0, y0, x1, y1 = asm.bbox()
    rows = ["".join(sym.get((x, y), ".") for x in range(x0, x1 + 1)) for y in range(y1, y0 - 1, -1)]
    text = "\n".join(rows) + "\n"
    if legend:
        keys = sorted({(s, asm.cells[c]) for c, s in sym.items() if s not in "@#"})
        text += "\n" + "".join(f"{s} {n}\n" for s, n in keys)
    return text


# -- SVG -----------------------------------------------------------------------------

@dataclass(frozen=True)
class SvgOptions:
    cell: int = 12
    ticks: bool = True
    borders: bool = True
    labels: bool = False


def _color(key: str) -> str:
    h = int(hashlib.sha1(key.encode()).hexdigest()[:8], 16)
    r, g, b = colorsys.hls_to_rgb((h % 360) / 360, 0.72, 0.55)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def render_svg(asm: Assembly, sys: TileSystem | None = None, options: SvgOptions = SvgOptions()) -> str:
    """Deterministic SVG: one rect per cell, shared colour and no inner border for duples,
    glue strengths as ticks on the cell edges."""
    k = options.cell
    if not len(asm):
        return ('<svg xmlns="http://www.w3.org/2000/svg" width="0" height="0" viewBox="0 0 0 0">'
                "</svg>\n")
    x0, y0, x1, y1 = asm.bbox()
    W, H = (x1 - x0 + 1) * k, (y1 - y0 + 1) * k
    duples = _duple_cells(asm, sys)
    partner: dict[Pos, Pos] = {}
    for c, pid in asm.pids.items():
        if c in duples:
            for d in DIRS:
                q = d.step(c)
                if q in duples and asm.pids.get(q) == pid:
                    partner[c] = q

    def xy(c: Pos) -> tuple[int, int]:
        return (c[0] - x0) * k, (y1 - c[1]) * k

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">']
    out.append(f'<rect id="bg" x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>')
    lines, ticks = [], []
    for c in sorted(asm.cells, key=lambda p: (-p[1], p[0])):
        n = asm.cells[c]
        key = n
        if c in partner:
            first = c if duples[c][1] else partner[c]
            key = asm.cells[first] + "|" + asm.cells[partner[first]]
        px, py = xy(c)
        rect = f'<rect id="c{c[0]}_{c[1]}" x="{px}" y="{py}" width="{k}" height="{k}" fill="{_color(key)}"'
        out.append(rect + (f"><title>{_escape(n)}</title></rect>" if options.labels else "/>"))
        edges = {Direction.N: (px, py, px + k, py), Direction.S: (px, py + k, px + k, py + k),
                 Direction.W: (px, py, px, py + k), Direction.E: (px + k, py, px + k, py + k)}
        for d in DIRS:
            if partner.get(c) == d.step(c):
                continue
            ax, ay, bx, by = edges[d]
            if options.borders:
                lines.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>')
            if options.ticks and sys is not None and n in sys.tiles:
                s = sys.tiles[n].glue(d).strength
                for i in range(min(s, 3)):
                    ticks.append(_tick(d, ax, ay, bx, by, k, i, s))
    if lines:
        out.append('<g id="borders" stroke="#333333" stroke-width="1">' + "".join(lines) + "</g>")
    if ticks:
        out.append('<g id="ticks" stroke="#000000" stroke-width="1.5">' + "".join(ticks) + "</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _tick(d: Direction, ax, ay, bx, by, k, i, s) -> str:
    # short strokes pointing into the cell, spaced along the edge
    off = k * (i + 1) / (s + 1)
    depth = k / 4
    if d in (Direction.N, Direction.S):
        x = ax + off
        y2 = ay + depth if d is Direction.N else ay - depth
        return f'<line x1="{x:g}" y1="{ay}" x2="{x:g}" y2="{y2:g}"/>'
    y = ay + off
    x2 = ax + depth if d is Direction.W else ax - depth
    return f'<line x1="{ax}" y1="{y:g}" x2="{x2:g}" y2="{y:g}"/>'


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
