"""JSON system files, JSON-lines trace files and representation sidecars."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .engine import AssemblySequence
from .model import Assembly, DupleType, Glue, ModelError, Placement, Pos, TileSystem, TileType
from .simcheck import RepresentationFunction, SimulationReport

FORMAT_VERSION = 1
_SYSTEM_KEYS = {"temperature", "tiles", "singletons", "duples", "seed", "name", "metadata"}
_TILE_KEYS = {"name", "n", "e", "s", "w"}
_GLUE_KEYS = {"label", "strength"}


class FormatError(ModelError):
    """A document does not follow the file format."""


def _check_keys(obj: Any, allowed: set[str], required: set[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"unknown field(s) in {what}: {', '.join(sorted(extra))}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"missing field(s) in {what}: {', '.join(sorted(missing))}")


_SKIP = object()


def _jsonable(v: Any) -> Any:
    """JSON form of a metadata value, or ``_SKIP`` when it has none."""
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, (list, tuple)):
        out = [_jsonable(x) for x in v]
        return _SKIP if any(x is _SKIP for x in out) else out
    if isinstance(v, Mapping):
        out = {}
        for k, x in v.items():
            j = _jsonable(x)
            if j is not _SKIP:
                out[str(k)] = j
        return out
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        fields = {f.name: getattr(v, f.name) for f in dataclasses.fields(v)}
        j = _jsonable(fields)
        return j if len(j) == len(fields) else _SKIP
    return _SKIP


# -- systems -------------------------------------------------------------------------

def _glue_doc(g: Glue) -> dict:
    return {"label": g.label, "strength": g.strength}


def system_to_doc(sys: TileSystem, metadata: bool = True) -> dict:
    """Canonical document: sorted tiles and seed, null glue sides omitted."""
    tiles = []
    for name in sorted(sys.tiles):
        t = sys.tiles[name]
        d = {"name": name}
        for side in "nesw":
            g = getattr(t, side)
            if not g.is_null:
                d[side] = _glue_doc(g)
        tiles.append(d)
    doc = {
        "temperature": sys.temperature,
        "tiles": tiles,
        "singletons": sorted(sys.singletons),
        "duples": [{"a": d.a, "b": d.b, "axis": d.axis} for d in sys.duples],
        "seed": [{"x": x, "y": y, "tile": n} for (x, y), n in sorted(sys.seed.items())],
    }
    if sys.name:
        doc["name"] = sys.name
    if metadata and sys.metadata:
        doc["metadata"] = _jsonable(sys.metadata)
    return doc


def _glue_from(obj: Any, what: str) -> Glue:
    _check_keys(obj, _GLUE_KEYS, _GLUE_KEYS, what)
    label, strength = obj["label"], obj["strength"]
    if not isinstance(label, str) or not isinstance(strength, int) or isinstance(strength, bool):
        raise FormatError(f"{what}: label must be a string and strength an integer")
    try:
        return Glue(label, strength)
    except ValueError as e:
        raise FormatError(f"{what}: {e}") from None


def system_from_doc(doc: Any, check_seed: bool = True) -> TileSystem:
    _check_keys(doc, _SYSTEM_KEYS, {"temperature", "tiles", "seed"}, "system")
    tiles = []
    for i, t in enumerate(doc["tiles"]):
        _check_keys(t, _TILE_KEYS, {"name"}, f"tile #{i}")
        sides = {s: _glue_from(t[s], f"tile {t['name']!r} side {s}") for s in "nesw" if s in t}
        tiles.append(TileType(t["name"], **sides))
    duples = []
    for i, d in enumerate(doc.get("duples", [])):
        _check_keys(d, {"a", "b", "axis"}, {"a", "b", "axis"}, f"duple #{i}")
        duples.append(DupleType(d["a"], d["b"], d["axis"]))
    seed = {}
    for i, c in enumerate(doc["seed"]):
        _check_keys(c, {"x", "y", "tile"}, {"x", "y", "tile"}, f"seed cell #{i}")
        if (c["x"], c["y"]) in seed:
            raise FormatError(f"seed cell ({c['x']}, {c['y']}) listed twice")
        seed[(c["x"], c["y"])] = c["tile"]
    return TileSystem(tiles, seed, doc["temperature"], singletons=doc.get("singletons"),
                      duples=duples, name=doc.get("name", ""), check_seed=check_seed,
                      metadata=doc.get("metadata"))


def dumps_system(sys: TileSystem, metadata: bool = True) -> str:
    return json.dumps(system_to_doc(sys, metadata), indent=1, sort_keys=True) + "\n"


def loads_system(text: str, check_seed: bool = True) -> TileSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not JSON: {e}") from None
    return system_from_doc(doc, check_seed)


def save_system(sys: TileSystem, path: str | Path) -> None:
    Path(path).write_text(dumps_system(sys))


def load_system(path: str | Path, check_seed: bool = True) -> TileSystem:
    return loads_system(Path(path).read_text(), check_seed)


def system_hash(sys: TileSystem) -> str:
    """SHA-256 of the canonical document without metadata."""
    text = json.dumps(system_to_doc(sys, metadata=False), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def cells_hash(cells: Mapping[Pos, str] | Assembly) -> str:
    if isinstance(cells, Assembly):
        cells = cells.cells
    text = ";".join(f"{x},{y}:{n}" for (x, y), n in sorted(cells.items()))
    return hashlib.sha256(text.encode()).hexdigest()


# -- traces --------------------------------------------------------------------------

def placement_doc(step: int, p: Placement) -> dict:
    return {"step": step, "kind": p.kind, "cells": [list(c) for c in p.cells], "types": list(p.types)}


def write_trace(seq: AssemblySequence, out: IO[str]) -> None:
    """Header line, then one placement per line."""
    header = {"format": "datam-trace", "version": FORMAT_VERSION,
              "system_hash": system_hash(seq.system), "steps": len(seq.placements),
              "terminal": seq.terminal, "final_hash": cells_hash(seq.snapshot())}
    out.write(json.dumps(header, sort_keys=True) + "\n")
    for i, p in enumerate(seq.placements, 1):
        out.write(json.dumps(placement_doc(i, p), sort_keys=True) + "\n")


def dumps_trace(seq: AssemblySequence) -> str:
    import io
    buf = io.StringIO()
    write_trace(seq, buf)
    return buf.getvalue()


def _placement_from(obj: Any, line: int) -> Placement:
    _check_keys(obj, {"step", "kind", "cells", "types"}, {"step", "kind", "cells", "types"}, f"trace line {line}")
    cells = tuple(tuple(c) for c in obj["cells"])
    types = tuple(obj["types"])
    if len(cells) != len(types) or len(cells) not in (1, 2) or any(len(c) != 2 for c in cells):
        raise FormatError(f"trace line {line}: malformed placement")
    kind = "singleton" if len(cells) == 1 else "duple"
    if obj["kind"] != kind:
        raise FormatError(f"trace line {line}: kind {obj['kind']!r} does not fit {len(cells)} cell(s)")
    return Placement(cells, types, obj["step"])


def read_trace(lines: Iterable[str], sys: TileSystem, check: bool = True) -> AssemblySequence:
    """Rebuild a sequence over ``sys``; with ``check`` the system hash, step legality and
    final snapshot hash are verified."""
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise FormatError("empty trace") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"trace header is not JSON: {e}") from None
    _check_keys(header, {"format", "version", "system_hash", "steps", "terminal", "final_hash"},
                {"format", "system_hash"}, "trace header")
    if header["format"] != "datam-trace":
        raise FormatError("not a trace file")
    if check and header["system_hash"] != system_hash(sys):
        raise FormatError("trace was recorded for a different system")
    placements = []
    for i, line in enumerate(it, 2):
        if line.strip():
            try:
                placements.append(_placement_from(json.loads(line), i))
            except json.JSONDecodeError as e:
                raise FormatError(f"trace line {i} is not JSON: {e}") from None
    seq = AssemblySequence(sys, placements, sys.seed_assembly(), terminal=bool(header.get("terminal")))
    if check:
        bad = seq.validate()
        if bad is not None:
            raise FormatError(f"trace step {bad + 1} is not a legal attachment")
        if "final_hash" in header and header["final_hash"] != cells_hash(seq.snapshot()):
            raise FormatError("replayed assembly does not match the recorded final hash")
    return seq


def loads_trace(text: str, sys: TileSystem, check: bool = True) -> AssemblySequence:
    return read_trace(text.splitlines(), sys, check)


# -- representation sidecar and reports ----------------------------------------------

def repr_to_doc(R: RepresentationFunction) -> dict:
    return {"m": R.m, "center": list(R.center), "mode": R.mode, "lookup": dict(sorted(R.lookup.items()))}


def repr_from_doc(doc: Any) -> RepresentationFunction:
    _check_keys(doc, {"m", "center", "mode", "lookup"}, {"m", "lookup"}, "representation")
    return RepresentationFunction(doc["m"], dict(doc["lookup"]), tuple(doc.get("center", (0, 0))),
                                  doc.get("mode", "block"))


def dumps_repr(R: RepresentationFunction) -> str:
    return json.dumps(repr_to_doc(R), indent=1, sort_keys=True) + "\n"


def report_to_doc(rep: SimulationReport) -> dict:
    return {"check": rep.check, "ok": rep.ok, "simulator_states": rep.simulator_states,
            "simulated_states": rep.simulated_states, "truncated": rep.truncated,
            "violations": list(rep.violations), "warnings": list(rep.warnings)}
