import io
import json

import pytest

from datam.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from datam.gallery import make_zigzag_counter
from datam.io import dumps_repr, loads_system, loads_trace, save_system
from datam.model import Glue, TileSystem, TileType
from datam.simcheck import RepresentationFunction


@pytest.fixture
def counter_file(tmp_path):
    path = tmp_path / "counter.json"
    save_system(make_zigzag_counter(2, 0, 3), path)
    return path


def test_gallery_then_run_ascii(tmp_path, capsys, monkeypatch):
    assert main(["gallery", "--construction", "square", "--n", "8"]) == EXIT_OK
    text = capsys.readouterr().out
    assert loads_system(text).metadata["n"] == 8
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert main(["run", "--system", "-", "--render", "ascii"]) == EXIT_OK
    out = capsys.readouterr()
    assert out.out.count("\n") == 8 and "@" in out.out
    assert json.loads(out.err)["terminal"] is True


def test_run_writes_replayable_trace(tmp_path, counter_file, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["run", "--system", str(counter_file), "--policy", "random", "--seed-rng", "3",
                 "--out-trace", str(trace)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    seq = loads_trace(trace.read_text(), make_zigzag_counter(2, 0, 3))
    assert summary["steps"] == len(seq) and seq.terminal


def test_run_svg_to_file(tmp_path, counter_file):
    svg = tmp_path / "a.svg"
    assert main(["run", "--system", str(counter_file), "--render", "svg", "--render-out", str(svg),
                 "--cell", "6"]) == EXIT_OK
    assert svg.read_text().startswith("<svg")


def test_compile_and_verify(tmp_path, counter_file, capsys):
    dtas, rep = tmp_path / "dtas.json", tmp_path / "repr.json"
    assert main(["compile", "--system", str(counter_file), "--out", str(dtas),
                 "--repr-out", str(rep)]) == EXIT_OK
    stats = json.loads(capsys.readouterr().err)
    assert stats["m"] == 24 and loads_system(dtas.read_text()).temperature == 1
    assert main(["verify", "--sim", str(dtas), "--spec", str(counter_file), "--repr", str(rep)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_verify_failure_writes_witness(tmp_path, capsys):
    g = Glue("g", 1)
    spec = TileSystem([TileType("s", e=g), TileType("A", w=g), TileType("B", w=g)], {(0, 0): "s"}, 1)
    h, ha, hb = Glue("h", 1), Glue("ha", 1), Glue("hb", 1)
    sim = TileSystem([TileType("s'", e=h), TileType("fA", w=h, e=ha), TileType("fB", w=h, e=hb),
                      TileType("A'", w=ha), TileType("B'", w=hb)], {(0, 0): "s'"}, 1)
    paths = {k: tmp_path / f"{k}.json" for k in ("sim", "spec", "repr")}
    save_system(sim, paths["sim"])
    save_system(spec, paths["spec"])
    paths["repr"].write_text(dumps_repr(RepresentationFunction(2, {"s'": "s", "A'": "A", "B'": "B"})))
    witness = tmp_path / "w.json"
    code = main(["verify", "--sim", str(paths["sim"]), "--spec", str(paths["spec"]),
                 "--repr", str(paths["repr"]), "--witness", str(witness)])
    assert code == EXIT_FAILED
    assert json.loads(witness.read_text())["ok"] is False


def test_compile_rejects_non_zigzag(tmp_path, capsys):
    path = tmp_path / "flag.json"
    assert main(["gallery", "--construction", "flagpole", "--out", str(path)]) == EXIT_OK
    assert main(["compile", "--system", str(path)]) == EXIT_USAGE
    assert "zig-zag" in capsys.readouterr().err


def test_analyze_subchecks(tmp_path, counter_file, capsys):
    trace = tmp_path / "t.jsonl"
    main(["run", "--system", str(counter_file), "--out-trace", str(trace)])
    capsys.readouterr()
    base = ["--trace", str(trace), "--system", str(counter_file)]
    assert main(["analyze", "zigzag", *base]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["status"] == "yes"
    assert main(["analyze", "movies", *base, "--window", "0,0,2,1", "--window", "0,1,2,1"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["movies"]) == 2
    assert main(["analyze", "duplings", *base, "--row", "0", "--row", "1"]) == EXIT_OK
    assert set(json.loads(capsys.readouterr().out)["rows"]) == {"0", "1"}
    assert main(["analyze", "movies", *base]) == EXIT_USAGE


def test_enumerate(counter_file, capsys):
    assert main(["enumerate", "--system", str(counter_file)]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"states": 16, "edges": doc["edges"], "terminals": 1, "truncated": False,
                   "directed": "yes"}


@pytest.mark.parametrize("argv", [
    [],
    ["fly"],
    ["run"],
    ["run", "--system", "/nonexistent.json"],
    ["run", "--system", "x", "--policy", "greedy"],
    ["gallery", "--construction", "square", "--n", "3"],
    ["enumerate", "--system", "x", "--bounds", "1"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_bad_system_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"temperature": 1, "tiles": [], "seed": [], "colour": 1}')
    assert main(["run", "--system", str(bad)]) == EXIT_USAGE
    assert "colour" in capsys.readouterr().err


def test_runs_are_byte_identical(tmp_path, counter_file):
    outs = []
    for k in range(2):
        trace, svg = tmp_path / f"t{k}.jsonl", tmp_path / f"s{k}.svg"
        assert main(["run", "--system", str(counter_file), "--policy", "random", "--seed-rng", "11",
                     "--out-trace", str(trace), "--render", "svg", "--render-out", str(svg)]) == EXIT_OK
        outs.append((trace.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]
