import math
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from datam.compiler import (C1, C2, C3, PreconditionError, UnsupportedTemperatureError,
                            assign_palindromes, check_probe_exclusivity, code_width, compile,
                            emit_bit_gadget, gadget_probe_system, scale_for)
from datam.engine import Random, run
from datam.gallery import make_finger_flagpole, make_zigzag_counter
from datam.model import NULL, Glue, TileSystem, TileType, frontier
from datam.simcheck import check_dynamics, check_equivalent_productions, map_assembly


def toy_system():
    """Three columns, two rows: east along the bottom, west along the top."""
    G = Glue
    tiles = [TileType("A", e=G("a", 2), n=G("x", 1)),
             TileType("B", w=G("a", 2), e=G("b", 2), n=G("y", 1)),
             TileType("C", w=G("b", 2), n=G("z", 2)),
             TileType("D", s=G("z", 2), w=G("c", 1)),
             TileType("E", e=G("c", 1), s=G("y", 1), w=G("d", 1)),
             TileType("F", e=G("d", 1), s=G("x", 1)),
             TileType("U", w=G("q", 2))]
    return TileSystem(tiles, {(0, 0): "A"}, 2)


@lru_cache(maxsize=None)
def compiled_toy():
    return compile(toy_system())


@lru_cache(maxsize=None)
def compiled_counter(bits, base=2):
    return compile(make_zigzag_counter(bits, 0, base ** bits - 1, "W", base))


def test_palindrome_examples():
    assert list(assign_palindromes([])) == [NULL]
    assert assign_palindromes([])[NULL].bits == "00"
    codes = assign_palindromes([Glue("p", 1), Glue("q", 1)])
    assert codes[Glue("p", 1)].bits == "0110"
    assert codes[Glue("q", 1)].bits == "1001"
    assert codes[NULL].index == 0


@given(st.sets(st.tuples(st.sampled_from("abcdefgh"), st.integers(1, 2)), max_size=12))
def test_codes_are_injective_palindromes(pairs):
    codes = assign_palindromes(Glue(l, s) for l, s in pairs)
    b = code_width(len(pairs))
    bits = [c.bits for c in codes.values()]
    assert len(set(bits)) == len(bits)
    for c in codes.values():
        assert c.bits == c.bits[::-1] and len(c.bits) == 2 * b
        # reading either half from its own end gives the index
        assert int(c.bits[:b], 2) == int(c.bits[::-1][:b], 2) == c.index


@pytest.mark.parametrize("bit", [0, 1])
@pytest.mark.parametrize("direction", ["E", "W"])
def test_bit_gadget_admits_exactly_one_probe(bit, direction):
    sys, names = gadget_probe_system(bit, direction)
    kinds = set()
    for p in frontier(sys, sys.seed):
        if names["single"] in p.types:
            kinds.add("single")
        if p.kind == "duple":
            kinds.add("duple")
    assert len(kinds) == 1
    g = emit_bit_gadget(bit)
    fits = g.fits(direction)
    assert fits["single"] != fits["duple"]
    # the singleton signals the reader's single_bit, the duple the other value
    assert ("single" in kinds) == (bit == g.reader(direction).single_bit)


def test_bad_gadget_bit():
    with pytest.raises(ValueError):
        emit_bit_gadget(2)


def test_compile_rejects_bad_inputs():
    with pytest.raises(PreconditionError):
        compile(make_finger_flagpole())
    t1 = TileSystem([TileType("x")], {(0, 0): "x"}, 1)
    with pytest.raises(UnsupportedTemperatureError):
        compile(t1)


def test_single_seed_compiles_to_one_macrotile():
    one = TileSystem([TileType("x")], {(0, 0): "x"}, 2)
    out = compile(one)
    asm = run(out.dtas).result
    assert map_assembly(out.repr, asm).cells == {(0, 0): "x"}
    assert all(x < out.m and y < out.m for x, y in asm.cells)


def test_toy_cosimulation():
    out = compiled_toy()
    src = toy_system()
    assert out.dtas.temperature == 1
    assert check_equivalent_productions(out.dtas, src, out.repr).ok
    assert check_dynamics(out.dtas, src, out.repr).ok


def test_compiled_glues_are_strength_one():
    out = compiled_toy()
    strengths = {g.strength for t in out.dtas.tiles.values() for g in (t.n, t.e, t.s, t.w)}
    assert strengths <= {0, 1}


def test_deleting_a_macrotile_type_breaks_productions():
    out = compiled_toy()
    center = next(n for n, s in out.repr.lookup.items() if s == "F")
    tiles = [t for n, t in out.dtas.tiles.items() if n != center]
    broken = TileSystem(tiles, out.dtas.seed, 1, singletons=out.dtas.singletons - {center},
                        duples=out.dtas.duples, check_seed=False)
    rep = check_equivalent_productions(broken, toy_system(), out.repr)
    assert not rep.ok and any("never represented" in v or "terminal" in v for v in rep.violations)


@pytest.mark.parametrize("bits,base", [(1, 2), (2, 2), (1, 8)])
def test_compiled_counter_matches_source(bits, base):
    out = compiled_counter(bits, base)
    src = make_zigzag_counter(bits, 0, base ** bits - 1, "W", base)
    seq = run(out.dtas)
    assert seq.terminal
    assert map_assembly(out.repr, seq.result).cells == run(src).result.cells
    assert check_probe_exclusivity(out, seq) == []


@pytest.mark.parametrize("bits,base", [(1, 2), (2, 2), (1, 8)])
def test_scale_and_size_bounds(bits, base):
    out = compiled_counter(bits, base)
    g = out.stats["encoded_glues"]
    assert out.m == scale_for(out.b) == C1 * math.ceil(math.log2(g + 1)) + C2
    assert out.stats["tile_complexity"] <= C3 * out.stats["source_types"] * max(g, 1)


@pytest.mark.parametrize("seed", range(3))
def test_exclusivity_under_random_schedules(seed):
    out = compiled_counter(2)
    seq = run(out.dtas, Random(seed))
    assert check_probe_exclusivity(out, seq) == []
    assert seq.result.cells == run(out.dtas).result.cells
