import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from conftest import small_systems
from datam.engine import (Bounds, FairFIFO, IllegalStepError, LexMin, Random, enumerate_producibles,
                          is_directed_bounded, is_terminal, parse_policy, run, step,
                          strictly_self_assembles)
from datam.gallery import make_finger_flagpole, make_square_system, make_zigzag_counter
from datam.model import Assembly, DupleType, Glue, Placement, TileSystem, TileType, rectangle

POLICIES = [LexMin(), FairFIFO(), Random(0), Random(7)]


def cross_system():
    """Seed with four arms of two tiles each: 8 steps, many orders, one terminal."""
    g = {d: Glue(d, 1) for d in "nesw"}
    tiles = [TileType("s", n=g["n"], e=g["e"], s=g["s"], w=g["w"])]
    for d, opp in (("n", "s"), ("e", "w"), ("s", "n"), ("w", "e")):
        tiles.append(TileType(f"{d}1", **{opp: g[d], d: Glue(d + "2", 1)}))
        tiles.append(TileType(f"{d}2", **{opp: Glue(d + "2", 1)}))
    return TileSystem(tiles, {(0, 0): "s"}, 1)


def two_sided_system():
    s = TileType("s", e=Glue("g", 1), w=Glue("h", 1))
    return TileSystem([s, TileType("t", w=Glue("g", 1)), TileType("u", e=Glue("h", 1))], {(0, 0): "s"}, 1)


def test_step_examples():
    sys = two_sided_system()
    a = step(sys, sys.seed_assembly(), Placement(((1, 0),), ("t",)))
    assert len(a) == 2 and len(sys.seed_assembly()) == 1
    with pytest.raises(IllegalStepError):
        step(sys, a, Placement(((1, 0),), ("t",)))
    d1 = TileType("a", w=Glue("g", 1), e=Glue("x", 1))
    d2 = TileType("b", w=Glue("x", 1))
    dsys = TileSystem([sys.tiles["s"], d1, d2], {(0, 0): "s"}, 1, singletons=["s"],
                      duples=[DupleType("a", "b", "EW")])
    assert len(step(dsys, dsys.seed_assembly(), Placement(((1, 0), (2, 0)), ("a", "b")))) == 3


def test_run_zero_steps_is_seed_only():
    seq = run(cross_system(), LexMin(), max_steps=0)
    assert seq.placements == [] and seq.result == cross_system().seed_assembly()
    with pytest.raises(ValueError):
        run(cross_system(), LexMin(), max_steps=-1)


@pytest.mark.parametrize("policy", POLICIES, ids=repr)
def test_directed_system_same_terminal_under_every_policy(policy):
    sys = cross_system()
    seq = run(sys, policy)
    assert seq.terminal and len(seq) == 8
    seen, terminals, _ = oracle.producibles(sys)
    assert {frozenset(seq.result.cells.items())} == terminals


def test_random_seeds_change_order_not_result():
    a, b = run(cross_system(), Random(1)), run(cross_system(), Random(2))
    assert a.result == b.result
    assert [p.cells for p in a.placements] != [p.cells for p in b.placements]


def test_parse_policy():
    assert parse_policy("lex") == LexMin()
    assert parse_policy("fifo") == FairFIFO()
    assert parse_policy("random", 5) == Random(5)
    with pytest.raises(ValueError):
        parse_policy("greedy")


def test_is_terminal_examples():
    sq = make_square_system(8)
    assert is_terminal(sq, run(sq).result)
    assert not is_terminal(sq, sq.seed_assembly())
    lone = TileSystem([TileType("x")], {(0, 0): "x"}, 1)
    assert is_terminal(lone, lone.seed_assembly())


def test_enumerate_examples():
    lone = TileSystem([TileType("x")], {(0, 0): "x"}, 1)
    ps = enumerate_producibles(lone)
    assert len(ps) == 1 and ps.terminals() == [0]
    assert len(enumerate_producibles(two_sided_system())) == 4
    ps = enumerate_producibles(cross_system(), max_states=10)
    assert ps.truncated and len(ps) == 10
    with pytest.raises(ValueError):
        enumerate_producibles(lone, max_states=0)


# state counts from the brute-force oracle in tests/oracle.py
@pytest.mark.parametrize("bits,top,states,rows", [(1, 1, 6, 2), (2, 3, 16, 4), (3, 7, 40, 8)])
def test_counter_producible_counts(bits, top, states, rows):
    sys = make_zigzag_counter(bits, 0, top)
    ps = enumerate_producibles(sys)
    assert (len(ps), len(ps.terminals()), ps.truncated) == (states, 1, False)
    ys = [y for _, y in ps.assembly(ps.terminals()[0]).cells]
    assert max(ys) - min(ys) + 1 == rows


@given(small_systems(max_types=4))
def test_enumeration_matches_oracle(sys):
    ps = enumerate_producibles(sys, max_states=300)
    seen, terminals, truncated = oracle.producibles(sys, max_states=300)
    if ps.truncated or truncated:
        return
    assert {frozenset(a.cells.items()) for a in ps.assemblies()} == seen
    assert {frozenset(ps.assembly(i).cells.items()) for i in ps.terminals()} == terminals


@given(small_systems(max_types=4))
def test_enumerated_paths_replay(sys):
    ps = enumerate_producibles(sys, max_states=200)
    for i in range(len(ps)):
        path = ps.path(i)
        cells = dict(sys.seed)
        for p in path:
            assert sys.is_legal(cells, p)
            cells.update(zip(p.cells, p.types))
        assert cells == ps.assembly(i).cells


@given(small_systems(), st.integers(0, 2**32))
def test_run_invariants(sys, seed):
    a = run(sys, Random(seed), max_steps=30)
    b = run(sys, Random(seed), max_steps=30)
    assert a.placements == b.placements
    assert a.validate() is None
    sizes = [len(a.snapshot(i)) for i in range(len(a) + 1)]
    assert all(1 <= y - x <= 2 for x, y in zip(sizes, sizes[1:]))


@given(small_systems(max_types=4))
def test_directed_systems_agree_across_policies(sys):
    ps = enumerate_producibles(sys, max_states=300)
    if ps.truncated or len(ps.terminals()) != 1:
        return
    results = {run(sys, p).result for p in POLICIES}
    assert results == {ps.assembly(ps.terminals()[0])}


def test_strict_self_assembly_of_the_small_square():
    sq = make_square_system(8)
    assert strictly_self_assembles(sq, rectangle(8, 8)).status == "yes"
    v = strictly_self_assembles(sq, rectangle(7, 8))
    assert v.status == "no" and isinstance(v.witness, Assembly)
    assert strictly_self_assembles(sq, rectangle(8, 8), Bounds(max_states=5)).status == "unknown"


def test_directedness_verdicts():
    assert is_directed_bounded(make_finger_flagpole(), Bounds(max_states=3000)).status == "no"
    chain = TileSystem([TileType("a", e=Glue("g", 1)), TileType("b", w=Glue("g", 1))], {(0, 0): "a"}, 1)
    assert is_directed_bounded(chain).status == "yes"
    assert is_directed_bounded(cross_system(), Bounds(max_states=3)).status == "unknown"
