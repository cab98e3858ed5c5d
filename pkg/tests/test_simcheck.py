from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_systems
from datam.compiler import compile
from datam.engine import Bounds, Random, enumerate_producibles, run
from datam.gallery import make_zigzag_counter
from datam.model import Glue, Placement, TileSystem, TileType
from datam.simcheck import (RepresentationFunction, check_clean_mapping, check_dynamics,
                            check_equivalent_productions, identity_representation, map_assembly,
                            map_cells)


def branching_pair():
    """A simulated system choosing A or B east of its seed, and a 2-scale simulator that
    makes the choice early, with a helper tile inside the seed's block."""
    g = Glue("g", 1)
    spec = TileSystem([TileType("s", e=g), TileType("A", w=g), TileType("B", w=g)], {(0, 0): "s"}, 1)
    h, ha, hb = Glue("h", 1), Glue("ha", 1), Glue("hb", 1)
    sim = TileSystem([TileType("s'", e=h), TileType("fA", w=h, e=ha), TileType("fB", w=h, e=hb),
                      TileType("A'", w=ha), TileType("B'", w=hb)], {(0, 0): "s'"}, 1)
    R = RepresentationFunction(2, {"s'": "s", "A'": "A", "B'": "B"})
    return sim, spec, R


@lru_cache(maxsize=None)
def compiled_counter():
    return compile(make_zigzag_counter(2, 0, 3))


def test_map_assembly_examples():
    R = RepresentationFunction(3, {"c": "X"}, center=(1, 1))
    assert map_cells(R, {}) == {}
    assert map_cells(R, {(1, 1): "c", (0, 0): "p", (2, 0): "p"}) == {(0, 0): "X"}
    assert map_cells(R, {(3, 0): "p", (4, 0): "p"}) == {}
    with pytest.raises(ValueError):
        RepresentationFunction(0, {})


def test_partial_compiled_macrotile_maps_once_center_is_placed():
    out = compiled_counter()
    seq = run(out.dtas)
    for i, p in enumerate(seq.placements, 1):
        hits = [(c, n) for c, n in zip(p.cells, p.types) if n in out.repr.lookup]
        if hits and i > 1:
            (c, n), = hits
            block = out.repr.block_of(c)
            assert block not in map_assembly(out.repr, seq.snapshot(i - 1)).cells
            assert map_assembly(out.repr, seq.snapshot(i)).cells[block] == out.repr.lookup[n]
            # the block is still incomplete at that point
            assert sum(1 for q in seq.snapshot(i).cells if out.repr.block_of(q) == block) < out.m ** 2
            break
    else:
        pytest.fail("no center tile placed")


@pytest.mark.parametrize("fuzz,mode,clean", [
    ((1, 2), "block", True),      # directly north of the mapped block
    ((2, 2), "block", False),     # diagonal
    ((2, 2), "plus", True),
    ((4, 0), "plus", True),       # Manhattan distance 2
    ((6, 0), "plus", False),
])
def test_fuzz_rules(fuzz, mode, clean):
    R = RepresentationFunction(2, {"c": "X"}, mode=mode)
    cells = {(0, 0): "c", fuzz: "junk"}
    assert (check_clean_mapping(R, cells) == []) == clean


def test_identity_simulation_passes():
    sys = make_zigzag_counter(2, 0, 3)
    R = identity_representation(sys.tiles)
    assert check_equivalent_productions(sys, sys, R).ok
    assert check_dynamics(sys, sys, R).ok


@given(small_systems(max_types=4))
def test_identity_simulation_passes_on_random_systems(sys):
    bounds = Bounds(max_cells=50, max_states=300)
    if enumerate_producibles(sys, bounds.max_cells, bounds.max_states).truncated:
        return
    R = identity_representation(sys.tiles)
    for rep in (check_equivalent_productions(sys, sys, R, bounds), check_dynamics(sys, sys, R, bounds)):
        assert rep.ok and rep.violations == []


def test_early_commitment_breaks_modelling_only():
    sim, spec, R = branching_pair()
    assert check_equivalent_productions(sim, spec, R).ok
    rep = check_dynamics(sim, spec, R)
    assert not rep.ok
    assert any("can no longer realise" in v for v in rep.violations)


def test_compiled_counter_cosimulates():
    out = compiled_counter()
    src = make_zigzag_counter(2, 0, 3)
    assert check_equivalent_productions(out.dtas, src, out.repr).ok
    assert check_dynamics(out.dtas, src, out.repr).ok


def test_small_bounds_are_inconclusive():
    out = compiled_counter()
    rep = check_equivalent_productions(out.dtas, make_zigzag_counter(2, 0, 3), out.repr,
                                       Bounds(max_states=50))
    assert rep.truncated and not rep.ok
    assert "truncated" in rep.summary()


def test_plus_mode_is_flagged():
    sys = make_zigzag_counter(1, 0, 1)
    R = identity_representation(sys.tiles)
    R.mode = "plus"
    rep = check_equivalent_productions(sys, sys, R)
    assert rep.ok and rep.warnings


@settings(max_examples=10)
@given(st.integers(0, 2**16))
def test_representation_is_monotone_along_compiled_runs(seed):
    out = compiled_counter()
    R = out.repr
    src = make_zigzag_counter(2, 0, 3)
    seq = run(out.dtas, Random(seed))
    cells = dict(seq.seed.cells)
    img = map_cells(R, cells)
    for p in seq.placements:
        cells.update(zip(p.cells, p.types))
        new = {}
        for b in {R.block_of(c) for c in p.cells}:
            t = R.represent(cells, b)
            if b in img:
                assert t == img[b]
            elif t is not None:
                new[b] = t
        # each step maps to no change or to one legal simulated attachment
        assert len(new) <= 1
        for b, t in new.items():
            if img:
                assert src.is_legal(img, Placement((b,), (t,)))
            else:
                assert {b: t} == src.seed
        img.update(new)
    assert img == run(src).result.cells
