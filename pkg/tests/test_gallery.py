import random
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from datam.engine import FairFIFO, LexMin, run
from datam.gallery import (CONSTRUCTIONS, GalleryError, GalleryParams, build, digits,
                           make_finger_candidate, make_finger_flagpole, make_planter_system,
                           make_S8_system, make_shape_W_system, make_square_system, make_tower_system,
                           make_zigzag_counter, pin_arms, pin_finger_end, pin_height,
                           random_small_system)
from datam.model import frontier, rectangle


@lru_cache(maxsize=None)
def shape_w_1():
    S = make_shape_W_system(1)
    return S, run(S, LexMin())


def bbox(cells):
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    return min(xs), min(ys), max(xs), max(ys)


def test_digits():
    assert digits(6, 2, 4) == [0, 1, 1, 0]
    assert digits(5, 4, 2) == [1, 1]


@pytest.mark.parametrize("bits,base,orientation", [(1, 2, "W"), (2, 2, "W"), (3, 2, "E"), (2, 3, "W")])
def test_counter_terminal_is_a_rectangle(bits, base, orientation):
    sys = make_zigzag_counter(bits, 0, base ** bits - 1, orientation, base)
    seq = run(sys, FairFIFO())
    assert seq.terminal
    x0, y0, x1, y1 = bbox(seq.result.cells)
    assert y1 - y0 + 1 == base ** bits
    assert len(seq.result) == (x1 - x0 + 1) * (y1 - y0 + 1)


def test_counter_partial_range():
    seq = run(make_zigzag_counter(3, 2, 5))
    x0, y0, x1, y1 = bbox(seq.result.cells)
    assert y1 - y0 + 1 == 4


@pytest.mark.parametrize("n", [8, 16, 32])
def test_square_terminal(n):
    sys = make_square_system(n)
    seq = run(sys, LexMin())
    assert seq.terminal
    assert set(seq.result.cells) == set(rectangle(n, n))


def test_square_tile_counts_do_not_shrink():
    counts = [len(make_square_system(n).tiles) for n in (8, 16, 32, 64)]
    assert counts == sorted(counts)
    with pytest.raises(GalleryError):
        make_square_system(7)


@pytest.mark.parametrize("k", [1, 2])
def test_planter_counter_heights_are_even_and_growing(k):
    sys = make_planter_system(k)
    hs = sys.metadata["counter_heights"]
    assert len(hs) == k
    assert all(h % 2 == 0 for h in hs) and hs == sorted(set(hs))
    assert run(sys).terminal


def test_shape_w_leaves_one_cell_gap():
    S, seq = shape_w_1()
    f = S.metadata["fingers"][0]
    cells = seq.result.cells
    assert seq.terminal and S.temperature == 1
    assert f.gap_cell not in cells
    assert cells[(f.x, f.planter_top + 2)] == "W:Fb"
    assert cells[(f.x, f.planter_top)]                  # planter below the gap
    assert f.available % 2 == 1


def test_s8_adds_a_line_of_eight():
    S, _ = shape_w_1()
    S8 = make_S8_system(1)
    assert len(S8.tiles) - len(S.tiles) == 8
    line = S8.metadata["line"][1]
    assert len(line) == 8 and len({y for _, y in line}) == 1


def test_finger_candidate_pinned_end():
    sys = make_finger_candidate(12, 5, s_line=False)
    geo = sys.metadata["geometry"]
    seq = run(sys, LexMin(), choose=pin_finger_end(sys))
    cells = seq.result.cells
    assert (geo.finger_x, geo.gap_y) not in cells
    assert cells[(geo.finger_x, geo.gap_y + 1)].startswith("C:Z")
    with pytest.raises(GalleryError):
        make_finger_candidate(5)


def test_flagpole_types_and_arms():
    sys = make_finger_flagpole()
    assert len(sys.tiles) == 18
    names = set(run(sys, LexMin(), choose=pin_arms(3, 3)).result.cells.values())
    assert {"keystone", "pole3", "flag3"} <= names
    names = set(run(sys, LexMin(), choose=pin_arms(3, 5)).result.cells.values())
    assert "keystone" not in names
    with pytest.raises(GalleryError):
        pin_arms(0, 2)


def test_keystone_needs_both_fingers():
    sys = make_finger_flagpole()
    cells = dict(run(sys, LexMin(), choose=pin_arms(2, 2)).result.cells)
    key = next(c for c, n in cells.items() if n == "keystone")
    before = {c: n for c, n in cells.items() if n not in ("keystone",) and not n.startswith(("pole", "flag"))}
    assert any(p.types == ("keystone",) for p in frontier(sys, before))
    for drop in ("top_finger", "bottom_finger"):
        partial = {c: n for c, n in before.items() if n != drop}
        assert not any(p.types == ("keystone",) and p.cells == (key,) for p in frontier(sys, partial))


def test_tower_heights():
    sys = make_tower_system()
    assert len(sys.tiles) == 4 and len(sys.duples) == 1
    seq = run(sys, LexMin(), choose=pin_height(20))
    assert seq.terminal
    assert max(y for _, y in seq.result.cells) == 19
    assert seq.result.cells[(0, 19)] == "T:cap"


@pytest.mark.parametrize("kwargs", [
    dict(construction="nope"),
    dict(construction="counter", bits=0),
    dict(construction="square", n=4),
    dict(construction="planter", k=0),
    dict(construction="shape_W", k=1, odd_hook=2),
    dict(construction="finger_candidate", budget=0),
])
def test_params_validation(kwargs):
    with pytest.raises(GalleryError):
        GalleryParams(**kwargs)


@pytest.mark.parametrize("construction", ["counter", "square", "planter", "flagpole", "tower",
                                          "finger_candidate"])
def test_build_dispatch(construction):
    assert construction in CONSTRUCTIONS
    sys = build(GalleryParams(construction))
    assert sys.tiles and sys.seed


@given(st.integers(0, 10**9), st.integers(4, 12))
def test_random_small_system_shape(seed, max_types):
    sys = random_small_system(random.Random(seed), max_types)
    assert 3 <= len(sys.tiles) <= max_types
    assert sys.temperature in (1, 2) and len(sys.seed) == 1
    assert len(sys.duples) <= 1
    assert run(sys, max_steps=20).validate() is None
