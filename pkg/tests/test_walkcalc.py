import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from redtri import surface, walkcalc
from redtri.walkcalc import (
    BAD,
    GOOD,
    BoundaryTurnError,
    Reduced,
    Stalled,
    Turn,
    Walk,
    classify,
    corner_positions,
    is_reduced,
    read_walk,
    reduce_closed,
    reduce_open,
    torus_stalled_walk,
    turn,
    turn_at,
    write_walk,
)

from conftest import make_patch


def all_closed_walks(t, max_len):
    for n in range(1, max_len + 1):
        for hes in itertools.product(range(len(t.next)), repeat=n):
            try:
                yield Walk.from_half_edges(t, hes, closed=True)
            except walkcalc.WalkError:
                continue


def test_spur_turn_is_zero(torus):
    tu = turn_at(torus, 0, torus.twin[0])
    assert tu.signed_value == 0 and classify(tu) == BAD


def test_straight_through_degree_six(torus):
    # the single-loop closed walk runs straight: antipodal slot
    w = Walk.from_half_edges(torus, (0,), closed=True)
    tu = turn(torus, w, 0)
    assert tu.signed_value == 3
    assert tu.subscript == surface.RED
    assert classify(tu) == GOOD
    assert is_reduced(torus, w)


def test_degree_eight_turn_values():
    # find a degree-8 interior vertex on some generated patch
    for seed in range(20):
        p = make_patch(seed, radius=2)
        vs = [v for v in range(p.num_vertices)
              if not p.is_boundary_vertex(v) and p.degree(v) == 8]
        if not vs:
            continue
        v = vs[0]
        slots = p.vertex_slots[v]
        e2 = slots[0]
        e1 = p.twin[slots[(slots.index(e2) - 4) % 8]]
        tu = turn_at(p, e1, e2)
        assert tu.clockwise_steps == 4
        assert tu.signed_value == 4
        return
    pytest.fail("no degree-8 vertex found")


def test_classify_table():
    assert classify(Turn(2, 6, surface.BLUE)) == GOOD    # 2_b
    assert classify(Turn(4, 6, surface.RED)) == BAD      # -2_r
    assert classify(Turn(3, 6, surface.RED)) == GOOD     # 3_r
    assert classify(Turn(1, 6, surface.BLUE)) == BAD
    assert classify(Turn(5, 6, surface.RED)) == BAD
    assert classify(Turn(0, 8, surface.BLUE)) == BAD


def test_boundary_turn_rejected():
    p = make_patch(0, radius=1)
    # any corner through a boundary vertex
    for h in range(len(p.next)):
        v = p.head(h)
        if p.is_boundary_vertex(v):
            for g in p.vertex_slots[v]:
                with pytest.raises(BoundaryTurnError):
                    turn_at(p, h, g)
            return
    pytest.fail("no boundary corner found")


def test_reduce_open_spur(torus):
    w = Walk.from_half_edges(torus, (0, torus.twin[0]))
    r = reduce_open(w, torus)
    assert len(r) == 0 and r.start == 0


def test_reduce_open_one_turn_corner():
    p = make_patch(3)
    # pick a 1-turn corner whose middle vertex is interior
    for e1 in range(len(p.next)):
        e2 = p.next[e1]
        if p.is_boundary_vertex(p.head(e1)):
            continue
        w = Walk.from_half_edges(p, (e1, e2))
        r = reduce_open(w, p)
        third = p.twin[p.next[p.next[e1]]]
        assert r.half_edges == (third,)
        return
    pytest.fail("no interior corner")


def test_reduce_open_fixpoint():
    p = make_patch(2)
    for h in range(len(p.next)):
        w = Walk.from_half_edges(p, (h,))
        assert reduce_open(w, p).half_edges == (h,)


def test_reduce_open_never_lengthens():
    p = make_patch(5)
    rng = random.Random(9)
    interior = [v for v in range(p.num_vertices) if not p.is_boundary_vertex(v)]
    for _ in range(30):
        v = rng.choice(interior)
        hes = []
        for _ in range(rng.randrange(1, 7)):
            h = rng.choice(p.vertex_slots[v])
            if p.is_boundary_vertex(p.head(h)) and len(hes) < 6:
                continue
            hes.append(h)
            v = p.head(h)
        if not hes or p.is_boundary_vertex(v):
            continue
        if any(p.is_boundary_vertex(p.head(h)) for h in hes[:-1]):
            continue
        w = Walk.from_half_edges(p, hes)
        r = reduce_open(w, p)
        assert is_reduced(p, r)
        assert len(r) <= len(w)
        assert r.start == w.start and r.end(p) == w.end(p)


def test_reduce_closed_all_3r_is_fixpoint(torus):
    w = Walk.from_half_edges(torus, (0, 0, 0), closed=True)
    out = reduce_closed(w, torus)
    assert isinstance(out, Reduced)
    assert out.walk.half_edges == (0, 0, 0)


def test_reduce_closed_spur(torus):
    w = Walk.from_half_edges(torus, (0, 0, 4, 0), closed=True)
    out = reduce_closed(w, torus)
    assert isinstance(out, Reduced)
    assert len(out.walk) == 2


def test_torus_stalled_walk(torus):
    c = torus_stalled_walk(torus)
    vals = sorted(str(turn(torus, c, i)) for i in corner_positions(c))
    assert "-2_r" in vals
    out = reduce_closed(c, torus)
    assert isinstance(out, Stalled)
    assert out.reason == "cycle"


def test_torus_reduced_closed_walks_run_straight(torus):
    for w in all_closed_walks(torus, 4):
        if is_reduced(torus, w):
            strs = {str(turn(torus, w, i)) for i in corner_positions(w)}
            assert strs in ({"3_r"}, {"3_b"})


@given(st.integers(min_value=0, max_value=5999))
@settings(max_examples=60, deadline=None)
def test_badness_reversal_invariant(idx):
    torus = surface.build_torus()
    e1, e2 = idx // 1000 % 6, idx // 100 % 6
    if torus.tail(e2) != torus.head(e1):
        return
    tu = turn_at(torus, e1, e2)
    rv = turn_at(torus, torus.twin[e2], torus.twin[e1])
    assert classify(tu) == classify(rv)
    assert tu.signed_value == -rv.signed_value or tu.signed_value == rv.signed_value == 3


def test_badness_reversal_invariant_on_patch():
    p = make_patch(4)
    rng = random.Random(2)
    pairs = 0
    while pairs < 50:
        e1 = rng.randrange(len(p.next))
        v = p.head(e1)
        if p.is_boundary_vertex(v):
            continue
        e2 = rng.choice(p.vertex_slots[v])
        if p.twin[e1] == surface.NO_TWIN or p.twin[e2] == surface.NO_TWIN:
            continue
        tu = turn_at(p, e1, e2)
        rv = turn_at(p, p.twin[e2], p.twin[e1])
        assert classify(tu) == classify(rv)
        pairs += 1


def test_walk_format_roundtrip(torus):
    for hes, closed in [((0, 5), True), ((0, 4), False), ((), False)]:
        w = Walk.from_half_edges(torus, hes, closed=closed, start=0)
        txt = write_walk(w)
        w2 = read_walk(txt, torus)
        assert w2 == w
        assert write_walk(w2) == txt


def test_walk_validation(torus):
    with pytest.raises(walkcalc.WalkError):
        Walk.from_half_edges(torus, (), closed=False)  # no start
    p = make_patch(0, radius=1)
    # two non-consecutive half-edges
    h = 0
    g = next(g for g in range(len(p.next)) if p.tail(g) != p.head(h))
    with pytest.raises(walkcalc.WalkError):
        Walk.from_half_edges(p, (h, g))
