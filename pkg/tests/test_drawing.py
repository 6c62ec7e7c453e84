import random

import pytest

from redtri import drawing, surface
from redtri.drawing import (
    ClusterPartition,
    Drawing,
    DrawingError,
    Graph,
    clusters_and_spurs,
    factor_homomorphism,
    factor_simplicial,
    read_drawing,
    unfactor,
    write_drawing,
)
from redtri.walkcalc import Walk

from conftest import make_patch


def path_drawing(t, hes, cut_points):
    """A path graph drawn along hes, with vertices at the given positions."""
    cuts = [0] + list(cut_points) + [len(hes)]
    verts = []
    v = t.tail(hes[0]) if hes else 0
    pos_vertex = [v] + [t.head(hes[c - 1]) for c in cuts[1:]]
    g = Graph(len(cuts), [(i, i + 1) for i in range(len(cuts) - 1)])
    emap = []
    for i in range(len(cuts) - 1):
        seg = hes[cuts[i]:cuts[i + 1]]
        emap.append(Walk.from_half_edges(t, seg, start=pos_vertex[i]))
    return Drawing(g, t, pos_vertex, emap)


def test_lengths(torus):
    f = path_drawing(torus, [0, 5, 1, 2, 0], [2])
    per, total = f.lengths()
    assert per == (2, 3) and total == 5


def test_constant_drawing_lengths(torus):
    g = Graph(2, [(0, 1)])
    f = Drawing(g, torus, [0, 0], [Walk.from_half_edges(torus, (), start=0)])
    assert f.lengths() == ((0,), 0)


def test_endpoint_mismatch_rejected():
    p = make_patch(0, radius=1)
    g = Graph(2, [(0, 1)])
    h = 0
    u, v = p.tail(h), p.head(h)
    other = next(x for x in range(p.num_vertices) if x not in (u, v))
    with pytest.raises(DrawingError):
        Drawing(g, p, [u, other], [Walk.from_half_edges(p, (h,), start=u)])


def test_factor_simplicial_subdivides(torus):
    f = path_drawing(torus, [0, 5, 1], [])
    fb = factor_simplicial(f)
    # one edge of length 3 gains 2 interior vertices
    assert fb.graph.num_vertices == 2 + 2
    assert fb.graph.num_edges() == 3
    assert fb.provenance[2] == (0, 0) and fb.provenance[3] == (0, 1)
    assert all(h is not None for h in fb.edge_image)


def test_factor_simplicial_short_edges_untouched(torus):
    g = Graph(2, [(0, 1), (1, 1)])
    f = Drawing(g, torus, [0, 0],
                [Walk.from_half_edges(torus, (0,), start=0),
                 Walk.from_half_edges(torus, (), start=0)])
    fb = factor_simplicial(f)
    assert fb.graph.num_vertices == 2
    assert fb.graph.num_edges() == 2
    assert fb.edge_image == (0, None)


def test_factor_simplicial_empty():
    t = surface.build_torus()
    f = Drawing(Graph(0, []), t, [], [])
    fb = factor_simplicial(f)
    assert fb.graph.num_vertices == 0 and fb.graph.num_edges() == 0


def test_unfactor_roundtrip(torus):
    f = path_drawing(torus, [0, 5, 1, 2], [1, 2])
    f2 = unfactor(factor_simplicial(f))
    assert f2.vertex_map == f.vertex_map
    assert [w.half_edges for w in f2.edge_map] == [w.half_edges for w in f.edge_map]


def test_clusters_constant_component(torus):
    g = Graph(3, [(0, 1), (1, 2)])
    f = Drawing(g, torus, [0, 0, 0],
                [Walk.from_half_edges(torus, (), start=0)] * 2)
    fb = factor_simplicial(f)
    cp = clusters_and_spurs(fb)
    assert len(cp.clusters) == 1
    # a whole component is never a spur
    assert not cp.is_spur(0)


def test_clusters_injective_identity(torus):
    f = path_drawing(torus, [0, 5], [1])
    fb = factor_simplicial(f)
    cp = clusters_and_spurs(fb)
    assert len(cp.clusters) == fb.graph.num_vertices
    fh = factor_homomorphism(fb)
    assert fh.graph.num_vertices == fb.graph.num_vertices
    assert fh.graph.num_edges() == fb.graph.num_edges()


def test_spur_detection(torus):
    # star: center cluster of two vertices, all outgoing images = east edge
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    east = Walk.from_half_edges(torus, (0,), start=0)
    f = Drawing(g, torus, [0, 0, 0, 0], [east] * 3)
    fb = factor_simplicial(f)
    cp = clusters_and_spurs(fb)
    c0 = cp.cluster_of[0]
    assert cp.is_spur(c0)
    assert cp.spur_edge[c0] == 0
    # the leaves are spurs too, pointing back along the west direction
    for v in (1, 2, 3):
        c = cp.cluster_of[v]
        assert cp.is_spur(c)
        assert cp.spur_edge[c] == torus.twin[0]


def test_not_spur_with_two_directions(torus):
    g = Graph(3, [(0, 1), (0, 2)])
    f = Drawing(g, torus, [0, 0, 0],
                [Walk.from_half_edges(torus, (0,), start=0),
                 Walk.from_half_edges(torus, (5,), start=0)])
    fb = factor_simplicial(f)
    cp = clusters_and_spurs(fb)
    c0 = cp.cluster_of[0]
    assert not cp.is_spur(c0)


def test_cluster_partition_matches_bruteforce(torus):
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randrange(2, 6)
        edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(n)]
        g = Graph(n, edges)
        emap = []
        vmap = [0] * n
        for u, v in edges:
            if rng.random() < 0.5:
                emap.append(Walk.from_half_edges(torus, (), start=0))
            else:
                emap.append(Walk.from_half_edges(torus, (rng.choice((0, 1, 5)),),
                                                 start=0))
        f = Drawing(g, torus, vmap, emap)
        fb = factor_simplicial(f)
        cp = clusters_and_spurs(fb)
        # brute force: flood fill over image-less edges
        n2 = fb.graph.num_vertices
        comp = list(range(n2))
        changed = True
        while changed:
            changed = False
            for e, (u, v) in enumerate(fb.graph.edges):
                if fb.edge_image[e] is None and comp[u] != comp[v]:
                    m = min(comp[u], comp[v])
                    comp[u] = comp[v] = m
                    changed = True
        groups = {}
        for v in range(n2):
            r = comp[v]
            while comp[r] != r:
                r = comp[r]
            groups.setdefault(r, set()).add(v)
        want = sorted(tuple(sorted(s)) for s in groups.values())
        assert sorted(cp.clusters) == want


def test_homomorphism_edges_map_to_edges(torus):
    f = path_drawing(torus, [0, 5, 1, 2], [2])
    fh = factor_homomorphism(factor_simplicial(f))
    assert all(h is not None for h in fh.edge_image)
    for e, (u, v) in enumerate(fh.graph.edges):
        h = fh.edge_image[e]
        assert fh.vertex_map[u] == torus.tail(h)
        assert fh.vertex_map[v] == torus.head(h)


def test_adjacent_same_image_merge(torus):
    g = Graph(2, [(0, 1)])
    f = Drawing(g, torus, [0, 0], [Walk.from_half_edges(torus, (), start=0)])
    fh = factor_homomorphism(factor_simplicial(f))
    assert fh.graph.num_vertices == 1
    assert fh.graph.num_edges() == 0


def test_drw_roundtrip(torus):
    f = path_drawing(torus, [0, 5, 1], [1])
    txt = write_drawing(f)
    f2, anchor = read_drawing(txt, torus)
    assert anchor is None
    assert write_drawing(f2) == txt


def test_drw_anchor_roundtrip(torus):
    f = path_drawing(torus, [0, 5], [1])
    txt = write_drawing(f, anchor={0: [1, 0]})
    f2, anchor = read_drawing(txt, torus)
    assert anchor == {0: [1, 0]}
    assert write_drawing(f2, anchor) == txt
