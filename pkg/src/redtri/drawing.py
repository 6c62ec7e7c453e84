"""Graphs drawn into the 1-skeleton of a triangulation.

A drawing sends every graph vertex to a triangulation vertex and every graph
edge to a walk between the images of its endpoints.  It factors through a
simplicial drawing (subdivide long edges) and then through a homomorphism
(contract clusters).
"""

from dataclasses import dataclass

from .walkcalc import Walk, WalkError


class DrawingError(Exception):
    pass


class Graph:
    """Vertices 0..n-1; edges are (u, v) pairs indexed by id.  Loops and
    parallel edges are legal, so edges are always referred to by id."""

    def __init__(self, num_vertices, edges):
        self.num_vertices = num_vertices
        self.edges = tuple(tuple(e) for e in edges)
        for u, v in self.edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise DrawingError("edge endpoint out of range")
        self._incident = [[] for _ in range(num_vertices)]
        for i, (u, v) in enumerate(self.edges):
            self._incident[u].append((i, v))
            if u != v:
                self._incident[v].append((i, u))
            else:
                self._incident[u].append((i, u))

    def incident(self, v):
        """(edge id, other endpoint) pairs; loops appear twice."""
        return self._incident[v]

    def num_edges(self):
        return len(self.edges)


class Drawing:
    """f : G -> T^1.  vertex_map: per G-vertex a T-vertex; edge_map: per
    G-edge a Walk in T from the image of endpoint 0 to the image of
    endpoint 1 (length 0 is legal when the images agree)."""

    def __init__(self, graph, host, vertex_map, edge_map):
        self.graph = graph
        self.host = host
        self.vertex_map = tuple(vertex_map)
        self.edge_map = tuple(edge_map)
        if len(self.vertex_map) != graph.num_vertices:
            raise DrawingError("vertex_map size mismatch")
        if len(self.edge_map) != graph.num_edges():
            raise DrawingError("edge_map size mismatch")
        for i, (u, v) in enumerate(graph.edges):
            w = self.edge_map[i]
            if w.start != self.vertex_map[u] or w.end(host) != self.vertex_map[v]:
                raise DrawingError("edge %d walk endpoints do not match" % i)
            if w.closed:
                raise DrawingError("edge images must be open walks")

    def lengths(self):
        per_edge = tuple(len(w) for w in self.edge_map)
        return per_edge, sum(per_edge)


@dataclass(frozen=True)
class SimplicialDrawing:
    """Subdivided graph with one vertex per unit of image length.

    Vertices 0..n-1 are the original G-vertices; subdivision vertices carry
    (edge id, index) provenance.  Every edge maps to a single half-edge or to
    a vertex (image None).
    """

    graph: object            # the subdivided graph
    host: object
    vertex_map: tuple        # per vertex, a T-vertex
    edge_image: tuple        # per edge, half-edge id or None
    provenance: tuple        # per vertex, None or (G-edge id, index)
    edge_origin: tuple       # per edge, (G-edge id, segment index)
    base_graph: object

    def image_walk(self, base_edge_id):
        hes = []
        for e, (b, _) in enumerate(self.edge_origin):
            if b == base_edge_id and self.edge_image[e] is not None:
                hes.append(self.edge_image[e])
        return hes


def factor_simplicial(f):
    """Subdivide every edge whose image walk has length >= 2."""
    g, t = f.graph, f.host
    vmap = list(f.vertex_map)
    prov = [None] * g.num_vertices
    edges = []
    eimg = []
    eorig = []
    for i, (u, v) in enumerate(g.edges):
        w = f.edge_map[i]
        n = len(w)
        if n == 0:
            edges.append((u, v))
            eimg.append(None)
            eorig.append((i, 0))
            continue
        prev = u
        for j, h in enumerate(w.half_edges):
            if j == n - 1:
                nxt = v
            else:
                nxt = len(vmap)
                vmap.append(t.head(h))
                prov.append((i, j))
            edges.append((prev, nxt))
            eimg.append(h)
            eorig.append((i, j))
            prev = nxt
    gbar = Graph(len(vmap), edges)
    return SimplicialDrawing(gbar, t, tuple(vmap), tuple(eimg), tuple(prov),
                             tuple(eorig), g)


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple        # tuple of sorted vertex tuples
    cluster_of: tuple      # per vertex, cluster index
    spur_edge: tuple       # per cluster, common outgoing half-edge or None

    def is_spur(self, c):
        return self.spur_edge[c] is not None


def clusters_and_spurs(fbar):
    """Maximal connected subgraphs with a constant image, plus spur flags.

    A cluster is a spur when it is not a whole component and all its outgoing
    edges map to the same directed T-edge.
    """
    g = fbar.graph
    parent = list(range(g.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, (u, v) in enumerate(g.edges):
        if fbar.edge_image[e] is None:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    groups = {}
    for v in range(g.num_vertices):
        groups.setdefault(find(v), []).append(v)
    clusters = tuple(tuple(sorted(m)) for _, m in sorted(groups.items()))
    cluster_of = [0] * g.num_vertices
    for c, members in enumerate(clusters):
        for v in members:
            cluster_of[v] = c
    spur = []
    for c, members in enumerate(clusters):
        out = set()
        internal_only = True
        for v in members:
            for e, _ in g.incident(v):
                h = fbar.edge_image[e]
                if h is None:
                    continue
                internal_only = False
                u0, u1 = g.edges[e]
                # orient the image out of the cluster
                if cluster_of[u0] == c:
                    out.add(h)
                if cluster_of[u1] == c:
                    out.add(fbar.host.twin[h])
        if internal_only or len(out) != 1:
            spur.append(None)
        else:
            spur.append(out.pop())
    return ClusterPartition(clusters, tuple(cluster_of), tuple(spur))


@dataclass(frozen=True)
class HomomorphismDrawing:
    graph: object           # the contracted graph
    host: object
    vertex_map: tuple       # per contracted vertex, a T-vertex
    edge_image: tuple       # per edge, a half-edge id (never None)
    clusters: object        # ClusterPartition on the simplicial graph


def factor_homomorphism(fbar):
    cp = clusters_and_spurs(fbar)
    g = fbar.graph
    vmap = []
    for members in cp.clusters:
        vmap.append(fbar.vertex_map[members[0]])
        for v in members:
            if fbar.vertex_map[v] != vmap[-1]:
                raise DrawingError("cluster image not constant")
    edges = []
    eimg = []
    for e, (u, v) in enumerate(g.edges):
        h = fbar.edge_image[e]
        if h is None:
            continue
        edges.append((cp.cluster_of[u], cp.cluster_of[v]))
        eimg.append(h)
    ghat = Graph(len(cp.clusters), edges)
    return HomomorphismDrawing(ghat, fbar.host, tuple(vmap), tuple(eimg), cp)


def unfactor(fbar):
    """Rebuild the plain drawing from a simplicial factorization."""
    g0 = fbar.base_graph
    t = fbar.host
    vmap = fbar.vertex_map[:g0.num_vertices]
    emap = []
    for i, (u, v) in enumerate(g0.edges):
        hes = fbar.image_walk(i)
        emap.append(Walk.from_half_edges(t, hes, start=vmap[u]))
    return Drawing(g0, t, vmap, tuple(emap))


def lengths(f):
    return f.lengths()


# -- DRW v1 text format ----------------------------------------------------

def write_drawing(f, anchor=None):
    lines = []
    for v in range(f.graph.num_vertices):
        lines.append("vertex %d at %d" % (v, f.vertex_map[v]))
    for e, (u, v) in enumerate(f.graph.edges):
        w = f.edge_map[e]
        hes = ",".join(str(h) for h in w.half_edges) if w.half_edges else "-"
        lines.append("edge %d %d %d walk=%s" % (e, u, v, hes))
    if anchor:
        for tv in sorted(anchor):
            order = ",".join(str(g) for g in anchor[tv])
            lines.append("anchor %d order=%s" % (tv, order))
    return "\n".join(lines) + "\n"


def read_drawing(text, host):
    vmap = {}
    edges = []
    walks = []
    anchor = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex":
            if parts[2] != "at":
                raise DrawingError("bad vertex line: %r" % raw)
            vmap[int(parts[1])] = int(parts[3])
        elif parts[0] == "edge":
            e, u, v = int(parts[1]), int(parts[2]), int(parts[3])
            kv = dict(p.split("=", 1) for p in parts[4:])
            hes = [] if kv["walk"] == "-" else [int(x) for x in kv["walk"].split(",")]
            edges.append((u, v))
            walks.append(hes)
        elif parts[0] == "anchor":
            kv = dict(p.split("=", 1) for p in parts[2:])
            anchor[int(parts[1])] = [int(x) for x in kv["order"].split(",")]
        else:
            raise DrawingError("bad line: %r" % raw)
    n = (max(vmap) + 1) if vmap else 0
    vertex_map = [vmap[v] for v in range(n)]
    g = Graph(n, edges)
    emap = []
    for i, hes in enumerate(walks):
        u = g.edges[i][0]
        try:
            emap.append(Walk.from_half_edges(host, hes, start=vertex_map[u]))
        except WalkError as exc:
            raise DrawingError(str(exc))
    f = Drawing(g, host, vertex_map, emap)
    return (f, anchor) if anchor else (f, None)
