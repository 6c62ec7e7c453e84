"""Turn arithmetic and walk reduction on reducing triangulations.

A turn at an interior vertex v measures the clockwise rotation distance from
the slot by which a walk enters (the reversal of its incoming edge) to the
slot by which it leaves.  Turns 0, +1, -1 and +-2 with a red face on the left
of the incoming edge are bad; a walk is reduced when all its turns are good.
"""

from dataclasses import dataclass

from .surface import NO_TWIN, RED

GOOD = "good"
BAD = "bad"


class BoundaryTurnError(Exception):
    """Turns at boundary vertices are rejected."""


class WalkError(Exception):
    pass


class ReductionStalled(Exception):
    """reduce_open revisited a state; the host is not simply connected."""


@dataclass(frozen=True)
class Turn:
    clockwise_steps: int
    degree: int
    subscript: str  # color left of the incoming edge

    @property
    def signed_value(self):
        k = self.clockwise_steps
        return k if 2 * k <= self.degree else k - self.degree

    def __str__(self):
        return "%d_%s" % (self.signed_value, self.subscript)


@dataclass(frozen=True)
class Walk:
    start: int
    half_edges: tuple
    closed: bool

    @classmethod
    def from_half_edges(cls, t, hes, closed=False, start=None):
        hes = tuple(hes)
        for a, b in zip(hes, hes[1:]):
            if t.head(a) != t.tail(b):
                raise WalkError("half-edges %d,%d not consecutive" % (a, b))
        if hes:
            if closed and t.head(hes[-1]) != t.tail(hes[0]):
                raise WalkError("closed walk does not wrap")
            start = t.tail(hes[0])
        elif start is None:
            raise WalkError("empty walk needs a start vertex")
        return cls(start, hes, closed)

    def __len__(self):
        return len(self.half_edges)

    def end(self, t):
        return t.head(self.half_edges[-1]) if self.half_edges else self.start

    def reversed(self, t):
        hes = tuple(t.twin[h] for h in reversed(self.half_edges))
        if any(h == NO_TWIN for h in hes):
            raise WalkError("cannot reverse across a boundary edge")
        return Walk.from_half_edges(t, hes, self.closed, start=self.start)


def corner_positions(w):
    """Corner i sits between edges i-1 and i; closed walks wrap at i = 0."""
    n = len(w.half_edges)
    if w.closed:
        return range(n) if n else range(0)
    return range(1, n)


def turn(t, w, i):
    hes = w.half_edges
    e1 = hes[i - 1] if i > 0 else hes[-1]
    if i == 0 and not w.closed:
        raise WalkError("position 0 of an open walk has no turn")
    e2 = hes[i]
    return turn_at(t, e1, e2)


def turn_at(t, e1, e2):
    v = t.head(e1)
    if t.tail(e2) != v:
        raise WalkError("edges not incident")
    if t.is_boundary_vertex(v):
        raise BoundaryTurnError("turn at boundary vertex %d" % v)
    slots = t.vertex_slots[v]
    d = len(slots)
    enter = t.twin[e1]
    steps = (slots.index(e2) - slots.index(enter)) % d
    return Turn(steps, d, t.color_left(e1))


def classify(turn_):
    k = turn_.signed_value
    if k in (0, 1, -1):
        return BAD
    if abs(k) == 2 and turn_.subscript == RED:
        return BAD
    return GOOD


def is_reduced(t, w):
    return all(classify(turn(t, w, i)) == GOOD for i in corner_positions(w))


def _rewrite(t, e1, e2, k):
    """Replacement edge list for the bad corner (e1, e2) of signed value k."""
    nxt, twn, prv = t.next, t.twin, t.prev
    if k == 0:
        return []
    if k == 1:
        return [twn[nxt[nxt[e1]]]]
    if k == -1:
        return [nxt[twn[e1]]]
    if k == 2:
        return [twn[prv(e1)], twn[nxt[e2]]]
    if k == -2:
        return [nxt[twn[e1]], prv(twn[e2])]
    raise WalkError("not a bad turn: %d" % k)


def _find_bad(t, w):
    """Position of the next corner to rewrite: spurs, then 1-turns, then 2_r."""
    found = {0: None, 1: None, 2: None}
    for i in corner_positions(w):
        tu = turn(t, w, i)
        if classify(tu) == BAD:
            a = abs(tu.signed_value)
            if found[a] is None:
                found[a] = (i, tu.signed_value)
            if a == 0:
                break
    for a in (0, 1, 2):
        if found[a] is not None:
            return found[a]
    return None


def _apply_at(t, w, i, k):
    hes = list(w.half_edges)
    if i == 0:  # wrap corner of a closed walk
        repl = _rewrite(t, hes[-1], hes[0], k)
        hes = hes[1:-1]
        # split the replacement across the wrap: last edge(s) in front
        if len(repl) == 1:
            hes = hes + repl
        elif len(repl) == 2:
            hes = [repl[1]] + hes + [repl[0]]
    else:
        repl = _rewrite(t, hes[i - 1], hes[i], k)
        hes[i - 1:i + 1] = repl
    if hes:
        return Walk.from_half_edges(t, hes, w.closed)
    return Walk(w.start, (), w.closed)


def reduce_open(w, t, budget=None):
    """The reduced walk homotopic to w with the same endpoints.

    Unique on simply connected hosts; raises ReductionStalled if the rewrite
    system revisits a state (which certifies the host is not one).
    """
    if w.closed:
        raise WalkError("reduce_open needs an open walk")
    if budget is None:
        budget = 4 * (len(w) + 1) * (len(t.next) + 1)
    seen = {w.half_edges}
    for _ in range(budget):
        nxt = _find_bad(t, w)
        if nxt is None:
            return w
        w = _apply_at(t, w, *nxt)
        if w.half_edges in seen:
            raise ReductionStalled("state recurred")
        seen.add(w.half_edges)
    raise ReductionStalled("budget exhausted")


@dataclass(frozen=True)
class Reduced:
    walk: object


@dataclass(frozen=True)
class Stalled:
    walk: object
    reason: str  # "cycle" or "budget"


def _canonical(w):
    """Closed walks compare up to cyclic rotation."""
    hes = w.half_edges
    if not hes:
        return hes
    return min(hes[i:] + hes[:i] for i in range(len(hes)))


def reduce_closed(w, t, budget=None):
    if not w.closed:
        raise WalkError("reduce_closed needs a closed walk")
    if budget is None:
        budget = 4 * (len(w) + 1) * (len(t.next) + 1)
    seen = {_canonical(w)}
    for _ in range(budget):
        nxt = _find_bad(t, w)
        if nxt is None:
            return Reduced(w)
        w = _apply_at(t, w, *nxt)
        key = _canonical(w)
        if key in seen:
            return Stalled(w, "cycle")
        seen.add(key)
    return Stalled(w, "budget")


# -- fixtures --------------------------------------------------------------

def torus_stalled_walk(t):
    """A closed torus walk whose homotopy class has no reduced representative.

    On build_torus() this is the east-then-south walk: its class is not a
    power of a single straight direction, while every reduced closed walk on
    this triangulation runs straight (uniformly 3_r or 3_b).
    """
    return Walk.from_half_edges(t, (0, 5), closed=True)


# -- text format -----------------------------------------------------------

def write_walk(w):
    hes = ",".join(str(h) for h in w.half_edges) if w.half_edges else "-"
    return "walk closed=%d start=%d he=%s\n" % (int(w.closed), w.start, hes)


def read_walk(text, t):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "walk":
            raise WalkError("bad walk line: %r" % raw)
        kv = dict(p.split("=", 1) for p in parts[1:])
        closed = kv["closed"] == "1"
        start = int(kv["start"])
        hes = [] if kv["he"] == "-" else [int(x) for x in kv["he"].split(",")]
        return Walk.from_half_edges(t, hes, closed, start=start)
    raise WalkError("no walk line")
