"""Infinite multigraph families given by pure neighbor-generation rules.

A graph here is never materialized: a :class:`GraphRule` knows how to list
the edges incident to any vertex, plus a little symmetry metadata (degree,
one representative per vertex orbit).  Vertices are canonical integer tuples
so that equality, hashing and ordering are cheap in enumeration hot loops.
Parallel edges are first class: an :class:`EdgeRef` carries a parallel index
below the multiplicity of its endpoint pair.

Built-in families
-----------------
``ladder``        doubly-infinite ladder, cubic, vertex-transitive, simple.
``hex``           honeycomb tiling, cubic, vertex-transitive, simple.
``loop:D``        integer line with alternating single edges and bundles of
                  D-1 parallel edges; D-regular, vertex-transitive.
``tree:D``        D-regular infinite tree.
``decor3``        line decorated at every integer with a K4-with-subdivided-
                  edge gadget hung from a cut vertex; cubic, quasi-transitive,
                  subexponential walk growth.
``decor4``        line decorated with a (K5 minus an edge) gadget attached by
                  its two degree-deficient vertices; 4-regular counterpart.
``interp:D:L``    D-regular tree whose edges are replaced by length-L chains
                  of loop-graph units; interpolates between tree-like and
                  loop-like walk growth.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

VertexId = tuple

BOUNDARY = ("#boundary",)


class GraphError(ValueError):
    """Malformed vertex, edge, or family specification."""


class EdgeRef(NamedTuple):
    """Undirected edge: endpoint pair in sorted order plus a parallel index."""

    u: VertexId
    v: VertexId
    k: int

    def other(self, w: VertexId) -> VertexId:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise GraphError(f"vertex {w!r} is not an endpoint of {self!r}")

    def touches(self, w: VertexId) -> bool:
        return w == self.u or w == self.v


class DirectedEdge(NamedTuple):
    """An edge seen from one of its endpoints (colors live on these)."""

    tail: VertexId
    edge: EdgeRef

    @property
    def head(self) -> VertexId:
        return self.edge.other(self.tail)


def make_edge(a: VertexId, b: VertexId, k: int = 0) -> EdgeRef:
    if a == b:
        raise GraphError("loopless graphs only: endpoints must differ")
    return EdgeRef(a, b, k) if a < b else EdgeRef(b, a, k)


class GraphRule:
    """Pure neighbor generator for one infinite, connected, regular multigraph.

    Subclasses implement :meth:`neighbor_bundles` (targets with edge
    multiplicities, in a fixed deterministic order) and vertex validation /
    formatting.  Everything else -- edge-level neighbor lists, balls,
    symmetry auditing -- is derived here.
    """

    name: str = "?"
    spec: str = "?"
    degree: int = 0
    vertex_transitive: bool = False
    is_simple: bool = True
    # Theorem coverage flags used by the bound checker: whether the
    # sqrt(degree-1) lower bound is known to apply, and whether the family
    # contains a cycle (so the strict upper bound can be witnessed).
    lower_bound_applies: bool = True
    has_cycle: bool = True

    orbit_reps: tuple[VertexId, ...] = ()

    @property
    def root(self) -> VertexId:
        return self.orbit_reps[0]

    # -- family-specific ---------------------------------------------------

    def neighbor_bundles(self, v: VertexId) -> list[tuple[VertexId, int]]:
        """All neighbors of ``v`` as (target, multiplicity), fixed order."""
        raise NotImplementedError

    def contains(self, v: VertexId) -> bool:
        raise NotImplementedError

    def format_vertex(self, v: VertexId) -> str:
        return ",".join(str(c) for c in v)

    def parse_vertex(self, text: str) -> VertexId:
        try:
            v = tuple(int(c) for c in text.split(","))
        except ValueError:
            raise GraphError(f"{self.name}: cannot parse vertex {text!r}")
        self.check_vertex(v)
        return v

    # -- derived -----------------------------------------------------------

    def check_vertex(self, v: VertexId) -> None:
        if not self.contains(v):
            raise GraphError(f"{self.name}: {v!r} is not a vertex of this family")

    def neighbors(self, v: VertexId) -> list[tuple[EdgeRef, VertexId]]:
        """All incident edges with multiplicity, deterministic order."""
        self.check_vertex(v)
        out = []
        for target, mult in self.neighbor_bundles(v):
            for k in range(mult):
                out.append((make_edge(v, target, k), target))
        return out

    def edge_between(self, a: VertexId, b: VertexId, k: int = 0) -> EdgeRef:
        """The k-th parallel edge joining ``a`` and ``b``; checks existence."""
        self.check_vertex(a)
        for target, mult in self.neighbor_bundles(a):
            if target == b:
                if k >= mult:
                    raise GraphError(
                        f"{self.name}: pair ({a!r},{b!r}) has multiplicity {mult}, "
                        f"no parallel index {k}")
                return make_edge(a, b, k)
        raise GraphError(f"{self.name}: {a!r} and {b!r} are not adjacent")

    def format_edge(self, e: EdgeRef) -> str:
        return f"{self.format_vertex(e.u)}~{self.format_vertex(e.v)}#{e.k}"

    def parse_edge(self, text: str) -> EdgeRef:
        body, _, idx = text.partition("#")
        a, _, b = body.partition("~")
        if not b:
            raise GraphError(f"cannot parse edge spec {text!r} (want 'u~v#k')")
        return self.edge_between(self.parse_vertex(a), self.parse_vertex(b),
                                 int(idx) if idx else 0)


@dataclass
class BallGraph:
    """Finite radius-n ball with one boundary super-vertex.

    ``vertices`` lists interior vertices in BFS discovery order; index
    ``len(vertices)`` denotes the boundary vertex absorbing every edge that
    exits the ball, multiplicities preserved.
    """

    rule: GraphRule
    center: VertexId
    radius: int
    vertices: list[VertexId]
    distance: list[int]
    bundles: dict[tuple[int, int], int]          # (i, j) with i < j -> multiplicity
    boundary_targets: list[tuple[int, VertexId, int]]  # (interior i, outside vertex, mult)

    @property
    def boundary_index(self) -> int:
        return len(self.vertices)

    @property
    def boundary_edge_count(self) -> int:
        return sum(m for _, _, m in self.boundary_targets)

    def index_of(self, v: VertexId) -> int:
        return self.vertices.index(v)

    def label(self, i: int) -> str:
        if i == self.boundary_index:
            return "boundary"
        return self.rule.format_vertex(self.vertices[i])


def ball(rule: GraphRule, v: VertexId, n: int) -> BallGraph:
    """BFS ball of radius ``n`` around ``v`` with identified boundary."""
    if n < 1:
        raise GraphError("ball radius must be >= 1")
    rule.check_vertex(v)
    order = [v]
    dist = {v: 0}
    queue = deque([v])
    while queue:
        w = queue.popleft()
        if dist[w] == n:
            continue
        for target, _ in rule.neighbor_bundles(w):
            if target not in dist:
                dist[target] = dist[w] + 1
                order.append(target)
                queue.append(target)
    index = {w: i for i, w in enumerate(order)}
    boundary = len(order)
    bundles: dict[tuple[int, int], int] = {}
    boundary_targets = []
    for w in order:
        i = index[w]
        for target, mult in rule.neighbor_bundles(w):
            j = index.get(target)
            if j is None:
                boundary_targets.append((i, target, mult))
            elif i < j:
                bundles[(i, j)] = mult
    # interior bundle map collects each pair once; edges to the boundary are
    # kept per outside target so reports can name the absorbed endpoints
    merged: dict[tuple[int, int], int] = dict(bundles)
    for i, _, mult in boundary_targets:
        key = (i, boundary)
        merged[key] = merged.get(key, 0) + mult
    return BallGraph(rule=rule, center=v, radius=n, vertices=order,
                     distance=[dist[w] for w in order], bundles=merged,
                     boundary_targets=boundary_targets)


@dataclass
class SymmetryReport:
    ok: bool
    checked_vertices: int
    message: str = "ok"
    witness: VertexId | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_symmetry(rule: GraphRule, sample_radius: int) -> SymmetryReport:
    """Audit the neighbor rule within ``sample_radius`` of every orbit rep.

    Checks edge symmetry (each edge yielded at one endpoint is yielded with
    the same parallel index at the other), declared degree, and determinism
    of repeated calls.
    """
    if sample_radius < 1:
        raise GraphError("sample_radius must be >= 1")
    seen: set[VertexId] = set()
    for rep in rule.orbit_reps:
        queue = deque([(rep, 0)])
        seen.add(rep)
        while queue:
            v, d = queue.popleft()
            nbrs = rule.neighbors(v)
            if nbrs != rule.neighbors(v):
                return SymmetryReport(False, len(seen),
                                      f"neighbor order not deterministic at {v!r}", v)
            if len(nbrs) != rule.degree:
                return SymmetryReport(
                    False, len(seen),
                    f"degree {len(nbrs)} != declared {rule.degree} at {v!r}", v)
            if rule.is_simple and len({t for _, t in nbrs}) != len(nbrs):
                return SymmetryReport(False, len(seen),
                                      f"parallel edges in simple family at {v!r}", v)
            for e, target in nbrs:
                if target == v:
                    return SymmetryReport(False, len(seen), f"loop at {v!r}", v)
                back = rule.neighbors(target)
                if (e, v) not in back:
                    return SymmetryReport(
                        False, len(seen),
                        f"edge {e!r} seen from {v!r} missing at {target!r}", v)
                if d < sample_radius and target not in seen:
                    seen.add(target)
                    queue.append((target, d + 1))
    return SymmetryReport(True, len(seen))


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------


class Ladder(GraphRule):
    """Doubly-infinite ladder: vertices (x, rail) with rail in {0, 1}."""

    name = "ladder"
    spec = "ladder"
    degree = 3
    vertex_transitive = True
    is_simple = True
    orbit_reps = ((0, 0),)

    def contains(self, v):
        return len(v) == 2 and isinstance(v[0], int) and v[1] in (0, 1)

    def neighbor_bundles(self, v):
        x, r = v
        return [((x - 1, r), 1), ((x + 1, r), 1), ((x, 1 - r), 1)]


class Hexagonal(GraphRule):
    """Honeycomb tiling in axial coordinates (x, y, sublattice)."""

    name = "hex"
    spec = "hex"
    degree = 3
    vertex_transitive = True
    is_simple = True
    orbit_reps = ((0, 0, 0),)

    def contains(self, v):
        return (len(v) == 3 and isinstance(v[0], int) and isinstance(v[1], int)
                and v[2] in (0, 1))

    def neighbor_bundles(self, v):
        x, y, s = v
        if s == 0:
            return [((x, y, 1), 1), ((x - 1, y, 1), 1), ((x, y - 1, 1), 1)]
        return [((x, y, 0), 1), ((x + 1, y, 0), 1), ((x, y + 1, 0), 1)]


class LoopGraph(GraphRule):
    """Integer line: single edge 2k-1 ~ 2k, degree-1 parallel edges 2k ~ 2k+1."""

    vertex_transitive = True

    def __init__(self, delta: int):
        if delta < 2:
            raise GraphError("loop graph needs degree >= 2")
        self.delta = delta
        self.degree = delta
        self.name = f"loop:{delta}"
        self.spec = self.name
        self.is_simple = delta == 2
        self.has_cycle = delta >= 3  # a parallel pair is a 2-cycle
        self.orbit_reps = ((0,),)

    @staticmethod
    def _pair_mult(a: int, delta: int) -> int:
        # multiplicity of the pair (a, a+1): bundles sit on even-odd pairs
        return delta - 1 if a % 2 == 0 else 1

    def contains(self, v):
        return len(v) == 1 and isinstance(v[0], int)

    def neighbor_bundles(self, v):
        (x,) = v
        return [((x - 1,), self._pair_mult(x - 1, self.delta)),
                ((x + 1,), self._pair_mult(x, self.delta))]


class Tree(GraphRule):
    """D-regular infinite tree; vertices are root-relative child words."""

    vertex_transitive = True
    is_simple = True
    has_cycle = False

    def __init__(self, delta: int):
        if delta < 2:
            raise GraphError("tree needs degree >= 2")
        self.delta = delta
        self.degree = delta
        self.name = f"tree:{delta}"
        self.spec = self.name
        self.orbit_reps = ((),)

    def contains(self, v):
        if not isinstance(v, tuple):
            return False
        if not v:
            return True
        limit = self.delta
        for depth, c in enumerate(v):
            top = limit if depth == 0 else limit - 1
            if not isinstance(c, int) or not 0 <= c < top:
                return False
        return True

    def neighbor_bundles(self, v):
        children = self.delta if not v else self.delta - 1
        out = []
        if v:
            out.append((v[:-1], 1))
        out.extend((v + (c,), 1) for c in range(children))
        return out

    def format_vertex(self, v):
        return "root" if not v else ".".join(str(c) for c in v)

    def parse_vertex(self, text):
        if text in ("root", ""):
            return ()
        try:
            v = tuple(int(c) for c in text.split("."))
        except ValueError:
            raise GraphError(f"{self.name}: cannot parse vertex {text!r}")
        self.check_vertex(v)
        return v


class DecoratedLine(GraphRule):
    """Line with a finite gadget at every integer; walk growth is polynomial.

    Cubic flavor: gadget is K4 with one edge subdivided; the subdivision
    vertex s is joined to the line vertex and is a cut vertex, so a walk that
    enters a gadget can never leave it.  Quartic flavor: gadget is K5 minus
    the edge {a, b}, with both a and b joined to the line vertex v; a walk
    entering through a cannot exit through b without revisiting v.  Either
    way only the two line directions support unbounded walks.

    Vertices are (x, slot): slot 0 is the line vertex, slots 1.. are the
    gadget vertices at position x.
    """

    vertex_transitive = False
    is_simple = True
    lower_bound_applies = False

    #: slot adjacency inside one gadget, plus which slots touch the line vertex
    _gadget_edges: tuple[tuple[int, int], ...] = ()
    _line_slots: tuple[int, ...] = ()

    def __init__(self):
        adj: dict[int, list[int]] = {}
        for a, b in self._gadget_edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        for s in self._line_slots:
            adj.setdefault(s, []).append(0)
            adj.setdefault(0, []).append(s)
        self._slot_adj = {s: tuple(sorted(t)) for s, t in adj.items()}
        self._nslots = max(self._slot_adj) + 1

    def contains(self, v):
        return (len(v) == 2 and isinstance(v[0], int)
                and isinstance(v[1], int) and 0 <= v[1] < self._nslots)

    def neighbor_bundles(self, v):
        x, slot = v
        if slot == 0:
            out = [((x - 1, 0), 1), ((x + 1, 0), 1)]
            out.extend(((x, s), 1) for s in self._line_slots)
            return out
        return [((x, t), 1) for t in self._slot_adj[slot]]


class DecoratedLine3(DecoratedLine):
    # slots: 1 = subdivision vertex s, 2 = a, 3 = b, 4 = c, 5 = d;
    # gadget = K4 on {a,b,c,d} with edge {a,b} replaced by the path a-s-b
    name = "decor3"
    spec = "decor3"
    degree = 3
    _gadget_edges = ((1, 2), (1, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5))
    _line_slots = (1,)
    orbit_reps = ((0, 0), (0, 1), (0, 2), (0, 4))


class DecoratedLine4(DecoratedLine):
    # slots: 1 = a, 2 = b, 3 = c, 4 = d, 5 = e; gadget = K5 minus {a,b}
    name = "decor4"
    spec = "decor4"
    degree = 4
    _gadget_edges = ((1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5),
                     (3, 4), (3, 5), (4, 5))
    _line_slots = (1, 2)
    orbit_reps = ((0, 0), (0, 1), (0, 3))


class TreeLoopInterpolation(GraphRule):
    """D-regular tree with every edge replaced by a chain of loop-graph units.

    A chain carries L bundles of D-1 parallel edges separated by single
    edges, with a single edge at both ends so branch vertices keep degree D:
    segment j of a chain (j = 1 .. 2L+1) has multiplicity D-1 for even j and
    1 for odd j.  Walk growth per chain-plus-branch period of 2L+1 steps is
    (D-1)^(L+1), between loop-graph-like and tree-like rates.

    Vertices: branch vertices are (0, *word); chain interiors are
    (1, pos, child, *word) with pos in 1..2L and word the chain's branch-side
    tree word.
    """

    vertex_transitive = False

    def __init__(self, delta: int, segment_length: int):
        if delta < 2:
            raise GraphError("interpolation family needs degree >= 2")
        if segment_length < 1:
            raise GraphError("segment length must be >= 1")
        self.delta = delta
        self.segment_length = segment_length
        self.degree = delta
        self.name = f"interp:{delta}:{segment_length}"
        self.spec = self.name
        self.is_simple = delta == 2
        self.has_cycle = delta >= 3
        # orbits: all branch vertices, then chain positions p ~ 2L+1-p
        self.orbit_reps = ((0,),) + tuple(
            (1, p, 0) for p in range(1, segment_length + 1))

    def _word_ok(self, word: tuple) -> bool:
        for depth, c in enumerate(word):
            top = self.delta if depth == 0 else self.delta - 1
            if not isinstance(c, int) or not 0 <= c < top:
                return False
        return True

    def contains(self, v):
        if not v or v[0] not in (0, 1):
            return False
        if v[0] == 0:
            return self._word_ok(v[1:])
        if len(v) < 3:
            return False
        _, pos, child = v[0], v[1], v[2]
        word = v[3:]
        if not 1 <= pos <= 2 * self.segment_length:
            return False
        top = self.delta if not word else self.delta - 1
        return isinstance(child, int) and 0 <= child < top and self._word_ok(word)

    def _seg_mult(self, j: int) -> int:
        return 1 if j % 2 == 1 else self.delta - 1

    def neighbor_bundles(self, v):
        top = 2 * self.segment_length + 1
        if v[0] == 0:
            word = v[1:]
            out = []
            if word:
                # deepest chain position of the parent chain, via the closing
                # single edge of that chain
                out.append(((1, top - 1, word[-1]) + word[:-1], 1))
            children = self.delta if not word else self.delta - 1
            out.extend(((1, 1, c) + word, 1) for c in range(children))
            return out
        _, pos, child = v[0], v[1], v[2]
        word = v[3:]
        out = []
        if pos == 1:
            out.append(((0,) + word, self._seg_mult(1)))
        else:
            out.append(((1, pos - 1, child) + word, self._seg_mult(pos)))
        if pos == top - 1:
            out.append(((0,) + word + (child,), self._seg_mult(top)))
        else:
            out.append(((1, pos + 1, child) + word, self._seg_mult(pos + 1)))
        return out

    def format_vertex(self, v):
        if v[0] == 0:
            word = v[1:]
            return "root" if not word else ".".join(str(c) for c in word)
        word = ".".join(str(c) for c in v[3:]) or "root"
        return f"{word}/{v[2]}/{v[1]}"

    def parse_vertex(self, text):
        if "/" in text:
            parts = text.split("/")
            if len(parts) != 3:
                raise GraphError(f"{self.name}: cannot parse vertex {text!r}")
            word_s, child_s, pos_s = parts
            word = () if word_s in ("root", "") else tuple(
                int(c) for c in word_s.split("."))
            v = (1, int(pos_s), int(child_s)) + word
        elif text in ("root", ""):
            v = (0,)
        else:
            v = (0,) + tuple(int(c) for c in text.split("."))
        self.check_vertex(v)
        return v


# ---------------------------------------------------------------------------
# family specification strings
# ---------------------------------------------------------------------------

FAMILY_GRAMMAR = "ladder | hex | loop:D | tree:D | decor3 | decor4 | interp:D:L"


def parse_family(spec: str) -> GraphRule:
    """Build a rule from its CLI specification string."""
    parts = spec.split(":")
    head = parts[0]
    try:
        if head == "ladder" and len(parts) == 1:
            return Ladder()
        if head == "hex" and len(parts) == 1:
            return Hexagonal()
        if head == "decor3" and len(parts) == 1:
            return DecoratedLine3()
        if head == "decor4" and len(parts) == 1:
            return DecoratedLine4()
        if head == "loop" and len(parts) == 2:
            return LoopGraph(int(parts[1]))
        if head == "tree" and len(parts) == 2:
            return Tree(int(parts[1]))
        if head == "interp" and len(parts) == 3:
            return TreeLoopInterpolation(int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise GraphError(f"bad family spec {spec!r}; grammar: {FAMILY_GRAMMAR}")
