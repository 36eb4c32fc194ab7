"""Serre-style multigraphs and covering-map verification.

A graph is a set of directed edges with origin/terminus maps and a
fixed-point-free involution e -> inv(e) pairing each directed edge with its
reverse; loops and parallel edges are first-class.  Girth follows the
convention under which a loop is a closed path of length 1 and a parallel
pair one of length 2, and a path may never traverse inv(e) immediately
after e.
"""

import math
from dataclasses import dataclass

from .errors import GraphConstructionError, InvalidMorphismError

__all__ = ["SerreGraph", "GraphMorphism", "CoveringCheck", "girth", "is_covering"]


class SerreGraph:
    """Immutable multigraph given by parallel edge arrays.

    origin[e], terminus[e], label[e], inv[e] describe directed edge e; the
    involution must satisfy inv(e) != e, inv(inv(e)) == e, and reverse the
    endpoints.  vertex_keys optionally annotates vertices (coset keys), and
    meta carries construction parameters for exports.
    """

    __slots__ = ("num_vertices", "origin", "terminus", "label", "inv",
                 "vertex_keys", "meta", "_links")

    def __init__(self, num_vertices, origin, terminus, inv, label=None,
                 vertex_keys=None, meta=None, validate=True):
        self.num_vertices = num_vertices
        self.origin = list(origin)
        self.terminus = list(terminus)
        self.inv = list(inv)
        self.label = list(label) if label is not None else [-1] * len(self.origin)
        self.vertex_keys = vertex_keys
        self.meta = dict(meta) if meta else {}
        self._links = None
        if validate:
            self._validate()

    def _validate(self):
        ne = len(self.origin)
        if not (len(self.terminus) == len(self.inv) == len(self.label) == ne):
            raise GraphConstructionError("edge arrays have mismatched lengths")
        if ne % 2:
            raise GraphConstructionError("directed edge count must be even")
        if self.vertex_keys is not None and len(self.vertex_keys) != self.num_vertices:
            raise GraphConstructionError("vertex_keys length != num_vertices")
        for e in range(ne):
            if not (0 <= self.origin[e] < self.num_vertices
                    and 0 <= self.terminus[e] < self.num_vertices):
                raise GraphConstructionError(f"edge {e} has endpoint out of range")
            eb = self.inv[e]
            if not 0 <= eb < ne:
                raise GraphConstructionError(f"edge {e} has inverse id out of range")
            if eb == e:
                raise GraphConstructionError(
                    f"involution fixed point at edge {e} "
                    f"({self.origin[e]} -> {self.terminus[e]}): a generator acting "
                    "as its own inverse on this vertex is not representable"
                )
            if self.inv[eb] != e:
                raise GraphConstructionError(f"involution not involutive at edge {e}")
            if self.origin[eb] != self.terminus[e] or self.terminus[eb] != self.origin[e]:
                raise GraphConstructionError(f"involution does not reverse edge {e}")

    @classmethod
    def from_geometric_edges(cls, num_vertices, geom_edges, labels=None):
        """Build from undirected edges (u, v); loops u == v are allowed."""
        origin, terminus, inv, lab = [], [], [], []
        for i, (u, v) in enumerate(geom_edges):
            e = 2 * i
            origin += [u, v]
            terminus += [v, u]
            inv += [e + 1, e]
            gl = labels[i] if labels is not None else -1
            lab += [gl, gl]
        return cls(num_vertices, origin, terminus, inv, lab)

    @property
    def num_edges(self) -> int:
        """Number of directed edges (twice the geometric edge count)."""
        return len(self.origin)

    def links(self):
        """Adjacency index: links()[v] lists the edge ids with origin v."""
        if self._links is None:
            links = [[] for _ in range(self.num_vertices)]
            for e, o in enumerate(self.origin):
                links[o].append(e)
            self._links = links
        return self._links

    def link(self, v: int):
        """All directed edges originating at v; its size is the degree of v."""
        return self.links()[v]

    def degrees(self):
        return [len(lk) for lk in self.links()]

    def connected(self) -> bool:
        if self.num_vertices == 0:
            return True
        seen = [False] * self.num_vertices
        seen[0] = True
        stack = [0]
        links = self.links()
        count = 1
        while stack:
            u = stack.pop()
            for e in links[u]:
                w = self.terminus[e]
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.num_vertices

    def is_bipartite(self):
        """(flag, 2-coloring or None); any loop forces False."""
        color = [-1] * self.num_vertices
        links = self.links()
        for s in range(self.num_vertices):
            if color[s] != -1:
                continue
            color[s] = 0
            queue = [s]
            while queue:
                u = queue.pop()
                cu = color[u]
                for e in links[u]:
                    w = self.terminus[e]
                    if color[w] == -1:
                        color[w] = 1 - cu
                        queue.append(w)
                    elif color[w] == cu:
                        return False, None
        return True, color

    def geometric_loop_count(self) -> int:
        return sum(1 for e in range(self.num_edges) if self.origin[e] == self.terminus[e]) // 2


def girth(g: SerreGraph):
    """Length of the shortest closed path without backtracking.

    1 for a loop, 2 for a parallel geometric pair, math.inf for forests.
    Otherwise BFS from every vertex, tracking parent *edges* so parallel
    edges are handled correctly; each non-tree edge (u, v) closes a walk of
    length dist(u) + dist(v) + 1, and the minimum over all sources is exact.
    """
    ne = g.num_edges
    origin, terminus, inv = g.origin, g.terminus, g.inv
    for e in range(ne):
        if origin[e] == terminus[e]:
            return 1
    seen_pairs = set()
    for e in range(ne):
        if e < inv[e]:
            u, v = origin[e], terminus[e]
            key = (u, v) if u < v else (v, u)
            if key in seen_pairs:
                return 2
            seen_pairs.add(key)
    best = math.inf
    links = g.links()
    nv = g.num_vertices
    dist = [-1] * nv
    parent = [-1] * nv
    for s in range(nv):
        touched = [s]
        dist[s] = 0
        parent[s] = -1
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            du = dist[u]
            if 2 * du >= best:
                break
            skip = inv[parent[u]] if parent[u] >= 0 else -1
            for e in links[u]:
                if e == skip:
                    continue
                w = terminus[e]
                if dist[w] < 0:
                    dist[w] = du + 1
                    parent[w] = e
                    queue.append(w)
                    touched.append(w)
                else:
                    cand = du + dist[w] + 1
                    if cand < best:
                        best = cand
        for v in touched:
            dist[v] = -1
    return best


@dataclass(frozen=True)
class GraphMorphism:
    """Vertex and edge maps between Serre graphs, commuting with o, t, inv."""

    source: SerreGraph
    target: SerreGraph
    vertex_map: tuple
    edge_map: tuple

    def validate(self):
        src, tgt = self.source, self.target
        if len(self.vertex_map) != src.num_vertices or len(self.edge_map) != src.num_edges:
            raise InvalidMorphismError("map lengths do not match the source graph")
        vm, em = self.vertex_map, self.edge_map
        for v in vm:
            if not 0 <= v < tgt.num_vertices:
                raise InvalidMorphismError("vertex map image out of range")
        for e in range(src.num_edges):
            fe = em[e]
            if not 0 <= fe < tgt.num_edges:
                raise InvalidMorphismError("edge map image out of range")
            if tgt.origin[fe] != vm[src.origin[e]] or tgt.terminus[fe] != vm[src.terminus[e]]:
                raise InvalidMorphismError(f"edge {e} does not commute with origin/terminus")
            if em[src.inv[e]] != tgt.inv[fe]:
                raise InvalidMorphismError(f"edge {e} does not commute with the involution")


@dataclass(frozen=True)
class CoveringCheck:
    """Verdict of a covering-map verification, with a witness on failure."""

    ok: bool
    witness: int = -1
    reason: str = ""


def is_covering(f: GraphMorphism) -> CoveringCheck:
    """Whether f is surjective on vertices and bijective on every vertex link.

    Raises InvalidMorphismError if f is not a morphism; otherwise returns a
    verdict carrying a witness vertex when some link map fails to be
    bijective (or some target vertex is missed).
    """
    f.validate()
    src, tgt = f.source, f.target
    hit = [False] * tgt.num_vertices
    for v in f.vertex_map:
        hit[v] = True
    for v, h in enumerate(hit):
        if not h:
            return CoveringCheck(False, v, "vertex map is not surjective")
    em = f.edge_map
    for v in range(src.num_vertices):
        image = sorted(em[e] for e in src.link(v))
        if image != sorted(tgt.link(f.vertex_map[v])):
            return CoveringCheck(False, v, "link map is not bijective")
    return CoveringCheck(True)
