"""Ordered DAGs, ordered undirected graphs and order-preserving homomorphisms.

Vertices are identified by their position in the total order; ``Vertex.id``
is that position and ``Vertex.label`` a display name.  Every function that
takes a vertex accepts a :class:`Vertex`, its integer id or its label.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import GraphError, LimitExceededError, UnknownVertexError

DEFAULT_MAX_CLIQUE_VERTICES = 20

VertexRef = Union["Vertex", int, str]


@dataclass(frozen=True, order=True)
class Vertex:
    id: int
    label: str

    def __str__(self) -> str:
        return self.label


def _make_vertices(labels: Iterable[str]) -> tuple[Vertex, ...]:
    vs = tuple(Vertex(i, str(lab)) for i, lab in enumerate(labels))
    names = [v.label for v in vs]
    if len(set(names)) != len(names):
        raise GraphError(f"duplicate vertex labels in {names}")
    return vs


@dataclass(frozen=True)
class _OrderedGraph:
    vertices: tuple[Vertex, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        for i, v in enumerate(self.vertices):
            if v.id != i:
                raise GraphError(f"vertex ids must be 0..n-1 in order, got {v!r} at {i}")
        labels = [v.label for v in self.vertices]
        if len(set(labels)) != len(labels):
            raise GraphError(f"duplicate vertex labels in {labels}")
        object.__setattr__(self, "_index", {v.label: v.id for v in self.vertices})

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.vertices)

    def vid(self, v: VertexRef) -> int:
        """Resolve a vertex reference to its id."""
        if isinstance(v, Vertex):
            if v.id < len(self.vertices) and self.vertices[v.id] == v:
                return v.id
            raise UnknownVertexError(v)
        if isinstance(v, bool):
            raise UnknownVertexError(v)
        if isinstance(v, int):
            if 0 <= v < len(self.vertices):
                return v
            raise UnknownVertexError(v)
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def vertex(self, v: VertexRef) -> Vertex:
        return self.vertices[self.vid(v)]

    def label(self, v: VertexRef) -> str:
        return self.vertices[self.vid(v)].label


@dataclass(frozen=True)
class OrderedDag(_OrderedGraph):
    """A DAG whose edges all point forward in the vertex order."""

    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        super().__post_init__()
        n = len(self.vertices)
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) refers to an unknown vertex")
            if u >= v:
                raise GraphError(
                    f"edge {self.vertices[u].label}->{self.vertices[v].label} "
                    "does not respect the vertex order"
                )
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_labels(cls, labels: Sequence[str], edges: Iterable[tuple[str, str]] = ()) -> OrderedDag:
        vs = _make_vertices(labels)
        index = {v.label: v.id for v in vs}
        try:
            es = frozenset((index[a], index[b]) for a, b in edges)
        except KeyError as exc:
            raise UnknownVertexError(exc.args[0]) from None
        return cls(vs, es)

    def has_edge(self, u: VertexRef, v: VertexRef) -> bool:
        return (self.vid(u), self.vid(v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def skeleton(self) -> OrderedUGraph:
        """The undirected graph with the same adjacency."""
        return OrderedUGraph(self.vertices, frozenset(frozenset(e) for e in self.edges))


@dataclass(frozen=True)
class OrderedUGraph(_OrderedGraph):
    edges: frozenset[frozenset[int]] = frozenset()

    def __post_init__(self) -> None:
        super().__post_init__()
        n = len(self.vertices)
        edges = frozenset(frozenset(int(x) for x in e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise GraphError(f"undirected edge {sorted(e)} must join two distinct vertices")
            if not all(0 <= x < n for x in e):
                raise GraphError(f"edge {sorted(e)} refers to an unknown vertex")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_labels(cls, labels: Sequence[str], edges: Iterable[tuple[str, str]] = ()) -> OrderedUGraph:
        vs = _make_vertices(labels)
        index = {v.label: v.id for v in vs}
        try:
            es = frozenset(frozenset((index[a], index[b])) for a, b in edges)
        except KeyError as exc:
            raise UnknownVertexError(exc.args[0]) from None
        return cls(vs, es)

    def has_edge(self, u: VertexRef, v: VertexRef) -> bool:
        return frozenset((self.vid(u), self.vid(v))) in self.edges

    def neighbours(self, v: VertexRef) -> list[int]:
        i = self.vid(v)
        return sorted(x for e in self.edges if i in e for x in e if x != i)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


Graph = Union[OrderedDag, OrderedUGraph]


def parents(g: OrderedDag, v: VertexRef) -> list[Vertex]:
    """All ``u`` with an edge ``u -> v``, in vertex order."""
    i = g.vid(v)
    return [g.vertices[u] for u in sorted(u for u, w in g.edges if w == i)]


def parent_ids(g: OrderedDag, v: VertexRef) -> tuple[int, ...]:
    i = g.vid(v)
    return tuple(sorted(u for u, w in g.edges if w == i))


def children_ids(g: OrderedDag, v: VertexRef) -> tuple[int, ...]:
    i = g.vid(v)
    return tuple(sorted(w for u, w in g.edges if u == i))


def enumerate_cliques(
    h: OrderedUGraph, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES
) -> list[tuple[Vertex, ...]]:
    """Every non-empty complete vertex subset, singletons included.

    Cliques are returned with their vertices in order and the list is sorted
    lexicographically by vertex ids.  Enumeration is exponential, so graphs
    with more than ``max_vertices`` vertices are refused.
    """
    n = len(h)
    if n > max_vertices:
        raise LimitExceededError(
            f"clique enumeration capped at {max_vertices} vertices, graph has {n}"
        )
    adj = [set() for _ in range(n)]
    for e in h.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)

    found: list[tuple[int, ...]] = []

    def extend(clique: tuple[int, ...], candidates: list[int]) -> None:
        for k, c in enumerate(candidates):
            grown = clique + (c,)
            found.append(grown)
            extend(grown, [d for d in candidates[k + 1:] if d in adj[c]])

    extend((), list(range(n)))
    found.sort()
    return [tuple(h.vertices[i] for i in c) for c in found]


def clique_ids(h: OrderedUGraph, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> list[tuple[int, ...]]:
    return [tuple(v.id for v in c) for c in enumerate_cliques(h, max_vertices)]


def moralise_graph(g: OrderedDag) -> OrderedUGraph:
    """Forget edge directions and marry every pair of co-parents."""
    edges = {frozenset(e) for e in g.edges}
    for v in range(len(g)):
        for a, b in combinations(parent_ids(g, v), 2):
            edges.add(frozenset((a, b)))
    return OrderedUGraph(g.vertices, frozenset(edges))


def triangulate_graph(h: OrderedUGraph) -> OrderedDag:
    """Order-driven triangulation.

    ``v -> w`` iff ``v < w`` and some path ``v - w1 - ... - wn = w`` has all
    ``wi >= w``.  Computed per target ``w`` by flooding the subgraph induced
    on ``{u >= w}`` from ``w``; the parents are the smaller neighbours of the
    flooded region.
    """
    n = len(h)
    adj = [set() for _ in range(n)]
    for e in h.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    edges = set()
    for w in range(n):
        region = {w}
        stack = [w]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y > w and y not in region:
                    region.add(y)
                    stack.append(y)
        for x in region:
            for v in adj[x]:
                if v < w:
                    edges.add((v, w))
    return OrderedDag(h.vertices, frozenset(edges))


def satisfies_triangulated_property(g: OrderedDag) -> bool:
    """``u, v -> w`` and ``u < v`` implies ``u -> v``."""
    for w in range(len(g)):
        for u, v in combinations(parent_ids(g, w), 2):
            if (u, v) not in g.edges:
                return False
    return True


def is_chordal(h: Graph) -> bool:
    """True iff every cycle of length >= 4 has a chord.

    Uses simplicial-vertex elimination: a graph is chordal exactly when its
    vertices can be removed one by one, each being simplicial (neighbourhood
    complete) at removal time.
    """
    if isinstance(h, OrderedDag):
        h = h.skeleton()
    adj = {i: set() for i in range(len(h))}
    for e in h.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    while adj:
        for x in sorted(adj):
            nb = adj[x]
            if all(b in adj[a] for a, b in combinations(nb, 2)):
                for y in nb:
                    adj[y].discard(x)
                del adj[x]
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GraphHom:
    """An order-preserving graph homomorphism given by a vertex map.

    Two source vertices may collapse onto one target vertex; an edge between
    them is then considered respected.
    """

    source: Graph
    target: Graph
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", tuple(int(x) for x in self.mapping))
        if type(self.source) is not type(self.target):
            raise GraphError("homomorphism must join graphs of the same kind")
        if len(self.mapping) != len(self.source):
            raise GraphError("vertex map must be total on the source")
        m = len(self.target)
        if not all(0 <= x < m for x in self.mapping):
            raise GraphError("vertex map leaves the target graph")
        problems = hom_violations(self.source, self.target, self.mapping)
        if problems:
            raise GraphError("; ".join(problems))

    @classmethod
    def from_labels(cls, source: Graph, target: Graph, mapping: dict[str, str]) -> GraphHom:
        table = [0] * len(source)
        for v in source.vertices:
            try:
                table[v.id] = target.vid(mapping[v.label])
            except KeyError:
                raise GraphError(f"vertex map undefined on {v.label}") from None
        return cls(source, target, tuple(table))

    @classmethod
    def identity(cls, g: Graph) -> GraphHom:
        return cls(g, g, tuple(range(len(g))))

    @classmethod
    def contraction(cls, g: Graph) -> GraphHom:
        """The unique map onto the one-vertex graph."""
        point = type(g).from_labels(["*"])
        return cls(g, point, (0,) * len(g))

    def __call__(self, v: VertexRef) -> int:
        return self.mapping[self.source.vid(v)]

    def preimage(self, w: VertexRef) -> tuple[int, ...]:
        j = self.target.vid(w)
        return tuple(i for i, x in enumerate(self.mapping) if x == j)


def hom_violations(source: Graph, target: Graph, mapping: Sequence[int]) -> list[str]:
    """Reasons (possibly none) why ``mapping`` is not an order-preserving homomorphism."""
    out = []
    for i in range(len(source) - 1):
        if mapping[i] > mapping[i + 1]:
            out.append(
                f"order not preserved: {source.vertices[i].label} < {source.vertices[i + 1].label} "
                f"but images {target.vertices[mapping[i]].label} > {target.vertices[mapping[i + 1]].label}"
            )
    for e in source.edges:
        a, b = sorted(e) if isinstance(source, OrderedUGraph) else e
        x, y = mapping[a], mapping[b]
        if x == y:
            continue
        ok = (x, y) in target.edges if isinstance(target, OrderedDag) else frozenset((x, y)) in target.edges
        if not ok:
            out.append(
                f"edge {source.vertices[a].label}-{source.vertices[b].label} maps to non-edge "
                f"{target.vertices[x].label}-{target.vertices[y].label}"
            )
    return out


def is_valid_hom(source: Graph, target: Graph, mapping: Sequence[int]) -> bool:
    if type(source) is not type(target) or len(mapping) != len(source):
        return False
    if not all(0 <= x < len(target) for x in mapping):
        return False
    return not hom_violations(source, target, mapping)


def hom_compose(a: GraphHom, b: GraphHom) -> GraphHom:
    """``b`` after ``a`` (first apply ``a``, then ``b``)."""
    if a.target != b.source:
        raise GraphError("cannot compose: target of the first map is not the source of the second")
    mapping = tuple(b.mapping[x] for x in a.mapping)
    assert all(mapping[i] <= mapping[i + 1] for i in range(len(mapping) - 1))
    return GraphHom(a.source, b.target, mapping)


def to_dot(g: Graph, name: str = "G") -> str:
    """Render as Graphviz DOT with vertices and edges in order."""
    directed = isinstance(g, OrderedDag)
    arrow = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {_dot_id(name)} {{"]
    for v in g.vertices:
        lines.append(f"  {_dot_id(v.label)};")
    for a, b in g.sorted_edges():
        lines.append(f"  {_dot_id(g.vertices[a].label)} {arrow} {_dot_id(g.vertices[b].label)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    if s.isidentifier():
        return s
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
