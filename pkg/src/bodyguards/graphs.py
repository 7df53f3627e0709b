"""Finite simple graphs: construction, families, products and file I/O.

Vertices are dense integers ``0..n-1`` and every generator uses a fixed
labeling, so solver output (certificates, transcripts) is reproducible.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "Graph",
    "GraphError",
    "GraphSpec",
    "SpecSyntaxError",
    "RetractionMap",
    "FAMILIES",
    "PRODUCT_KINDS",
    "MAX_VERTICES",
    "parse_graph_spec",
    "render_graph_spec",
    "build_graph",
    "graph_from_spec",
    "generate_family",
    "product",
    "degree_profile",
    "leaf_set",
    "is_retraction",
    "read_graph",
    "write_graph",
]

MAX_VERTICES = 1 << 16


class GraphError(ValueError):
    """Invalid graph data or family parameters."""


class SpecSyntaxError(GraphError):
    """A graph spec string could not be parsed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph; ``adj[v]`` is the neighbour bit-set of ``v``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.adj) != self.n:
            raise GraphError("adjacency length must equal vertex count")
        full = (1 << self.n) - 1
        for v, mask in enumerate(self.adj):
            if mask & ~full:
                raise GraphError(f"vertex {v} has a neighbour id >= n")
            if (mask >> v) & 1:
                raise GraphError(f"self-loop at vertex {v}")
            for u in _bits(mask):
                if not (self.adj[u] >> v) & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        adj = [0] * n
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if (adj[u] >> v) & 1:
                raise GraphError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges})"

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(_bits(m)) for m in self.adj)

    @cached_property
    def closed_neighbors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(_bits(m | (1 << v))) for v, m in enumerate(self.adj))

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u in range(self.n) for v in self.neighbors[u] if u < v)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    @property
    def max_degree(self) -> int:
        return max((m.bit_count() for m in self.adj), default=0)

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph, relabeled in increasing order of ``vertices``."""
        order = sorted(set(vertices))
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(order), edges), order

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def distances_from(self, source: int) -> list[int]:
        """BFS distances; ``-1`` for unreachable vertices."""
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for u in self.neighbors[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    @cached_property
    def distance_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.distances_from(v)) for v in range(self.n))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @cached_property
    def fingerprint(self) -> str:
        payload = json.dumps(self.to_json(), separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# families

FAMILIES = ("path", "cycle", "complete", "star", "wheel", "hypercube", "kpartite", "tree")
PRODUCT_KINDS = {"cart": "cartesian", "strong": "strong", "lex": "lexicographic"}


def _path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def _cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _complete(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def _star(n: int) -> Graph:
    # centre 0, leaves 1..n-1
    return Graph.from_edges(n, [(0, v) for v in range(1, n)])


def _wheel(n: int) -> Graph:
    # rim 0..n-2 in cycle order, hub n-1
    rim = n - 1
    edges = [(i, (i + 1) % rim) for i in range(rim)]
    edges += [(i, rim) for i in range(rim)]
    return Graph.from_edges(n, edges)


def _hypercube(d: int) -> Graph:
    # vertex id is the coordinate vector read as a binary number
    n = 1 << d
    return Graph.from_edges(n, [(v, v | (1 << i)) for v in range(n) for i in range(d) if not v >> i & 1])


def _kpartite(parts: Sequence[int]) -> Graph:
    block = []
    for i, size in enumerate(parts):
        block.extend([i] * size)
    n = len(block)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if block[u] != block[v]])


def _tree(edges: Sequence[tuple[int, int]]) -> Graph:
    if not edges:
        raise GraphError("tree edge list must be non-empty")
    n = max(max(e) for e in edges) + 1
    g = Graph.from_edges(n, edges)
    if len(edges) != n - 1 or not g.is_connected():
        raise GraphError("edge list does not form a tree")
    return g


_MIN_ORDER = {"path": 1, "cycle": 3, "complete": 1, "star": 2, "wheel": 4, "hypercube": 1}
_SCALAR = {"path": _path, "cycle": _cycle, "complete": _complete, "star": _star, "wheel": _wheel, "hypercube": _hypercube}


def generate_family(kind: str, params) -> Graph:
    """Build a named family member.

    ``params`` is a list of integers, except for ``tree`` where it is a list of
    ``(u, v)`` edges.
    """
    if kind in _SCALAR:
        if len(params) != 1:
            raise GraphError(f"{kind} takes exactly one parameter")
        (value,) = params
        lo = _MIN_ORDER[kind]
        if value < lo:
            label = "dimension" if kind == "hypercube" else "order"
            raise GraphError(f"{kind} {label} must be >= {lo}")
        if kind == "hypercube" and value > 16:
            raise GraphError("hypercube dimension must be <= 16")
        if kind != "hypercube" and value > MAX_VERTICES:
            raise GraphError(f"{kind} order exceeds {MAX_VERTICES}")
        return _SCALAR[kind](value)
    if kind == "kpartite":
        if not params or any(p < 1 for p in params):
            raise GraphError("kpartite parts must all be >= 1")
        if sum(params) > MAX_VERTICES:
            raise GraphError(f"kpartite order exceeds {MAX_VERTICES}")
        return _kpartite(params)
    if kind == "tree":
        return _tree([tuple(e) for e in params])
    raise GraphError(f"unknown family {kind!r}")


def product(g: Graph, h: Graph, kind: str, limit: int = MAX_VERTICES) -> Graph:
    """Cartesian, strong or lexicographic product; vertex ``(u, v)`` gets id ``u*|V(h)|+v``."""
    kind = PRODUCT_KINDS.get(kind, kind)
    if kind not in ("cartesian", "strong", "lexicographic"):
        raise GraphError(f"unknown product kind {kind!r}")
    n = g.n * h.n
    if n > limit:
        raise GraphError(f"product has {n} vertices, above the limit of {limit}")
    m = h.n
    adj = [0] * n
    for u in range(g.n):
        for v in range(h.n):
            mask = 0
            # same G-coordinate, H-edge (all three kinds)
            for y in h.neighbors[v]:
                mask |= 1 << (u * m + y)
            if kind == "lexicographic":
                for x in g.neighbors[u]:
                    mask |= ((1 << m) - 1) << (x * m)
            else:
                for x in g.neighbors[u]:
                    mask |= 1 << (x * m + v)
                    if kind == "strong":
                        for y in h.neighbors[v]:
                            mask |= 1 << (x * m + y)
            adj[u * m + v] = mask
    return Graph(n, tuple(adj))


def degree_profile(g: Graph) -> tuple[list[int], int]:
    degrees = [g.degree(v) for v in range(g.n)]
    return degrees, max(degrees, default=0)


def leaf_set(g: Graph) -> set[int]:
    return {v for v in range(g.n) if g.degree(v) == 1}


# ---------------------------------------------------------------------------
# retractions


@dataclass(frozen=True)
class RetractionMap:
    source: Graph
    target: frozenset[int]
    mapping: tuple[int, ...]

    def target_graph(self) -> Graph:
        return self.source.induced(self.target)[0]


def is_retraction(r: RetractionMap) -> bool:
    """True iff ``r`` fixes its target pointwise and maps edges to edges or collapses them."""
    g = r.source
    if len(r.mapping) != g.n:
        raise GraphError("retraction map must be total on V(G)")
    if any(not 0 <= h < g.n for h in r.target):
        raise GraphError("target vertex out of range")
    for v, image in enumerate(r.mapping):
        if image not in r.target:
            raise GraphError(f"image of {v} is not in the target set")
    if any(r.mapping[h] != h for h in r.target):
        return False
    for u, v in g.edges:
        a, b = r.mapping[u], r.mapping[v]
        if a != b and not g.has_edge(a, b):
            return False
    return True


# ---------------------------------------------------------------------------
# spec DSL


@dataclass(frozen=True)
class GraphSpec:
    """Parsed spec tree: a family leaf, a binary product, or a file reference."""

    kind: str
    params: tuple = ()
    children: tuple[GraphSpec, ...] = field(default=())

    def render(self) -> str:
        return render_graph_spec(self)


def render_graph_spec(spec: GraphSpec) -> str:
    if spec.kind == "file":
        return f"file:{spec.params[0]}"
    if spec.kind in PRODUCT_KINDS:
        a, b = spec.children
        return f"{spec.kind}({render_graph_spec(a)},{render_graph_spec(b)})"
    if spec.kind == "tree":
        return "tree:" + ";".join(f"{u}-{v}" for u, v in spec.params)
    return f"{spec.kind}:" + ",".join(str(p) for p in spec.params)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, offset: int | None = None) -> SpecSyntaxError:
        return SpecSyntaxError(message, self.pos if offset is None else offset)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {ch!r}, found {found}")
        self.pos += 1

    def name(self) -> str:
        start = self.pos
        while self.peek().isalpha():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a family or product name")
        return self.text[start : self.pos]

    def integer(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an integer")
        return int(self.text[start : self.pos])

    def spec(self) -> GraphSpec:
        start = self.pos
        name = self.name()
        if name in PRODUCT_KINDS:
            self.expect("(")
            left = self.spec()
            self.expect(",")
            right = self.spec()
            self.expect(")")
            return GraphSpec(name, (), (left, right))
        if name == "file":
            self.expect(":")
            begin = self.pos
            while self.peek() and self.peek() not in ",)":
                self.pos += 1
            if begin == self.pos:
                raise self.error("expected a file path")
            return GraphSpec("file", (self.text[begin : self.pos],))
        if name not in FAMILIES:
            raise self.error(f"unknown family {name!r}", start)
        self.expect(":")
        if name == "tree":
            edges = [self.edge()]
            while self.peek() == ";":
                self.pos += 1
                edges.append(self.edge())
            params: tuple = tuple(edges)
        else:
            values = [self.integer()]
            # a comma continues the list only when a digit follows
            while name == "kpartite" and self.peek() == "," and self.text[self.pos + 1 : self.pos + 2].isdigit():
                self.pos += 1
                values.append(self.integer())
            params = tuple(values)
        spec = GraphSpec(name, params)
        try:
            _check_family_params(spec)
        except GraphError as exc:
            raise SpecSyntaxError(str(exc), start) from None
        return spec

    def edge(self) -> tuple[int, int]:
        u = self.integer()
        self.expect("-")
        return (u, self.integer())


def _check_family_params(spec: GraphSpec) -> None:
    if spec.kind in _MIN_ORDER:
        lo = _MIN_ORDER[spec.kind]
        if spec.params[0] < lo:
            label = "dimension" if spec.kind == "hypercube" else "order"
            raise GraphError(f"{spec.kind} {label} must be >= {lo}")
    elif spec.kind == "kpartite" and any(p < 1 for p in spec.params):
        raise GraphError("kpartite parts must all be >= 1")


def parse_graph_spec(text: str) -> GraphSpec:
    if not text:
        raise SpecSyntaxError("empty graph spec", 0)
    parser = _Parser(text)
    spec = parser.spec()
    if parser.pos != len(text):
        raise parser.error("unexpected trailing input")
    return spec


def build_graph(spec: GraphSpec, limit: int = MAX_VERTICES) -> Graph:
    if spec.kind == "file":
        return read_graph(spec.params[0])
    if spec.kind in PRODUCT_KINDS:
        a, b = (build_graph(c, limit) for c in spec.children)
        return product(a, b, spec.kind, limit)
    return generate_family(spec.kind, list(spec.params))


def graph_from_spec(text: str, limit: int = MAX_VERTICES) -> Graph:
    return build_graph(parse_graph_spec(text), limit)


# ---------------------------------------------------------------------------
# JSON files


def read_graph(path: str | Path) -> Graph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph file {path}: {exc}") from None
    if not isinstance(data, dict) or set(data) != {"n", "edges"}:
        raise GraphError(f"graph file {path} must be an object with keys 'n' and 'edges'")
    n, edges = data["n"], data["edges"]
    if not isinstance(n, int) or n < 0 or not isinstance(edges, list):
        raise GraphError(f"graph file {path} has an invalid 'n' or 'edges'")
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise GraphError(f"graph file {path}: bad edge entry {e!r}")
    return Graph.from_edges(n, edges)


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(g.to_json()) + "\n")
