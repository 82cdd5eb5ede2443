from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from .errors import CyclicGraph, GraphSyntaxError, GraphValidationError, UnknownIdentifier
from .validation import IDENTIFIER_RE, find_duplicates, sanitize_identifier

_ID = r"[A-Za-z_][A-Za-z0-9_]*"
VERTEX_DECL_RE = re.compile(rf"^vertex\s+({_ID})\s*(\[\s*infinite\s*\])?$")
EDGE_DECL_RE = re.compile(rf"^edge\s+({_ID})\s*:\s*({_ID})\s*->\s*({_ID})$")


class VertexKind(str, Enum):
    SINK = "Sink"
    REGULAR = "Regular"
    INFINITE_EMITTER = "InfiniteEmitter"


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    source: str
    range: str


@dataclass(frozen=True)
class Path:
    edges: tuple[str, ...]
    source: str
    range: str

    @classmethod
    def trivial(cls, vertex: str) -> "Path":
        return cls((), vertex, vertex)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    def sort_key(self) -> tuple[int, tuple[str, ...], str]:
        return (len(self.edges), self.edges, self.source)

    def __str__(self) -> str:
        return ".".join(self.edges) if self.edges else self.source


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    infinite_emitters: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphValidationError("graph must declare at least one vertex")
        for name in list(self.vertices) + [e.id for e in self.edges]:
            try:
                sanitize_identifier(name, pattern=IDENTIFIER_RE, strip=False)
            except ValueError as exc:
                raise GraphValidationError(str(exc)) from exc
        dup_vertices = find_duplicates(self.vertices)
        if dup_vertices:
            raise GraphValidationError(f"duplicate vertex: {', '.join(dup_vertices)}")
        dup_edges = find_duplicates(e.id for e in self.edges)
        if dup_edges:
            raise GraphValidationError(f"duplicate edge: {', '.join(dup_edges)}")
        shared = sorted(set(self.vertices) & {e.id for e in self.edges})
        if shared:
            raise GraphValidationError(
                f"identifier used for both a vertex and an edge: {', '.join(shared)}"
            )
        known = set(self.vertices)
        for edge in self.edges:
            for endpoint in (edge.source, edge.range):
                if endpoint not in known:
                    raise GraphValidationError(
                        f"edge '{edge.id}' has undeclared endpoint '{endpoint}'"
                    )
        for vertex in sorted(self.infinite_emitters):
            if vertex not in known:
                raise GraphValidationError(f"flagged vertex '{vertex}' is not declared")
            if not any(edge.source == vertex for edge in self.edges):
                raise GraphValidationError(
                    f"infinite emitter '{vertex}' must emit at least one listed edge"
                )

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, str]],
        infinite_emitters: Iterable[str] = (),
    ) -> "Graph":
        vertex_list = list(vertices)
        edge_list = [Edge(eid, src, dst) for eid, src, dst in edges]
        duplicates = find_duplicates(vertex_list)
        if duplicates:
            raise GraphValidationError(f"duplicate vertex: {', '.join(duplicates)}")
        duplicates = find_duplicates(e.id for e in edge_list)
        if duplicates:
            raise GraphValidationError(f"duplicate edge: {', '.join(duplicates)}")
        return cls(
            vertices=tuple(sorted(vertex_list)),
            edges=tuple(sorted(edge_list, key=lambda e: e.id)),
            infinite_emitters=frozenset(infinite_emitters),
        )

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def _out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            out[edge.source].append(edge)
        return {v: tuple(sorted(es, key=lambda e: e.id)) for v, es in out.items()}

    @cached_property
    def _in_edges(self) -> dict[str, tuple[Edge, ...]]:
        incoming: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            incoming[edge.range].append(edge)
        return {v: tuple(sorted(es, key=lambda e: e.id)) for v, es in incoming.items()}

    @cached_property
    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for edge in self.edges:
            g.add_edge(edge.source, edge.range, key=edge.id)
        return g

    def has_vertex(self, v: str) -> bool:
        return v in self._out_edges

    def has_edge(self, e: str) -> bool:
        return e in self._edge_index

    def edge(self, e: str) -> Edge:
        try:
            return self._edge_index[e]
        except KeyError:
            raise UnknownIdentifier(f"unknown edge '{e}'") from None

    def source(self, e: str) -> str:
        return self.edge(e).source

    def range(self, e: str) -> str:
        return self.edge(e).range

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        self._require_vertex(v)
        return self._out_edges[v]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        self._require_vertex(v)
        return self._in_edges[v]

    def _require_vertex(self, v: str) -> None:
        if v not in self._out_edges:
            raise UnknownIdentifier(f"unknown vertex '{v}'")

    def make_path(self, edges: Sequence[str], base: str | None = None) -> Path:
        if not edges:
            if base is None:
                raise GraphValidationError("an empty path needs a base vertex")
            self._require_vertex(base)
            return Path.trivial(base)
        steps = [self.edge(e) for e in edges]
        for prev, nxt in zip(steps, steps[1:]):
            if prev.range != nxt.source:
                raise GraphValidationError(
                    f"edges '{prev.id}' and '{nxt.id}' do not compose"
                )
        if base is not None and base != steps[0].source:
            raise GraphValidationError(f"path does not start at '{base}'")
        return Path(tuple(edges), steps[0].source, steps[-1].range)

    @property
    def block_vertices(self) -> tuple[str, ...]:
        return tuple(
            v
            for v in self.vertices
            if v in self.infinite_emitters or not self._out_edges[v]
        )


def vertex_kind(g: Graph, v: str) -> VertexKind:
    if v in g.infinite_emitters:
        g._require_vertex(v)
        return VertexKind.INFINITE_EMITTER
    return VertexKind.REGULAR if g.out_edges(v) else VertexKind.SINK


def find_cycle(g: Graph) -> tuple[str, ...] | None:
    try:
        found = nx.find_cycle(g.digraph)
    except nx.NetworkXNoCycle:
        return None
    return tuple(key for _, _, key in found)


def is_acyclic(g: Graph) -> bool:
    return nx.is_directed_acyclic_graph(g.digraph)


def require_acyclic(g: Graph) -> None:
    cycle = find_cycle(g)
    if cycle is not None:
        raise CyclicGraph(
            f"graph contains the cycle {'.'.join(cycle)}", cycle=cycle
        )


def paths_ending_at(g: Graph, w: str) -> list[Path]:
    """Every path with range ``w``, ordered by (length, edge ids)."""
    g._require_vertex(w)
    require_acyclic(g)
    found: list[Path] = []
    stack: list[Path] = [Path.trivial(w)]
    while stack:
        path = stack.pop()
        found.append(path)
        for edge in g.in_edges(path.source):
            stack.append(Path((edge.id,) + path.edges, edge.source, w))
    return sorted(found, key=Path.sort_key)


def count_paths_ending_at(g: Graph) -> dict[str, int]:
    require_acyclic(g)
    counts: dict[str, int] = {}
    for v in nx.topological_sort(g.digraph):
        counts[v] = 1 + sum(counts[edge.source] for edge in g.in_edges(v))
    return counts


def paths_up_to(g: Graph, max_len: int) -> list[Path]:
    """All paths of length <= max_len (works on cyclic graphs)."""
    layer = [Path.trivial(v) for v in g.vertices]
    found = list(layer)
    for _ in range(max_len):
        layer = [
            Path(path.edges + (edge.id,), path.source, edge.range)
            for path in layer
            for edge in g.out_edges(path.range)
        ]
        found.extend(layer)
    return sorted(found, key=Path.sort_key)


def _split_declarations(text: str) -> Iterable[tuple[int, int, str]]:
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        offset = 0
        for chunk in line.split(";"):
            stripped = chunk.strip()
            if stripped:
                column = offset + (len(chunk) - len(chunk.lstrip())) + 1
                yield line_no, column, stripped
            offset += len(chunk) + 1


def parse_graph(text: str) -> Graph:
    vertices: list[str] = []
    flagged: list[str] = []
    edges: list[tuple[str, str, str]] = []
    positions: dict[str, tuple[int, int]] = {}
    for line_no, column, decl in _split_declarations(text):
        vertex_match = VERTEX_DECL_RE.fullmatch(decl)
        edge_match = EDGE_DECL_RE.fullmatch(decl)
        if vertex_match:
            name = vertex_match.group(1)
            if name in positions:
                raise GraphValidationError(
                    f"line {line_no}, column {column}: duplicate identifier '{name}'"
                )
            positions[name] = (line_no, column)
            vertices.append(name)
            if vertex_match.group(2):
                flagged.append(name)
        elif edge_match:
            name, src, dst = edge_match.groups()
            if name in positions:
                raise GraphValidationError(
                    f"line {line_no}, column {column}: duplicate identifier '{name}'"
                )
            positions[name] = (line_no, column)
            edges.append((name, src, dst))
        else:
            keyword = decl.split(None, 1)[0]
            if keyword not in ("vertex", "edge"):
                message = f"unknown declaration '{keyword}'"
            else:
                message = f"malformed {keyword} declaration '{decl}'"
            raise GraphSyntaxError(message, line=line_no, column=column)
    declared = set(vertices)
    for name, src, dst in edges:
        for endpoint in (src, dst):
            if endpoint not in declared:
                line_no, column = positions[name]
                raise GraphValidationError(
                    f"line {line_no}, column {column}: edge '{name}' has "
                    f"undeclared endpoint '{endpoint}'"
                )
    return Graph.build(vertices, edges, flagged)


def serialize_graph(g: Graph) -> str:
    lines = [
        f"vertex {v} [infinite]" if v in g.infinite_emitters else f"vertex {v}"
        for v in g.vertices
    ]
    lines.extend(f"edge {e.id}: {e.source} -> {e.range}" for e in g.edges)
    return "\n".join(lines) + "\n"


def line_graph(n: int) -> Graph:
    if n < 1:
        raise GraphValidationError("a line graph needs at least one vertex")
    return Graph.build(
        [f"v{i}" for i in range(1, n + 1)],
        [(f"e{i}", f"v{i}", f"v{i + 1}") for i in range(1, n)],
    )


def loop_graph() -> Graph:
    return Graph.build(["v"], [("c", "v", "v")])


def two_cycle_graph() -> Graph:
    return Graph.build(["v", "w"], [("e", "v", "w"), ("f", "w", "v")])


def is_loop_graph(g: Graph) -> bool:
    return (
        len(g.vertices) == 1
        and len(g.edges) == 1
        and g.edges[0].source == g.edges[0].range
        and not g.infinite_emitters
    )
