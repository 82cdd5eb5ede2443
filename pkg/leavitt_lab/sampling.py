from __future__ import annotations

import random
from functools import lru_cache

from .algebra import Element, LeavittAlgebra, Monomial
from .graph import Graph, paths_up_to
from .scalar import Field, FieldElement
from .structure import BlockMatrix

MAX_TERMS = 4
MAX_PATH_LEN = 3


@lru_cache(maxsize=64)
def candidate_monomials(algebra: LeavittAlgebra, max_len: int, normal_only: bool = True) -> tuple[Monomial, ...]:
    by_range: dict[str, list[tuple[str, ...]]] = {}
    for path in paths_up_to(algebra.graph, max_len):
        by_range.setdefault(path.range, []).append(path.edges)
    out = []
    for w, paths in by_range.items():
        for alpha in paths:
            for beta in paths:
                if len(alpha) + len(beta) > max_len:
                    continue
                mono = Monomial(alpha, beta, w)
                if not normal_only or algebra.is_normal(mono):
                    out.append(mono)
    return tuple(sorted(out, key=Monomial.sort_key))


def random_element(
    algebra: LeavittAlgebra,
    rng: random.Random,
    *,
    max_terms: int = MAX_TERMS,
    max_len: int = MAX_PATH_LEN,
) -> Element:
    candidates = candidate_monomials(algebra, max_len)
    size = rng.randint(1, min(max_terms, len(candidates)))
    chosen = rng.sample(candidates, size)
    return algebra.normalize({m: algebra.field.random_nonzero(rng) for m in chosen})


def random_raw_combination(
    algebra: LeavittAlgebra,
    rng: random.Random,
    *,
    max_terms: int = MAX_TERMS,
    max_len: int = MAX_PATH_LEN + 1,
) -> list[tuple[Monomial, FieldElement]]:
    candidates = candidate_monomials(algebra, max_len, normal_only=False)
    return [
        (rng.choice(candidates), algebra.field.random_nonzero(rng))
        for _ in range(rng.randint(1, max_terms))
    ]


def random_idempotent(algebra: LeavittAlgebra, rng: random.Random) -> Element:
    """A vertex, a sum of vertices, mu.mu^* for a path mu, or a block unit w - sum e.e^*."""
    graph = algebra.graph
    kinds = ["vertex", "vertex_sum", "path_projection"]
    if graph.infinite_emitters:
        kinds.append("block_unit")
    kind = rng.choice(kinds)
    if kind == "vertex":
        return algebra.vertex(rng.choice(graph.vertices))
    if kind == "vertex_sum":
        count = rng.randint(1, len(graph.vertices))
        return algebra.vertex_sum(rng.sample(graph.vertices, count))
    if kind == "block_unit":
        w = rng.choice(sorted(graph.infinite_emitters))
        return algebra.vertex(w) - algebra.sum(
            algebra.edge(e.id) * algebra.ghost(e.id) for e in graph.out_edges(w)
        )
    path = rng.choice(paths_up_to(graph, MAX_PATH_LEN))
    mu = algebra.path(path.edges, path.source)
    return mu * algebra.star(mu)


def random_acyclic_graph(
    rng: random.Random,
    *,
    max_vertices: int = 5,
    max_edges: int = 6,
    allow_flagged: bool = True,
) -> Graph:
    n = rng.randint(1, max_vertices)
    order = [f"v{i}" for i in range(1, n + 1)]
    rng.shuffle(order)
    edges = []
    if n > 1:
        for k in range(1, rng.randint(0, max_edges) + 1):
            i, j = sorted(rng.sample(range(n), 2))
            edges.append((f"e{k}", order[i], order[j]))
    emitters = sorted({src for _, src, _ in edges})
    flagged = []
    if allow_flagged and emitters and rng.random() < 0.5:
        flagged.append(rng.choice(emitters))
    return Graph.build(order, edges, flagged)


def random_cyclic_graph(
    rng: random.Random,
    *,
    max_vertices: int = 4,
    max_edges: int = 5,
    max_out_degree: int = 2,
) -> tuple[Graph, tuple[str, ...]]:
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(1, n + 1)]
    k = rng.randint(1, min(n, 3))
    edges = [(f"c{i}", vertices[i - 1], vertices[i % k]) for i in range(1, k + 1)]
    out_degree = {v: 0 for v in vertices}
    for _, src, _ in edges:
        out_degree[src] += 1
    extra = 0
    for _ in range(rng.randint(0, max_edges - k)):
        src, dst = rng.choice(vertices), rng.choice(vertices)
        if out_degree[src] >= max_out_degree:
            continue
        extra += 1
        out_degree[src] += 1
        edges.append((f"x{extra}", src, dst))
    return Graph.build(vertices, edges), tuple(f"c{i}" for i in range(1, k + 1))


def random_block_matrix(
    field: Field, shape: tuple[tuple[str, int], ...], rng: random.Random, *, density: float = 0.5
) -> BlockMatrix:
    entries = {
        (v, i, j): field.random_element(rng)
        for v, n in shape
        for i in range(n)
        for j in range(n)
        if rng.random() < density
    }
    return BlockMatrix.from_entries(field, shape, entries)
