from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from .algebra import Element, LeavittAlgebra
from .errors import ShapeMismatch, TheoremViolation, WrongGraph
from .findim import DEFAULT_DIM_CAP, check_dimension_cap, finite_view
from .graph import Path, is_loop_graph, paths_ending_at, require_acyclic
from .metrics import record_solve
from .report import Certificate
from .scalar import Field, FieldElement

log = logging.getLogger(__name__)


def block_order(path: Path) -> tuple[int, tuple[str, ...]]:
    return (-len(path), path.edges)


@dataclass(frozen=True)
class Block:
    vertex: str
    paths: tuple[Path, ...]
    unit: Element

    @property
    def size(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class MatricialDecomposition:
    algebra: LeavittAlgebra
    blocks: tuple[Block, ...]
    dim_cap: int = DEFAULT_DIM_CAP

    @property
    def dimension(self) -> int:
        return sum(block.size**2 for block in self.blocks)

    @property
    def shape(self) -> tuple[tuple[str, int], ...]:
        return tuple((block.vertex, block.size) for block in self.blocks)

    def block(self, vertex: str) -> Block:
        for block in self.blocks:
            if block.vertex == vertex:
                return block
        raise ShapeMismatch(f"'{vertex}' carries no block")

    def matrix_unit(self, vertex: str, i: int, j: int) -> Element:
        """E^w_{i,j} = p_i * q_w * p_j^* (0-based indices)."""
        block = self.block(vertex)
        algebra = self.algebra
        left = algebra.path(block.paths[i].edges, block.paths[i].source)
        right = algebra.star(algebra.path(block.paths[j].edges, block.paths[j].source))
        return algebra.product(left, block.unit, right)

    def block_identity(self, vertex: str) -> Element:
        block = self.block(vertex)
        return self.algebra.sum(self.matrix_unit(vertex, i, i) for i in range(block.size))

    @cached_property
    def _units(self) -> list[tuple[int, int, int]]:
        return [
            (b, i, j)
            for b, block in enumerate(self.blocks)
            for i in range(block.size)
            for j in range(block.size)
        ]

    @cached_property
    def _inverse_columns(self) -> dict[int, list[tuple[int, FieldElement]]]:
        view = finite_view(self.algebra, self.dim_cap)
        if view.dim != self.dimension:
            raise TheoremViolation(
                f"basis has {view.dim} monomials but the blocks account for {self.dimension}"
            )
        dok = {}
        for col, (b, i, j) in enumerate(self._units):
            unit = self.matrix_unit(self.blocks[b].vertex, i, j)
            for row, value in view.coords(unit).items():
                dok[(row, col)] = value
        matrix = DomainMatrix.from_dok(dok, (view.dim, view.dim), self.algebra.field.domain)
        inverse = matrix.inv()
        record_solve("change_of_basis")
        columns: dict[int, list[tuple[int, FieldElement]]] = {}
        for (row, col), value in inverse.to_dok().items():
            if value:
                columns.setdefault(col, []).append((row, value))
        return columns


def decompose(algebra: LeavittAlgebra, *, dim_cap: int = DEFAULT_DIM_CAP) -> MatricialDecomposition:
    graph = algebra.graph
    require_acyclic(graph)
    check_dimension_cap(graph, dim_cap)
    blocks = []
    for w in graph.block_vertices:
        paths = tuple(sorted(paths_ending_at(graph, w), key=block_order))
        unit = algebra.vertex(w)
        if w in graph.infinite_emitters:
            unit = unit - algebra.sum(
                algebra.edge(e.id) * algebra.ghost(e.id) for e in graph.out_edges(w)
            )
        blocks.append(Block(w, paths, unit))
    decomposition = MatricialDecomposition(algebra, tuple(blocks), dim_cap)
    log.debug("decomposed", extra={"blocks": len(blocks), "dimension": decomposition.dimension})
    return decomposition


@dataclass(frozen=True)
class BlockMatrix:
    field: Field
    vertices: tuple[str, ...]
    blocks: tuple[DomainMatrix, ...]

    @classmethod
    def from_entries(
        cls,
        field: Field,
        shape: Sequence[tuple[str, int]],
        entries: Mapping[tuple[str, int, int], FieldElement],
    ) -> "BlockMatrix":
        sizes = dict(shape)
        grouped: dict[str, dict[tuple[int, int], FieldElement]] = {v: {} for v, _ in shape}
        for (vertex, i, j), value in entries.items():
            if vertex not in sizes or not (0 <= i < sizes[vertex] and 0 <= j < sizes[vertex]):
                raise ShapeMismatch(f"entry ({vertex}, {i}, {j}) lies outside the block shape")
            if value:
                grouped[vertex][(i, j)] = value
        return cls(
            field,
            tuple(v for v, _ in shape),
            tuple(DomainMatrix.from_dok(grouped[v], (n, n), field.domain) for v, n in shape),
        )

    @classmethod
    def zero(cls, field: Field, shape: Sequence[tuple[str, int]]) -> "BlockMatrix":
        return cls.from_entries(field, shape, {})

    @classmethod
    def identity(cls, field: Field, shape: Sequence[tuple[str, int]]) -> "BlockMatrix":
        return cls.from_entries(field, shape, {(v, i, i): field.one for v, n in shape for i in range(n)})

    @property
    def shape(self) -> tuple[tuple[str, int], ...]:
        return tuple((v, m.shape[0]) for v, m in zip(self.vertices, self.blocks))

    def entries(self) -> dict[tuple[str, int, int], FieldElement]:
        return {
            (v, i, j): value
            for v, m in zip(self.vertices, self.blocks)
            for (i, j), value in m.to_dok().items()
            if value
        }

    def entry(self, vertex: str, i: int, j: int) -> FieldElement:
        return self.entries().get((vertex, i, j), self.field.zero)

    def _require_same_shape(self, other: "BlockMatrix") -> None:
        if self.shape != other.shape or self.field != other.field:
            raise ShapeMismatch(f"block shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._require_same_shape(other)
        return BlockMatrix(self.field, self.vertices, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._require_same_shape(other)
        return BlockMatrix(self.field, self.vertices, tuple(a * b for a, b in zip(self.blocks, other.blocks)))

    def transpose(self) -> "BlockMatrix":
        return BlockMatrix(self.field, self.vertices, tuple(m.transpose() for m in self.blocks))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries() == other.entries()

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self.entries().items())))

    def payload(self) -> dict[str, list[list[str]]]:
        out = {}
        for v, m in zip(self.vertices, self.blocks):
            n = m.shape[0]
            rows = [[self.field.format(self.field.zero)] * n for _ in range(n)]
            for (i, j), value in m.to_dok().items():
                rows[i][j] = self.field.format(value)
            out[v] = rows
        return out


def to_matrices(a: Element, d: MatricialDecomposition) -> BlockMatrix:
    d.algebra._check(a)
    view = finite_view(d.algebra, d.dim_cap)
    inverse = d._inverse_columns
    field = d.algebra.field
    values: dict[int, FieldElement] = {}
    for j, c in view.coords(a).items():
        for row, factor in inverse.get(j, ()):
            total = values.get(row, field.zero) + c * factor
            if total:
                values[row] = total
            else:
                values.pop(row, None)
    entries = {}
    for index, value in values.items():
        b, i, j = d._units[index]
        entries[(d.blocks[b].vertex, i, j)] = value
    return BlockMatrix.from_entries(field, d.shape, entries)


def from_matrices(m: BlockMatrix, d: MatricialDecomposition) -> Element:
    if m.shape != d.shape or m.field != d.algebra.field:
        raise ShapeMismatch(f"matrix shape {m.shape} does not match blocks {d.shape}")
    algebra = d.algebra
    return algebra.sum(
        algebra.scalar_mul(value, d.matrix_unit(vertex, i, j)) for (vertex, i, j), value in m.entries().items()
    )


@dataclass(frozen=True)
class LaurentPoly:
    field: Field
    coeffs: tuple[tuple[int, FieldElement], ...] = dc_field(default=())

    @classmethod
    def from_terms(cls, field: Field, terms: Iterable[tuple[int, FieldElement]]) -> "LaurentPoly":
        acc: dict[int, FieldElement] = {}
        for exponent, coef in terms:
            acc[exponent] = acc.get(exponent, field.zero) + coef
        return cls(field, tuple(sorted((k, c) for k, c in acc.items() if c)))

    @classmethod
    def monomial(cls, field: Field, exponent: int, coef: FieldElement | None = None) -> "LaurentPoly":
        return cls.from_terms(field, [(exponent, field.one if coef is None else coef)])

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return LaurentPoly.from_terms(self.field, self.coeffs + other.coeffs)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.field, tuple((k, -c) for k, c in self.coeffs))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return LaurentPoly.from_terms(
            self.field, ((k1 + k2, c1 * c2) for k1, c1 in self.coeffs for k2, c2 in other.coeffs)
        )

    def lowest_term(self) -> tuple[int, FieldElement] | None:
        return self.coeffs[0] if self.coeffs else None

    def evaluate_at_one(self) -> FieldElement:
        total = self.field.zero
        for _, coef in self.coeffs:
            total += coef
        return total

    def terms(self) -> list[str]:
        return [f"{self.field.format_coefficient(c)} x^{k}" for k, c in self.coeffs]

    def __str__(self) -> str:
        return " + ".join(self.terms()) if self.coeffs else "0"


def _require_loop(algebra: LeavittAlgebra) -> str:
    if not is_loop_graph(algebra.graph):
        raise WrongGraph("the Laurent model needs the single-vertex single-loop graph")
    return algebra.graph.edges[0].id


def laurent_of_loop(a: Element) -> LaurentPoly:
    """v -> 1, c -> x, c^* -> x^-1."""
    _require_loop(a.algebra)
    return LaurentPoly.from_terms(
        a.algebra.field, ((len(m.alpha) - len(m.beta), c) for m, c in a.terms.items())
    )


def loop_element(algebra: LeavittAlgebra, p: LaurentPoly) -> Element:
    loop = _require_loop(algebra)
    vertex = algebra.graph.vertices[0]
    out = algebra.zero()
    for exponent, coef in p.coeffs:
        if exponent >= 0:
            term = algebra.path((loop,) * exponent, vertex)
        else:
            term = algebra.star(algebra.path((loop,) * -exponent, vertex))
        out = out + algebra.scalar_mul(coef, term)
    return out


@dataclass(frozen=True)
class LoopCounterexample:
    element: Element
    image: LaurentPoly
    lowest: tuple[int, FieldElement]
    probes: tuple[tuple[LaurentPoly, LaurentPoly], ...]
    ghost_image: LaurentPoly
    value_at_one: FieldElement
    ghost_value_at_one: FieldElement

    @property
    def annihilator_is_zero(self) -> bool:
        if not self.lowest[1]:
            return False
        # the Laurent ring is a domain: lowest terms multiply
        for f, product in self.probes:
            low = f.lowest_term()
            if low is not None and product.lowest_term() != (low[0] + self.lowest[0], low[1] * self.lowest[1]):
                return False
        return True

    @property
    def ghost_outside_ideal(self) -> bool:
        return not self.value_at_one and bool(self.ghost_value_at_one)

    @property
    def holds(self) -> bool:
        return self.annihilator_is_zero and self.ghost_outside_ideal

    def certificate(self) -> Certificate:
        field = self.element.algebra.field
        return Certificate(
            kind="loop_counterexample",
            recheck="counterexample",
            holds=self.holds,
            payload={
                "element": str(self.element),
                "laurent": str(self.image),
                "lowest_term": [self.lowest[0], field.format(self.lowest[1])],
                "probes": [[str(f), str(product)] for f, product in self.probes],
                "right_annihilator_is_zero": self.annihilator_is_zero,
                "ghost": str(self.ghost_image),
                "eval_at_one": field.format(self.value_at_one),
                "ghost_eval_at_one": field.format(self.ghost_value_at_one),
                "ghost_outside_left_ideal": self.ghost_outside_ideal,
            },
        )


def loop_counterexample_certificate(algebra: LeavittAlgebra) -> LoopCounterexample:
    """v - c is not regular: c^* lies in l(r(v - c)) but not in R(v - c)."""
    loop = _require_loop(algebra)
    field = algebra.field
    vertex = algebra.graph.vertices[0]
    element = algebra.vertex(vertex) - algebra.edge(loop)
    image = laurent_of_loop(element)
    lowest = image.lowest_term()
    if lowest is None:
        raise TheoremViolation("v - c mapped to 0 in the Laurent model")
    probes = tuple(
        (f, image * f)
        for f in (
            LaurentPoly.from_terms(field, [(-2, field(3)), (1, field.one)]),
            LaurentPoly.monomial(field, -1),
            LaurentPoly.from_terms(field, [(0, field.one), (1, field.one), (2, field.one)]),
        )
    )
    ghost_image = laurent_of_loop(algebra.ghost(loop))
    return LoopCounterexample(
        element=element,
        image=image,
        lowest=lowest,
        probes=probes,
        ghost_image=ghost_image,
        value_at_one=image.evaluate_at_one(),
        ghost_value_at_one=ghost_image.evaluate_at_one(),
    )
