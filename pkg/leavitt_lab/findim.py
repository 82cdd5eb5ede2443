from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from .algebra import Element, LeavittAlgebra, Monomial
from .errors import DimensionCapExceeded, InfiniteDimensional
from .graph import Graph, count_paths_ending_at, find_cycle, paths_ending_at
from .metrics import record_solve
from .scalar import Field, FieldElement

log = logging.getLogger(__name__)

DEFAULT_DIM_CAP = 4096

Vector = dict[int, FieldElement]


@dataclass(frozen=True)
class Basis:
    monomials: tuple[Monomial, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(self.monomials)})

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __getitem__(self, i: int) -> Monomial:
        return self.monomials[i]

    def index(self, monomial: Monomial) -> int:
        return self._index[monomial]  # type: ignore[attr-defined]


def _require_finite(graph: Graph) -> None:
    cycle = find_cycle(graph)
    if cycle is not None:
        raise InfiniteDimensional(
            f"the algebra is infinite-dimensional: cycle {'.'.join(cycle)}", cycle=cycle
        )


def predicted_dimension(graph: Graph) -> int:
    _require_finite(graph)
    counts = count_paths_ending_at(graph)
    return sum(counts[w] ** 2 for w in graph.block_vertices)


def check_dimension_cap(graph: Graph, dim_cap: int) -> int:
    dimension = predicted_dimension(graph)
    if dimension > dim_cap:
        raise DimensionCapExceeded(dimension, dim_cap)
    return dimension


def enumerate_basis(algebra: LeavittAlgebra) -> Basis:
    """All normal monomials, ordered by (total length, alpha, beta)."""
    graph = algebra.graph
    _require_finite(graph)
    monomials: list[Monomial] = []
    for w in graph.vertices:
        incoming = paths_ending_at(graph, w)
        for alpha in incoming:
            for beta in incoming:
                mono = Monomial(alpha.edges, beta.edges, w)
                if algebra.is_normal(mono):
                    monomials.append(mono)
    return Basis(tuple(sorted(monomials, key=Monomial.sort_key)))


@dataclass(frozen=True)
class Subspace:
    dim: int
    rows: tuple[tuple[tuple[int, FieldElement], ...], ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def vectors(self) -> list[Vector]:
        return [dict(row) for row in self.rows]

    def reduce(self, vector: Mapping[int, FieldElement]) -> Vector:
        residual = {i: c for i, c in vector.items() if c}
        for pivot, row in zip(self.pivots, self.rows):
            factor = residual.get(pivot)
            if not factor:
                continue
            for col, value in row:
                updated = residual[col] - factor * value if col in residual else -(factor * value)
                if updated:
                    residual[col] = updated
                else:
                    residual.pop(col, None)
        return residual

    def contains(self, vector: Mapping[int, FieldElement]) -> bool:
        return not self.reduce(vector)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors())

    def dense_rows(self, field: Field) -> list[list[str]]:
        out = []
        for row in self.rows:
            dense = [field.format(field.zero)] * self.dim
            for col, value in row:
                dense[col] = field.format(value)
            out.append(dense)
        return out


def _key_index(columns: Sequence[Mapping[Hashable, FieldElement]], extra: Iterable[Hashable] = ()) -> dict:
    keys: dict[Hashable, int] = {}
    for key in extra:
        keys.setdefault(key, len(keys))
    for column in columns:
        for key in column:
            keys.setdefault(key, len(keys))
    return keys


def echelon(field: Field, dim: int, vectors: Iterable[Mapping[int, FieldElement]]) -> Subspace:
    dok: dict[tuple[int, int], FieldElement] = {}
    count = 0
    for vector in vectors:
        entries = {(count, j): c for j, c in vector.items() if c}
        if entries:
            dok.update(entries)
            count += 1
    if not dok:
        return Subspace(dim, (), ())
    matrix = DomainMatrix.from_dok(dok, (count, dim), field.domain)
    reduced, pivots = matrix.rref()
    record_solve("echelon")
    rows: dict[int, list[tuple[int, FieldElement]]] = {}
    for (i, j), value in reduced.to_dok().items():
        if value:
            rows.setdefault(i, []).append((j, value))
    ordered = tuple(tuple(sorted(rows[i])) for i in range(len(pivots)))
    return Subspace(dim, ordered, tuple(pivots))


def kernel(
    field: Field, columns: Sequence[Mapping[Hashable, FieldElement]]
) -> Subspace:
    """{x : sum_j x_j * columns[j] = 0}, as a subspace of K^len(columns)."""
    n = len(columns)
    keys = _key_index(columns)
    dok = {
        (keys[key], j): value for j, column in enumerate(columns) for key, value in column.items() if value
    }
    if not dok:
        return full_space(field, n)
    matrix = DomainMatrix.from_dok(dok, (len(keys), n), field.domain)
    null = matrix.nullspace()
    record_solve("kernel")
    vectors: dict[int, Vector] = {}
    for (i, j), value in null.to_dok().items():
        if value:
            vectors.setdefault(i, {})[j] = value
    return echelon(field, n, vectors.values())


def solve_combination(
    field: Field,
    columns: Sequence[Mapping[Hashable, FieldElement]],
    target: Mapping[Hashable, FieldElement],
) -> Vector | None:
    """Coefficients x with sum_j x_j * columns[j] = target, free variables zero; None if inconsistent."""
    target = {k: v for k, v in target.items() if v}
    n = len(columns)
    if not target:
        return {}
    keys = _key_index(columns, target)
    dok = {
        (keys[key], j): value for j, column in enumerate(columns) for key, value in column.items() if value
    }
    for key, value in target.items():
        dok[(keys[key], n)] = value
    matrix = DomainMatrix.from_dok(dok, (len(keys), n + 1), field.domain)
    reduced, pivots = matrix.rref()
    record_solve("solve")
    if n in pivots:
        return None
    entries = reduced.to_dok()
    solution: Vector = {}
    for row, pivot in enumerate(pivots):
        value = entries.get((row, n))
        if value:
            solution[pivot] = value
    return solution


def full_space(field: Field, dim: int) -> Subspace:
    one = field.one
    return Subspace(dim, tuple(((i, one),) for i in range(dim)), tuple(range(dim)))


def zero_space(dim: int) -> Subspace:
    return Subspace(dim, (), ())


class FiniteAlgebra:
    def __init__(self, algebra: LeavittAlgebra, *, dim_cap: int = DEFAULT_DIM_CAP) -> None:
        self.algebra = algebra
        self.field = algebra.field
        check_dimension_cap(algebra.graph, dim_cap)
        self.basis = enumerate_basis(algebra)
        self.dim_cap = dim_cap
        self._products: dict[tuple[int, int], Vector] = {}
        log.debug("basis enumerated", extra={"dimension": len(self.basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    # -- coordinates ---------------------------------------------------------

    def coords(self, a: Element) -> Vector:
        self.algebra._check(a)
        return {self.basis.index(m): c for m, c in a.terms.items()}

    def element(self, vector: Mapping[int, FieldElement]) -> Element:
        return Element(self.algebra, {self.basis[i]: c for i, c in vector.items() if c})

    def basis_element(self, i: int) -> Element:
        return Element(self.algebra, {self.basis[i]: self.field.one})

    def span(self, elements: Iterable[Element]) -> Subspace:
        return echelon(self.field, self.dim, (self.coords(a) for a in elements))

    def elements_of(self, space: Subspace) -> list[Element]:
        return [self.element(v) for v in space.vectors()]

    def full_space(self) -> Subspace:
        return full_space(self.field, self.dim)

    def zero_space(self) -> Subspace:
        return zero_space(self.dim)

    # -- multiplication operators -------------------------------------------

    def product(self, i: int, j: int) -> Vector:
        cached = self._products.get((i, j))
        if cached is None:
            mono = self.algebra.multiply_monomials(self.basis[i], self.basis[j])
            if mono is None:
                cached = {}
            else:
                cached = self.coords(self.algebra.normalize({mono: self.field.one}))
            self._products[(i, j)] = cached
        return cached

    def _combine(self, pairs: Iterable[tuple[FieldElement, Vector]]) -> Vector:
        out: Vector = {}
        for coef, vector in pairs:
            for k, value in vector.items():
                total = out.get(k, self.field.zero) + coef * value
                if total:
                    out[k] = total
                else:
                    out.pop(k, None)
        return out

    def left_operator(self, a: Element) -> list[Vector]:
        support = self.coords(a)
        return [
            self._combine((c, self.product(i, j)) for i, c in support.items()) for j in range(self.dim)
        ]

    def right_operator(self, a: Element) -> list[Vector]:
        support = self.coords(a)
        return [
            self._combine((c, self.product(j, i)) for i, c in support.items()) for j in range(self.dim)
        ]

    def sandwich_operator(self, a: Element) -> list[Vector]:
        support = self.coords(a)
        columns = []
        for left in self.left_operator(a):
            columns.append(
                self._combine(
                    (c, self._combine((k, self.product(m, i)) for i, k in support.items()))
                    for m, c in left.items()
                )
            )
        return columns

    @staticmethod
    def _stack(blocks: Sequence[list[Vector]]) -> list[dict[tuple[int, int], FieldElement]]:
        if not blocks:
            return []
        width = len(blocks[0])
        return [
            {(b, k): v for b, block in enumerate(blocks) for k, v in block[j].items()} for j in range(width)
        ]

    # -- annihilators and ideals -----------------------------------------------

    def right_annihilator(self, a: Element) -> Subspace:
        return kernel(self.field, self.left_operator(a))

    def left_annihilator_of_element(self, a: Element) -> Subspace:
        return kernel(self.field, self.right_operator(a))

    def left_annihilator(self, space: Subspace) -> Subspace:
        if not space.rank:
            return self.full_space()
        blocks = [self.right_operator(s) for s in self.elements_of(space)]
        return kernel(self.field, self._stack(blocks))

    def right_annihilator_of(self, space: Subspace) -> Subspace:
        if not space.rank:
            return self.full_space()
        blocks = [self.left_operator(s) for s in self.elements_of(space)]
        return kernel(self.field, self._stack(blocks))

    def principal_left_ideal(self, a: Element) -> Subspace:
        return echelon(self.field, self.dim, self.right_operator(a))

    def principal_right_ideal(self, a: Element) -> Subspace:
        return echelon(self.field, self.dim, self.left_operator(a))

    def member(self, a: Element, space: Subspace) -> bool:
        return space.contains(self.coords(a))

    def describe(self, space: Subspace) -> dict[str, object]:
        return {
            "dim": space.dim,
            "rank": space.rank,
            "pivots": list(space.pivots),
            "rows": space.dense_rows(self.field),
            "span": [str(a) for a in self.elements_of(space)],
        }


def subspace_equal(s: Subspace, t: Subspace) -> bool:
    return s == t


@lru_cache(maxsize=32)
def finite_view(algebra: LeavittAlgebra, dim_cap: int = DEFAULT_DIM_CAP) -> FiniteAlgebra:
    return FiniteAlgebra(algebra, dim_cap=dim_cap)


def basis(algebra: LeavittAlgebra, *, dim_cap: int = DEFAULT_DIM_CAP) -> Basis:
    return finite_view(algebra, dim_cap).basis


def right_annihilator(a: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> Subspace:
    return finite_view(a.algebra, dim_cap).right_annihilator(a)


def left_annihilator(algebra: LeavittAlgebra, space: Subspace, *, dim_cap: int = DEFAULT_DIM_CAP) -> Subspace:
    return finite_view(algebra, dim_cap).left_annihilator(space)


def principal_left_ideal(a: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> Subspace:
    return finite_view(a.algebra, dim_cap).principal_left_ideal(a)


def member(a: Element, space: Subspace, *, dim_cap: int = DEFAULT_DIM_CAP) -> bool:
    return finite_view(a.algebra, dim_cap).member(a, space)
