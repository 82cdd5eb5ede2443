from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import GraphValidationError, MixedAlgebra, UnknownIdentifier
from .graph import Graph, VertexKind, vertex_kind
from .metrics import record_normalization, record_products
from .scalar import Field, FieldElement

log = logging.getLogger(__name__)

Terms = Mapping["Monomial", FieldElement]


@dataclass(frozen=True, order=True)
class Monomial:
    alpha: tuple[str, ...]
    beta: tuple[str, ...]
    mid: str

    @property
    def length(self) -> int:
        return len(self.alpha) + len(self.beta)

    @property
    def is_vertex(self) -> bool:
        return not self.alpha and not self.beta

    def sort_key(self) -> tuple[int, tuple[str, ...], tuple[str, ...], str]:
        return (self.length, self.alpha, self.beta, self.mid)

    def star(self) -> "Monomial":
        return Monomial(self.beta, self.alpha, self.mid)

    def __str__(self) -> str:
        if self.is_vertex:
            return self.mid
        parts = list(self.alpha)
        if len(self.beta) == 1:
            parts.append(f"{self.beta[0]}^*")
        elif self.beta:
            parts.append(f"({'.'.join(self.beta)})^*")
        return ".".join(parts)


class Element:
    """An immutable element of a Leavitt path algebra in normal form."""

    __slots__ = ("algebra", "_terms", "_hash")

    def __init__(self, algebra: "LeavittAlgebra", terms: Terms) -> None:
        self.algebra = algebra
        self._terms: Mapping[Monomial, FieldElement] = MappingProxyType(dict(terms))
        self._hash: int | None = None

    @property
    def terms(self) -> Mapping[Monomial, FieldElement]:
        return self._terms

    def items(self) -> list[tuple[Monomial, FieldElement]]:
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def __iter__(self) -> Iterator[tuple[Monomial, FieldElement]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, monomial: Monomial) -> FieldElement:
        return self._terms.get(monomial, self.algebra.field.zero)

    def __add__(self, other: "Element") -> "Element":
        return self.algebra.add(self, other)

    def __sub__(self, other: "Element") -> "Element":
        return self.algebra.add(self, self.algebra.scalar_mul(-self.algebra.field.one, other))

    def __neg__(self) -> "Element":
        return self.algebra.scalar_mul(-self.algebra.field.one, self)

    def __mul__(self, other: object) -> "Element":
        if isinstance(other, Element):
            return self.algebra.mul(self, other)
        return self.algebra.scalar_mul(self.algebra.field.domain.convert(other), self)

    def __rmul__(self, other: object) -> "Element":
        return self.algebra.scalar_mul(self.algebra.field.domain.convert(other), self)

    def star(self) -> "Element":
        return self.algebra.star(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.algebra, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        return self.algebra.format(self)

    def __repr__(self) -> str:
        return f"Element({self.algebra.format(self)!r})"


class LeavittAlgebra:
    def __init__(self, graph: Graph, field: Field | None = None) -> None:
        self.graph = graph
        self.field = field or Field.rational()
        self.special_edges: dict[str, str] = {
            v: graph.out_edges(v)[-1].id
            for v in graph.vertices
            if vertex_kind(graph, v) is VertexKind.REGULAR
        }
        self._special_set = frozenset(self.special_edges.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeavittAlgebra):
            return NotImplemented
        return self.graph == other.graph and self.field == other.field

    def __hash__(self) -> int:
        return hash((self.graph, self.field))

    def __repr__(self) -> str:
        return (
            f"LeavittAlgebra(vertices={len(self.graph.vertices)}, "
            f"edges={len(self.graph.edges)}, field={self.field.spec})"
        )

    # -- monomial plumbing -------------------------------------------------

    def monomial(self, alpha: Sequence[str], beta: Sequence[str], mid: str | None = None) -> Monomial:
        """Build alpha.beta^*, checking that both paths compose and share their range."""
        alpha_path = self.graph.make_path(alpha, None if alpha else mid)
        beta_path = self.graph.make_path(beta, None if beta else (mid or alpha_path.range))
        if alpha_path.range != beta_path.range or (mid is not None and mid != alpha_path.range):
            raise GraphValidationError(
                f"paths '{alpha_path}' and '{beta_path}' do not share a range vertex"
            )
        return Monomial(alpha_path.edges, beta_path.edges, alpha_path.range)

    def left_vertex(self, m: Monomial) -> str:
        return self.graph.source(m.alpha[0]) if m.alpha else m.mid

    def right_vertex(self, m: Monomial) -> str:
        return self.graph.source(m.beta[0]) if m.beta else m.mid

    def is_normal(self, m: Monomial) -> bool:
        return not (
            m.alpha
            and m.beta
            and m.alpha[-1] == m.beta[-1]
            and m.alpha[-1] in self._special_set
        )

    def _reducible_edge(self, m: Monomial) -> str | None:
        if m.alpha and m.beta and m.alpha[-1] == m.beta[-1] and m.alpha[-1] in self._special_set:
            return m.alpha[-1]
        return None

    def multiply_monomials(self, left: Monomial, right: Monomial) -> Monomial | None:
        """(alpha beta^*)(gamma delta^*) via CK-1; None when the product vanishes."""
        beta, gamma = left.beta, right.alpha
        if len(beta) <= len(gamma):
            if gamma[: len(beta)] != beta:
                return None
            if not beta:
                target = self.graph.source(gamma[0]) if gamma else right.mid
                if target != left.mid:
                    return None
            return Monomial(left.alpha + gamma[len(beta):], right.beta, right.mid)
        if beta[: len(gamma)] != gamma:
            return None
        if not gamma and self.graph.source(beta[0]) != right.mid:
            return None
        return Monomial(left.alpha, right.beta + beta[len(gamma):], left.mid)

    # -- construction -------------------------------------------------------

    def zero(self) -> Element:
        return Element(self, {})

    def vertex(self, v: str) -> Element:
        if not self.graph.has_vertex(v):
            raise UnknownIdentifier(f"unknown vertex '{v}'")
        return Element(self, {Monomial((), (), v): self.field.one})

    def edge(self, e: str) -> Element:
        edge = self.graph.edge(e)
        return Element(self, {Monomial((e,), (), edge.range): self.field.one})

    def ghost(self, e: str) -> Element:
        edge = self.graph.edge(e)
        return Element(self, {Monomial((), (e,), edge.range): self.field.one})

    def path(self, edges: Sequence[str], base: str | None = None) -> Element:
        path = self.graph.make_path(edges, base)
        return Element(self, {Monomial(path.edges, (), path.range): self.field.one})

    def term(self, coefficient: FieldElement, monomial: Monomial) -> Element:
        return self.normalize({monomial: coefficient})

    def vertex_sum(self, vertices: Iterable[str]) -> Element:
        return self.normalize({Monomial((), (), v): self.field.one for v in set(vertices)})

    def unit(self) -> Element:
        return self.vertex_sum(self.graph.vertices)

    # -- rewriting ----------------------------------------------------------

    def normalize(
        self,
        raw: Terms | Iterable[tuple[Monomial, FieldElement]],
        *,
        rng: random.Random | None = None,
    ) -> Element:
        """Rewrite a formal combination of composable monomials to normal form.

        With ``rng`` the pending terms are processed in random order; the
        result does not depend on the order.
        """
        pairs = raw.items() if isinstance(raw, Mapping) else raw
        pending: list[tuple[Monomial, FieldElement]] = [(m, c) for m, c in pairs if c]
        out: dict[Monomial, FieldElement] = {}
        steps = 0
        while pending:
            if rng is not None and len(pending) > 1:
                idx = rng.randrange(len(pending))
                pending[idx], pending[-1] = pending[-1], pending[idx]
            mono, coef = pending.pop()
            special = self._reducible_edge(mono)
            if special is None:
                total = out.get(mono, self.field.zero) + coef
                if total:
                    out[mono] = total
                else:
                    out.pop(mono, None)
                continue
            steps += 1
            vertex = self.graph.source(special)
            alpha, beta = mono.alpha[:-1], mono.beta[:-1]
            pending.append((Monomial(alpha, beta, vertex), coef))
            for edge in self.graph.out_edges(vertex):
                if edge.id != special:
                    pending.append(
                        (Monomial(alpha + (edge.id,), beta + (edge.id,), edge.range), -coef)
                    )
        record_normalization(steps)
        return Element(self, out)

    # -- ring operations ----------------------------------------------------

    def _check(self, *elements: Element) -> None:
        for element in elements:
            if element.algebra is not self and element.algebra != self:
                raise MixedAlgebra("operands belong to different algebras")

    def add(self, a: Element, b: Element) -> Element:
        self._check(a, b)
        out = dict(a.terms)
        for mono, coef in b.terms.items():
            total = out.get(mono, self.field.zero) + coef
            if total:
                out[mono] = total
            else:
                out.pop(mono, None)
        return Element(self, out)

    def sum(self, elements: Iterable[Element]) -> Element:
        total = self.zero()
        for element in elements:
            total = self.add(total, element)
        return total

    def scalar_mul(self, k: FieldElement, a: Element) -> Element:
        self._check(a)
        if not k:
            return self.zero()
        return Element(self, {m: c * k for m, c in a.terms.items()})

    def raw_product(self, a: Element, b: Element) -> dict[Monomial, FieldElement]:
        self._check(a, b)
        raw: dict[Monomial, FieldElement] = {}
        count = 0
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                count += 1
                product = self.multiply_monomials(m1, m2)
                if product is None:
                    continue
                raw[product] = raw.get(product, self.field.zero) + c1 * c2
        record_products(count)
        return raw

    def mul(self, a: Element, b: Element) -> Element:
        return self.normalize(self.raw_product(a, b))

    def product(self, *factors: Element) -> Element:
        if not factors:
            raise ValueError("product needs at least one factor")
        result = factors[0]
        for factor in factors[1:]:
            result = self.mul(result, factor)
        return result

    def star(self, a: Element) -> Element:
        self._check(a)
        return Element(self, {m.star(): c for m, c in a.terms.items()})

    def local_unit(self, elements: Iterable[Element]) -> Element:
        """Sum of the vertices at both ends of every monomial; u*u = u and u*a = a*u = a."""
        vertices: set[str] = set()
        for element in elements:
            self._check(element)
            for mono in element.terms:
                vertices.add(self.left_vertex(mono))
                vertices.add(self.right_vertex(mono))
        return self.vertex_sum(vertices)

    # -- text ---------------------------------------------------------------

    def format(self, a: Element) -> str:
        if a.is_zero():
            return "0"
        pieces: list[str] = []
        one = self.field.one
        for mono, coef in a.items():
            negative = self.field.is_rational and coef < 0
            magnitude = -coef if negative else coef
            text = str(mono) if magnitude == one else f"{self.field.format_coefficient(magnitude)}*{mono}"
            if not pieces:
                pieces.append(f"-{text}" if negative else text)
            else:
                pieces.append(f" - {text}" if negative else f" + {text}")
        return "".join(pieces)

    def parse(self, text: str) -> Element:
        from .expressions import parse_element

        return parse_element(self, text)


def vertex_elem(algebra: LeavittAlgebra, v: str) -> Element:
    return algebra.vertex(v)


def edge_elem(algebra: LeavittAlgebra, e: str) -> Element:
    return algebra.edge(e)


def ghost_elem(algebra: LeavittAlgebra, e: str) -> Element:
    return algebra.ghost(e)
