from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from typing import Literal, Sequence, Union

from .algebra import Element, LeavittAlgebra, Monomial
from .errors import (
    CyclicGraph,
    DimensionCapExceeded,
    NotIdempotent,
    PreconditionViolation,
    TheoremViolation,
)
from .findim import DEFAULT_DIM_CAP, FiniteAlgebra, Subspace, echelon, finite_view, kernel, solve_combination
from .graph import Graph, find_cycle, is_loop_graph, paths_up_to
from .metrics import observe_check
from .report import Certificate
from .sampling import random_element
from .scalar import Field
from .structure import MatricialDecomposition, decompose, loop_counterexample_certificate

log = logging.getLogger(__name__)


def _timed(check: str, started: float, ok: bool) -> None:
    observe_check(check, "pass" if ok else "fail", time.perf_counter() - started)


# -- P-injectivity --------------------------------------------------------------


@dataclass(frozen=True)
class PInjectivityCheck:
    element: Element
    side: Literal["right", "left"]
    double_annihilator: Subspace
    principal_ideal: Subspace
    view: FiniteAlgebra

    @property
    def holds(self) -> bool:
        return self.double_annihilator == self.principal_ideal

    def certificate(self) -> Certificate:
        if self.side == "right":
            names = ("l_r", "Ra")
        else:
            names = ("r_l", "aR")
        return Certificate(
            kind=f"{self.side}_p_injectivity",
            recheck="pinj" if self.side == "right" else "pinj --left",
            holds=self.holds,
            payload={
                "a": str(self.element),
                names[0]: [str(x) for x in self.view.elements_of(self.double_annihilator)],
                names[1]: [str(x) for x in self.view.elements_of(self.principal_ideal)],
            },
        )


def is_p_injective_at(a: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> PInjectivityCheck:
    """l(r(a)) = Ra, compared as canonical echelon forms."""
    started = time.perf_counter()
    view = finite_view(a.algebra, dim_cap)
    check = PInjectivityCheck(
        a,
        "right",
        view.left_annihilator(view.right_annihilator(a)),
        view.principal_left_ideal(a),
        view,
    )
    _timed("p_injectivity", started, check.holds)
    return check


def is_left_p_injective_at(a: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> PInjectivityCheck:
    started = time.perf_counter()
    view = finite_view(a.algebra, dim_cap)
    check = PInjectivityCheck(
        a,
        "left",
        view.right_annihilator_of(view.left_annihilator_of_element(a)),
        view.principal_right_ideal(a),
        view,
    )
    _timed("left_p_injectivity", started, check.holds)
    return check


# -- regularity -------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityWitness:
    a: Element
    r: Element

    def __post_init__(self) -> None:
        if self.a.algebra.product(self.a, self.r, self.a) != self.a:
            raise PreconditionViolation(f"{self.r} is not a regularity witness for {self.a}")

    def certificate(self) -> Certificate:
        return Certificate(
            kind="regularity",
            recheck="witness",
            holds=True,
            payload={"a": str(self.a), "r": str(self.r)},
        )


def regularity_witness(a: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> RegularityWitness:
    """Solve a*x*a = a over the basis; free parameters are set to zero."""
    started = time.perf_counter()
    view = finite_view(a.algebra, dim_cap)
    solution = solve_combination(view.field, view.sandwich_operator(a), view.coords(a))
    _timed("regularity", started, solution is not None)
    if solution is None:
        raise TheoremViolation(f"no regularity witness for {a} in an acyclic algebra")
    return RegularityWitness(a, view.element(solution))


@dataclass(frozen=True)
class XravaCheck:
    a: Element
    r: Element
    x: Element
    v: Element
    rebuilt: Element
    complement_kills_a: bool
    complement_kills_x: bool

    @property
    def holds(self) -> bool:
        return self.rebuilt == self.x and self.complement_kills_a and self.complement_kills_x

    def certificate(self) -> Certificate:
        return Certificate(
            kind="xrava",
            recheck="witness",
            holds=self.holds,
            payload={
                "a": str(self.a),
                "r": str(self.r),
                "x": str(self.x),
                "v": str(self.v),
                "x_r_a_v": str(self.rebuilt),
                "a_times_v_minus_ra_is_zero": self.complement_kills_a,
                "x_times_v_minus_ra_is_zero": self.complement_kills_x,
            },
        )


def verify_xrava_identity(
    a: Element, r: Element, x: Element, *, dim_cap: int = DEFAULT_DIM_CAP
) -> XravaCheck:
    """x = x*r*a*v for x in l(r(a)), v = local_unit({x, a}).

    v - r*a lies in r(a), so x*(v - r*a) = 0; hence x = x*v = x*r*a and x is in Ra.
    """
    view = finite_view(a.algebra, dim_cap)
    if not view.member(x, view.left_annihilator(view.right_annihilator(a))):
        raise PreconditionViolation(f"{x} is not in the double annihilator of {a}")
    algebra = a.algebra
    v = algebra.local_unit([x, a])
    complement = v - r * a
    check = XravaCheck(
        a=a,
        r=r,
        x=x,
        v=v,
        rebuilt=algebra.product(x, r, a, v),
        complement_kills_a=(a * complement).is_zero(),
        complement_kills_x=(x * complement).is_zero(),
    )
    observe_check("xrava", "pass" if check.holds else "fail", 0.0)
    return check


# -- corners ----------------------------------------------------------------------


class CornerAlgebra:
    """e*R*e with unit e; subspaces are reported in the ambient coordinates."""

    def __init__(self, e: Element, view: FiniteAlgebra) -> None:
        self.unit = e
        self.view = view
        self.space = echelon(view.field, view.dim, view.sandwich_operator(e))
        self.basis = view.elements_of(self.space)

    @property
    def dim(self) -> int:
        return self.space.rank

    def contains(self, x: Element) -> bool:
        return self.view.member(x, self.space)

    def _require(self, x: Element) -> None:
        if not self.contains(x):
            raise PreconditionViolation(f"{x} is not in the corner of {self.unit}")

    def _lift(self, local: Subspace) -> Subspace:
        vectors = []
        for coefficients in local.vectors():
            vector: dict[int, object] = {}
            for j, c in coefficients.items():
                for k, value in self.view.coords(self.basis[j]).items():
                    vector[k] = vector.get(k, self.view.field.zero) + c * value
            vectors.append(vector)
        return echelon(self.view.field, self.view.dim, vectors)

    def right_annihilator(self, a: Element) -> Subspace:
        columns = [self.view.coords(a * b) for b in self.basis]
        return self._lift(kernel(self.view.field, columns))

    def left_annihilator(self, space: Subspace) -> Subspace:
        generators = self.view.elements_of(space)
        if not generators:
            return self.space
        columns = [
            {(g, k): value for g, s in enumerate(generators) for k, value in self.view.coords(b * s).items()}
            for b in self.basis
        ]
        return self._lift(kernel(self.view.field, columns))

    def principal_left_ideal(self, a: Element) -> Subspace:
        return echelon(self.view.field, self.view.dim, (self.view.coords(b * a) for b in self.basis))

    def is_p_injective_at(self, a: Element) -> PInjectivityCheck:
        self._require(a)
        started = time.perf_counter()
        check = PInjectivityCheck(
            a,
            "right",
            self.left_annihilator(self.right_annihilator(a)),
            self.principal_left_ideal(a),
            self.view,
        )
        _timed("corner_p_injectivity", started, check.holds)
        return check

    def certificate(self, elements: Sequence[Element]) -> Certificate:
        checks = [self.is_p_injective_at(x) for x in elements]
        return Certificate(
            kind="corner",
            recheck="corner",
            holds=all(c.holds for c in checks),
            payload={
                "e": str(self.unit),
                "dim": self.dim,
                "basis": [str(b) for b in self.basis],
                "checked": [str(c.element) for c in checks],
            },
        )


def corner(e: Element, *, dim_cap: int = DEFAULT_DIM_CAP) -> CornerAlgebra:
    if e * e != e:
        raise NotIdempotent(f"{e} is not idempotent")
    return CornerAlgebra(e, finite_view(e.algebra, dim_cap))


# -- bounded search (cyclic graphs) -----------------------------------------------


@dataclass(frozen=True)
class Found:
    witness: RegularityWitness
    span_size: int


@dataclass(frozen=True)
class NotFoundUpTo:
    max_len: int
    span_size: int


SearchOutcome = Union[Found, NotFoundUpTo]


def bounded_regularity_search(
    a: Element, max_len: int, *, dim_cap: int = DEFAULT_DIM_CAP
) -> SearchOutcome:
    """Solve a*x*a = a for x in u*L*u spanned by normal monomials of length <= max_len.

    u = local_unit({a}); a monomial m gives u*m*u = m or 0, so the corner
    restriction loses no solutions inside the truncation.
    """
    started = time.perf_counter()
    algebra = a.algebra
    corner_vertices = {
        v for m in a.terms for v in (algebra.left_vertex(m), algebra.right_vertex(m))
    }
    by_range: dict[str, list[tuple[str, ...]]] = {}
    for path in paths_up_to(algebra.graph, max_len):
        if path.source in corner_vertices:
            by_range.setdefault(path.range, []).append(path.edges)
    candidates: list[Monomial] = []
    for w, paths in sorted(by_range.items()):
        for alpha in paths:
            for beta in paths:
                if len(alpha) + len(beta) <= max_len:
                    mono = Monomial(alpha, beta, w)
                    if algebra.is_normal(mono):
                        candidates.append(mono)
    candidates.sort(key=Monomial.sort_key)
    if len(candidates) > dim_cap:
        raise DimensionCapExceeded(len(candidates), dim_cap)
    columns = [
        dict(algebra.product(a, Element(algebra, {m: algebra.field.one}), a).terms) for m in candidates
    ]
    solution = solve_combination(algebra.field, columns, dict(a.terms))
    _timed("bounded_search", started, solution is not None)
    if solution is None:
        return NotFoundUpTo(max_len, len(candidates))
    r = Element(algebra, {candidates[j]: c for j, c in solution.items()})
    return Found(RegularityWitness(a, r), len(candidates))


# -- homomorphism extension --------------------------------------------------------


@dataclass(frozen=True)
class HomomorphismExtension:
    """f: aR -> R, f(a*t) = d*t; extended to R as x -> c*x when c*a = d."""

    a: Element
    d: Element
    status: Literal["extended", "not_well_defined", "not_extendable"]
    c: Element | None = None
    obstruction: Element | None = None

    def certificate(self) -> Certificate:
        payload = {"a": str(self.a), "d": str(self.d), "status": self.status}
        if self.c is not None:
            payload["c"] = str(self.c)
        if self.obstruction is not None:
            payload["t"] = str(self.obstruction)
        return Certificate(
            kind="homomorphism_extension",
            recheck="pinj",
            holds=self.status != "not_extendable",
            payload=payload,
        )


def extend_principal_homomorphism(
    a: Element, d: Element, *, dim_cap: int = DEFAULT_DIM_CAP
) -> HomomorphismExtension:
    view = finite_view(a.algebra, dim_cap)
    a.algebra._check(d)
    kills_a = view.right_annihilator(a)
    for t in view.elements_of(kills_a):
        if not (d * t).is_zero():
            return HomomorphismExtension(a, d, "not_well_defined", obstruction=t)
    solution = solve_combination(view.field, view.right_operator(a), view.coords(d))
    if solution is None:
        return HomomorphismExtension(a, d, "not_extendable")
    return HomomorphismExtension(a, d, "extended", c=view.element(solution))


# -- classification -----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    graph: Graph
    field: Field
    cycle: tuple[str, ...] | None
    dimension: int | None
    evidence: tuple[Certificate, ...]

    def __post_init__(self) -> None:
        if not self.evidence:
            raise TheoremViolation("a verdict needs at least one certificate")

    @property
    def classification(self) -> Literal["Acyclic", "Cyclic"]:
        return "Acyclic" if self.cycle is None else "Cyclic"

    @property
    def regular(self) -> bool:
        return self.cycle is None

    @property
    def p_injective(self) -> bool:
        return self.cycle is None

    @property
    def locally_matricial(self) -> bool:
        return self.cycle is None

    @property
    def exact(self) -> bool:
        return any(c.kind == "loop_counterexample" and c.holds for c in self.evidence)


def cycle_certificate(algebra: LeavittAlgebra, cycle: Sequence[str]) -> Certificate:
    path = algebra.graph.make_path(cycle)
    return Certificate(
        kind="cycle",
        recheck="classify",
        holds=path.source == path.range,
        payload={"edges": list(cycle), "base": path.source},
    )


def cycle_complement(algebra: LeavittAlgebra, cycle: Sequence[str]) -> Element:
    path = algebra.graph.make_path(cycle)
    return algebra.vertex(path.source) - algebra.path(path.edges, path.source)


def search_certificate(a: Element, outcome: SearchOutcome) -> Certificate:
    payload: dict[str, object] = {"a": str(a), "span_size": outcome.span_size}
    if isinstance(outcome, Found):
        payload.update(outcome="found", r=str(outcome.witness.r))
    else:
        payload.update(outcome="not_found", max_len=outcome.max_len)
    return Certificate(
        kind="bounded_search",
        recheck="witness",
        holds=isinstance(outcome, NotFoundUpTo),
        payload=payload,
    )


def dimension_certificate(algebra: LeavittAlgebra, dim_cap: int) -> tuple[int, Certificate]:
    view = finite_view(algebra, dim_cap)
    decomposition = decompose(algebra, dim_cap=dim_cap)
    return view.dim, Certificate(
        kind="dimension",
        recheck="decompose",
        holds=view.dim == decomposition.dimension,
        payload={
            "basis": view.dim,
            "blocks": {v: n for v, n in decomposition.shape},
        },
    )


def classify(
    graph: Graph,
    field: Field | None = None,
    *,
    seed: int = 0,
    samples: int = 50,
    dim_cap: int = DEFAULT_DIM_CAP,
    search_max_len: int = 6,
) -> Verdict:
    algebra = LeavittAlgebra(graph, field)
    cycle = find_cycle(graph)
    evidence: list[Certificate] = []
    if cycle is None:
        dimension, certificate = dimension_certificate(algebra, dim_cap)
        evidence.append(certificate)
        rng = random.Random(seed)
        for _ in range(samples):
            a = random_element(algebra, rng)
            evidence.append(regularity_witness(a, dim_cap=dim_cap).certificate())
            check = is_p_injective_at(a, dim_cap=dim_cap)
            if not check.holds:
                raise TheoremViolation(f"P-injectivity failed at {a} in an acyclic algebra")
            evidence.append(check.certificate())
        log.info("classified", extra={"classification": "Acyclic", "dimension": dimension})
        return Verdict(graph, algebra.field, None, dimension, tuple(evidence))
    evidence.append(cycle_certificate(algebra, cycle))
    a = cycle_complement(algebra, cycle)
    outcome = bounded_regularity_search(a, search_max_len, dim_cap=dim_cap)
    if isinstance(outcome, Found):
        raise TheoremViolation(f"{a} has a regularity witness {outcome.witness.r}")
    evidence.append(search_certificate(a, outcome))
    if is_loop_graph(graph):
        evidence.append(loop_counterexample_certificate(algebra).certificate())
    log.info("classified", extra={"classification": "Cyclic", "cycle": ".".join(cycle)})
    return Verdict(graph, algebra.field, cycle, None, tuple(evidence))


# -- re-verification -------------------------------------------------------------------


def recheck_certificate(
    certificate: Certificate, algebra: LeavittAlgebra, *, dim_cap: int = DEFAULT_DIM_CAP
) -> bool:
    """Recompute a certificate from its payload; True when the recorded outcome reproduces."""
    payload = certificate.payload
    kind = certificate.kind
    try:
        if kind == "regularity":
            RegularityWitness(algebra.parse(payload["a"]), algebra.parse(payload["r"]))
            return certificate.holds
        if kind in ("right_p_injectivity", "left_p_injectivity"):
            a = algebra.parse(payload["a"])
            check = (is_p_injective_at if kind.startswith("right") else is_left_p_injective_at)(a, dim_cap=dim_cap)
            return check.holds == certificate.holds
        if kind == "xrava":
            a, r, x = (algebra.parse(payload[k]) for k in ("a", "r", "x"))
            return verify_xrava_identity(a, r, x, dim_cap=dim_cap).holds == certificate.holds
        if kind == "cycle":
            return cycle_certificate(algebra, payload["edges"]).holds == certificate.holds
        if kind == "bounded_search":
            a = algebra.parse(payload["a"])
            if payload["outcome"] == "found":
                RegularityWitness(a, algebra.parse(payload["r"]))
                return not certificate.holds
            outcome = bounded_regularity_search(a, int(payload["max_len"]), dim_cap=dim_cap)
            return isinstance(outcome, NotFoundUpTo) == certificate.holds
        if kind == "loop_counterexample":
            return loop_counterexample_certificate(algebra).holds == certificate.holds
        if kind == "dimension":
            return dimension_certificate(algebra, dim_cap)[1] == certificate
        if kind == "corner":
            handle = corner(algebra.parse(payload["e"]), dim_cap=dim_cap)
            elements = [algebra.parse(x) for x in payload.get("checked", [])]
            return handle.certificate(elements) == certificate
        if kind == "homomorphism_extension":
            a, d = algebra.parse(payload["a"]), algebra.parse(payload["d"])
            result = extend_principal_homomorphism(a, d, dim_cap=dim_cap)
            return result.status == payload["status"]
        if kind == "block_units":
            return block_units_certificate(decompose(algebra, dim_cap=dim_cap)) == certificate
    except (PreconditionViolation, CyclicGraph, KeyError) as exc:
        log.warning("recheck failed", extra={"kind": kind, "error": str(exc)})
        return False
    raise PreconditionViolation(f"unknown certificate kind '{kind}'")


def block_units_certificate(decomposition: MatricialDecomposition) -> Certificate:
    algebra = decomposition.algebra
    units = {block.vertex: decomposition.block_identity(block.vertex) for block in decomposition.blocks}
    idempotent = all(u * u == u for u in units.values())
    orthogonal = all((units[v] * units[w]).is_zero() for v in units for w in units if v != w)
    total = algebra.sum(units.values()) == algebra.unit()
    return Certificate(
        kind="block_units",
        recheck="decompose",
        holds=idempotent and orthogonal and total,
        payload={
            "units": {v: str(u) for v, u in units.items()},
            "idempotent": idempotent,
            "orthogonal": orthogonal,
            "sum_is_unit": total,
        },
    )
