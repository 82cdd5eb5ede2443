import random

import pytest

from leavitt_lab.algebra import LeavittAlgebra
from leavitt_lab.checkers import (
    Found,
    NotFoundUpTo,
    RegularityWitness,
    bounded_regularity_search,
    classify,
    corner,
    extend_principal_homomorphism,
    is_left_p_injective_at,
    is_p_injective_at,
    recheck_certificate,
    regularity_witness,
    verify_xrava_identity,
)
from leavitt_lab.errors import InfiniteDimensional, NotIdempotent, PreconditionViolation, TheoremViolation
from leavitt_lab.findim import finite_view
from leavitt_lab.graph import line_graph, loop_graph, parse_graph, two_cycle_graph
from leavitt_lab.sampling import random_element, random_idempotent
from leavitt_lab.scalar import Field

FLAGGED = parse_graph("vertex v [infinite]\nvertex w\nedge e: v -> w\n")
FORK = parse_graph("vertex a; vertex b; vertex c\nedge x: a -> b\nedge y: a -> b\nedge z: a -> c\n")


def line2():
    return LeavittAlgebra(line_graph(2))


def test_p_injectivity_examples():
    alg = line2()
    view = finite_view(alg)
    check = is_p_injective_at(alg.edge("e1"))

    assert check.holds
    assert check.principal_ideal == view.span([alg.vertex("v2"), alg.edge("e1")])
    assert is_p_injective_at(alg.zero()).holds
    assert is_p_injective_at(alg.vertex("v1")).holds
    assert check.certificate().payload["Ra"] == ["v2", "e1"]


def test_left_p_injectivity():
    alg = line2()

    assert is_left_p_injective_at(alg.edge("e1")).holds
    assert is_left_p_injective_at(alg.ghost("e1") + alg.vertex("v1")).holds


def test_p_injectivity_needs_finite_dimension():
    alg = LeavittAlgebra(loop_graph())

    with pytest.raises(InfiniteDimensional):
        is_p_injective_at(alg.vertex("v"))


def test_regularity_witness_examples():
    alg = line2()

    assert regularity_witness(alg.vertex("v1")).r == alg.vertex("v1")
    assert regularity_witness(alg.edge("e1")).r == alg.ghost("e1")
    assert regularity_witness(alg.zero()).r.is_zero()


def test_witness_is_reverified_on_construction():
    alg = line2()

    with pytest.raises(PreconditionViolation):
        RegularityWitness(alg.edge("e1"), alg.vertex("v1"))


def test_xrava_identity():
    alg = line2()
    a, r = alg.edge("e1"), alg.ghost("e1")

    check = verify_xrava_identity(a, r, alg.edge("e1"))
    assert check.holds
    assert check.v == alg.vertex("v1") + alg.vertex("v2")
    assert verify_xrava_identity(a, r, alg.zero()).holds
    with pytest.raises(PreconditionViolation):
        verify_xrava_identity(a, r, alg.vertex("v1"))


def test_corner_examples():
    alg = line2()

    v1_corner = corner(alg.vertex("v1"))
    assert v1_corner.dim == 1
    assert v1_corner.basis == [alg.vertex("v1")]
    assert v1_corner.is_p_injective_at(alg.vertex("v1")).holds
    assert corner(alg.unit()).dim == 4
    with pytest.raises(NotIdempotent):
        corner(alg.edge("e1"))
    with pytest.raises(PreconditionViolation):
        v1_corner.is_p_injective_at(alg.vertex("v2"))


def test_bounded_search_on_loop():
    alg = LeavittAlgebra(loop_graph())
    v, c = alg.vertex("v"), alg.edge("c")

    outcome = bounded_regularity_search(v - c, 6)
    assert isinstance(outcome, NotFoundUpTo)
    assert outcome.max_len == 6

    found = bounded_regularity_search(v, 3)
    assert isinstance(found, Found) and found.witness.r == v

    found = bounded_regularity_search(c, 1)
    assert isinstance(found, Found) and found.witness.r == alg.ghost("c")


def test_extend_principal_homomorphism():
    alg = line2()
    e1 = alg.edge("e1")

    extended = extend_principal_homomorphism(e1, alg.vertex("v2"))
    assert extended.status == "extended"
    assert extended.c * e1 == alg.vertex("v2")

    broken = extend_principal_homomorphism(e1, alg.vertex("v1"))
    assert broken.status == "not_well_defined"
    assert not (alg.vertex("v1") * broken.obstruction).is_zero()


@pytest.mark.parametrize("field", [Field.rational(), Field.modular(5)], ids=lambda f: f.spec)
@pytest.mark.parametrize("graph", [line_graph(3), FLAGGED, FORK], ids=str)
def test_acyclic_algebras_are_regular_and_p_injective(graph, field):
    alg = LeavittAlgebra(graph, field)
    view = finite_view(alg)
    rng = random.Random(4)
    for _ in range(6):
        a = random_element(alg, rng)
        witness = regularity_witness(a)
        assert a * witness.r * a == a
        assert is_p_injective_at(a).holds
        assert is_left_p_injective_at(a).holds
        double = view.left_annihilator(view.right_annihilator(a))
        for x in view.elements_of(double):
            assert verify_xrava_identity(a, witness.r, x).holds
            assert view.member(x, view.principal_left_ideal(a))
        for d in view.elements_of(double):
            result = extend_principal_homomorphism(a, d)
            assert result.status == "extended"
            assert result.c * a == d


@pytest.mark.parametrize("graph", [line_graph(3), FLAGGED, FORK], ids=str)
def test_corners_of_acyclic_algebras_are_p_injective(graph):
    alg = LeavittAlgebra(graph)
    rng = random.Random(8)
    for _ in range(5):
        e = random_idempotent(alg, rng)
        handle = corner(e)
        for x in handle.basis:
            assert handle.contains(x)
            assert handle.is_p_injective_at(x).holds
        if handle.basis:
            x = handle.basis[0] + handle.basis[-1]
            assert handle.is_p_injective_at(x).holds


def test_classify_line_graph():
    verdict = classify(line_graph(3), samples=4)

    assert verdict.classification == "Acyclic"
    assert verdict.regular and verdict.p_injective and verdict.locally_matricial
    assert verdict.dimension == 9
    assert verdict.evidence
    assert all(c.holds for c in verdict.evidence)


def test_classify_loop_attaches_exact_certificate():
    verdict = classify(loop_graph())

    assert verdict.classification == "Cyclic"
    assert verdict.cycle == ("c",)
    assert not (verdict.regular or verdict.p_injective or verdict.locally_matricial)
    assert verdict.exact
    assert {c.kind for c in verdict.evidence} == {"cycle", "bounded_search", "loop_counterexample"}


def test_classify_two_cycle():
    verdict = classify(two_cycle_graph())

    assert verdict.classification == "Cyclic"
    assert sorted(verdict.cycle) == ["e", "f"]
    assert not verdict.exact
    search = [c for c in verdict.evidence if c.kind == "bounded_search"]
    assert search and search[0].holds


def test_classify_is_deterministic():
    first = classify(FORK, seed=3, samples=3)
    second = classify(FORK, seed=3, samples=3)

    assert first.evidence == second.evidence


def test_certificates_recheck():
    alg = LeavittAlgebra(FORK)
    verdict = classify(FORK, samples=2)
    for certificate in verdict.evidence:
        assert recheck_certificate(certificate, alg)

    loop = classify(loop_graph())
    loop_alg = LeavittAlgebra(loop_graph())
    for certificate in loop.evidence:
        assert recheck_certificate(certificate, loop_alg)


def test_tampered_witness_fails_recheck():
    alg = line2()
    certificate = regularity_witness(alg.edge("e1")).certificate()
    tampered = certificate.model_copy(update={"payload": {"a": "e1", "r": "v1"}})

    assert not recheck_certificate(tampered, alg)


def test_verdict_needs_evidence():
    from leavitt_lab.checkers import Verdict

    with pytest.raises(TheoremViolation):
        Verdict(line_graph(1), Field.rational(), None, 1, ())
