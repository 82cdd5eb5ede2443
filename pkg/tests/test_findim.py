import random

import pytest

from leavitt_lab.algebra import LeavittAlgebra
from leavitt_lab.errors import DimensionCapExceeded, InfiniteDimensional
from leavitt_lab.findim import (
    FiniteAlgebra,
    basis,
    finite_view,
    left_annihilator,
    member,
    predicted_dimension,
    principal_left_ideal,
    right_annihilator,
    solve_combination,
    subspace_equal,
)
from leavitt_lab.graph import Graph, line_graph, loop_graph, parse_graph
from leavitt_lab.sampling import random_element
from leavitt_lab.scalar import Field
from leavitt_lab.structure import decompose

FLAGGED = parse_graph("vertex v [infinite]\nvertex w\nedge e: v -> w\n")
DIAMOND = parse_graph(
    "vertex a; vertex b; vertex c; vertex d\n"
    "edge x: a -> b\nedge y: a -> c\nedge z: b -> d\nedge t: c -> d\nedge s: a -> d\n"
)


def line2(field=None):
    alg = LeavittAlgebra(line_graph(2), field)
    return alg, finite_view(alg)


def test_basis_of_line_graph():
    alg, _ = line2()

    assert [str(m) for m in basis(alg)] == ["v1", "v2", "e1^*", "e1"]


def test_basis_of_single_vertex():
    alg = LeavittAlgebra(Graph.build(["v"], []))

    assert [str(m) for m in basis(alg)] == ["v"]


def test_loop_graph_is_infinite_dimensional():
    with pytest.raises(InfiniteDimensional) as info:
        FiniteAlgebra(LeavittAlgebra(loop_graph()))

    assert info.value.cycle == ("c",)


@pytest.mark.parametrize("graph", [line_graph(1), line_graph(4), FLAGGED, DIAMOND], ids=str)
def test_basis_size_matches_blocks(graph):
    alg = LeavittAlgebra(graph)

    assert len(basis(alg)) == decompose(alg).dimension
    assert len(basis(alg)) == sum(len(b.paths) ** 2 for b in decompose(alg).blocks)


def test_dimension_cap():
    with pytest.raises(DimensionCapExceeded) as info:
        FiniteAlgebra(LeavittAlgebra(line_graph(4)), dim_cap=10)

    assert info.value.dimension == 16
    assert info.value.exit_code == 4


def complete_dag(n):
    names = [f"v{i:02d}" for i in range(n)]
    edges = [(f"e{i:02d}_{j:02d}", names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    return Graph.build(names, edges)


def test_dimension_cap_refuses_before_enumerating(monkeypatch):
    def fail(*args, **kwargs):
        raise AssertionError("paths were enumerated")

    monkeypatch.setattr("leavitt_lab.findim.paths_ending_at", fail)
    monkeypatch.setattr("leavitt_lab.structure.paths_ending_at", fail)
    alg = LeavittAlgebra(complete_dag(15))

    with pytest.raises(DimensionCapExceeded) as info:
        FiniteAlgebra(alg, dim_cap=4096)
    assert info.value.dimension == 4 ** 14

    with pytest.raises(DimensionCapExceeded):
        decompose(alg, dim_cap=4096)


def test_predicted_dimension_matches_basis():
    for graph in (line_graph(3), FLAGGED, DIAMOND, complete_dag(4)):
        alg = LeavittAlgebra(graph)
        assert predicted_dimension(graph) == len(basis(alg))


def test_right_annihilator_examples():
    alg, view = line2()
    e1 = alg.edge("e1")

    assert subspace_equal(right_annihilator(e1), view.span([alg.vertex("v1"), e1]))
    assert right_annihilator(alg.zero()) == view.full_space()
    assert right_annihilator(alg.unit()) == view.zero_space()


def test_left_annihilator_examples():
    alg, view = line2()
    e1 = alg.edge("e1")

    assert left_annihilator(alg, right_annihilator(e1)) == view.span([alg.vertex("v2"), e1])
    assert left_annihilator(alg, view.zero_space()) == view.full_space()
    assert left_annihilator(alg, view.full_space()) == view.zero_space()


def test_principal_left_ideal_examples():
    alg, view = line2()

    assert principal_left_ideal(alg.edge("e1")) == view.span([alg.edge("e1"), alg.vertex("v2")])
    assert principal_left_ideal(alg.zero()) == view.zero_space()
    assert principal_left_ideal(alg.vertex("v1")) == view.span([alg.vertex("v1"), alg.ghost("e1")])


def test_membership():
    alg, view = line2()
    span_v2 = view.span([alg.vertex("v2")])

    assert member(alg.zero(), span_v2)
    assert not member(alg.vertex("v1"), span_v2)
    assert member(alg.scalar_mul(alg.field(3), alg.vertex("v2")), span_v2)


def test_one_sided_variants():
    alg, view = line2()
    e1 = alg.edge("e1")

    assert view.left_annihilator_of_element(e1) == view.span([alg.vertex("v2"), e1])
    assert view.principal_right_ideal(e1) == view.span([e1, alg.vertex("v1")])
    assert view.right_annihilator_of(view.left_annihilator_of_element(e1)) == view.principal_right_ideal(e1)


@pytest.mark.parametrize("field", [Field.rational(), Field.modular(5)], ids=lambda f: f.spec)
@pytest.mark.parametrize("graph", [line_graph(3), FLAGGED, DIAMOND], ids=str)
def test_annihilator_properties(graph, field):
    alg = LeavittAlgebra(graph, field)
    view = finite_view(alg)
    rng = random.Random(2)
    for _ in range(8):
        a = random_element(alg, rng)
        right = view.right_annihilator(a)
        assert view.principal_left_ideal(a).is_subspace_of(view.left_annihilator(right))
        for t in view.elements_of(right):
            assert (a * t).is_zero()
            for i in range(0, view.dim, max(1, view.dim // 6)):
                assert view.member(t * view.basis_element(i), right)


def test_canonical_form_ignores_spanning_set():
    alg = LeavittAlgebra(DIAMOND)
    view = finite_view(alg)
    rng = random.Random(9)
    gens = [random_element(alg, rng) for _ in range(5)]
    shuffled = list(reversed(gens))
    mixed = [gens[0] + gens[1], gens[1], alg.scalar_mul(alg.field(2), gens[2]), gens[3] - gens[2], gens[4]]

    assert view.span(gens) == view.span(shuffled) == view.span(mixed)


def test_solve_combination():
    q = Field.rational()
    columns = [{"x": q(1)}, {"x": q(1), "y": q(2)}]

    assert solve_combination(q, columns, {"x": q(3), "y": q(4)}) == {0: q(1), 1: q(2)}
    assert solve_combination(q, columns, {"z": q(1)}) is None
    assert solve_combination(q, [], {}) == {}
