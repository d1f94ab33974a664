import pytest
from pydantic import ValidationError

from modules.complex.closure import close_braid, graph_network, unknot_network
from modules.complex.diagram import BraidDiagram, parse_diagram
from modules.homology.closed_graphs import (closed_graph_homology, closed_shape_homology, find_double_wide_edge,
                                            merge_double_wide_edge, moy2_check, stated_basis, verify_stated_basis)
from modules.homology.engine import network_complex
from modules.homology.poincare import (GradedVectorSpaceDims, complex_homology, euler_characteristic, poincare,
                                       q_dimension)
from modules.homology.twists import compare_twist_closures
from modules.ring.potential import Variant, make_spec
from modules.utils.errors import InvalidInputError

DOUBLE = "W 1 2 3 4\nW 3 4 1 2\n"


def torus(word: int, n: int):
    return close_braid(BraidDiagram(word=word), make_spec(n, Variant.EQUIVARIANT))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_circle_degrees(n):
    circle = closed_shape_homology("circle", n)
    assert circle.rank == n
    assert circle.degrees == list(range(1 - n, n, 2))


@pytest.mark.parametrize("n", [2, 3])
def test_disjoint_circles_multiply(n):
    assert closed_shape_homology("circles", n, count=2).rank == n ** 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_theta_and_double_ranks(n):
    assert closed_shape_homology("theta", n).rank == n * (n - 1)
    assert closed_shape_homology("double", n).rank == 2 * n * (n - 1)


def test_unknown_shape():
    with pytest.raises(InvalidInputError):
        closed_shape_homology("square", 2)


@pytest.mark.parametrize("shape", ["theta", "double"])
@pytest.mark.parametrize("n", [2, 3])
def test_stated_basis_is_a_basis(shape, n):
    report = verify_stated_basis(shape, n)
    assert report.basis_spans
    assert report.rank == report.expected_rank
    assert report.shift == stated_basis(shape, n)[1]


@pytest.mark.parametrize("n", [2, 3])
def test_unknot_from_one_crossing(n):
    result = complex_homology(unknot_network(make_spec(n, Variant.EQUIVARIANT)), Variant.GENERIC)
    assert result.dims.ranks == {(0, q): 1 for q in range(1 - n, n, 2)}


def test_hopf_link():
    result = complex_homology(torus(2, 2), Variant.GENERIC)
    assert result.dims.by_degree() == {-2: 2, 0: 2}


def test_t24():
    result = complex_homology(torus(4, 2), Variant.GENERIC)
    assert result.dims.by_degree() == {-4: 2, -3: 1, -2: 1, 0: 2}


def test_trefoil_in_every_theory():
    network = torus(3, 2)
    complex_ = network_complex(network)
    generic = complex_homology(network, Variant.GENERIC, complex_)
    deformed = complex_homology(network, Variant.DEFORMED, complex_)
    equivariant = complex_homology(network, Variant.EQUIVARIANT, complex_)
    assert generic.dims.total == 4
    assert deformed.dims.total == 2
    assert deformed.torsion == []
    assert len(equivariant.torsion) == 1
    assert generic.euler == euler_characteristic(GradedVectorSpaceDims(ranks=complex_.dims_at_zero()))


def test_mirror_reverses_degrees():
    left = complex_homology(torus(2, 2), Variant.GENERIC).dims
    right = complex_homology(torus(-2, 2), Variant.GENERIC).dims
    assert right.ranks == {(-h, -q): r for (h, q), r in left.ranks.items()}


def test_closed_graph_from_diagram():
    graph = parse_diagram("W 1 2 1 2\n", "theta")
    assert closed_graph_homology(graph, make_spec(3, Variant.GENERIC)).rank == 6
    with pytest.raises(InvalidInputError):
        closed_graph_homology(parse_diagram("X+ 1 2 1 2\n"), make_spec(2, Variant.GENERIC))


def test_merge_double_wide_edge():
    graph = parse_diagram(DOUBLE, "double")
    assert find_double_wide_edge(graph) == (0, 1)
    merged = merge_double_wide_edge(graph)
    assert merged.wide_edges == 1
    merged.require_closed()
    with pytest.raises(InvalidInputError):
        merge_double_wide_edge(merged)


@pytest.mark.parametrize("n", [2, 3])
def test_moy2_relation(n):
    check = moy2_check(parse_diagram(DOUBLE, "double"), n)
    assert check.holds
    assert check.left.total == 2 * n * (n - 1)


def test_graph_homology_matches_shape():
    network = graph_network(parse_diagram(DOUBLE), make_spec(2, Variant.EQUIVARIANT))
    assert complex_homology(network, Variant.GENERIC).dims.total == closed_shape_homology("double", 2).rank


def test_graded_dims_helpers():
    dims = GradedVectorSpaceDims(ranks={(0, 1): 1, (1, 3): 2, (2, 5): 0})
    assert dims.ranks == {(0, 1): 1, (1, 3): 2}
    assert dims.by_degree() == {0: 1, 1: 2}
    assert dims.at(1) == {3: 2}
    assert euler_characteristic(dims) == {1: 1, 3: -2}
    assert poincare(dims).at_minus_one() == {1: 1, 3: -2}
    assert (dims + dims.shifted(q=2)).ranks == {(0, 1): 1, (0, 3): 1, (1, 3): 2, (1, 5): 2}
    assert q_dimension({1: 1, -1: 1}) == "1q^1 + 1q^-1"
    assert q_dimension({}) == "0"


def test_negative_rank_rejected():
    with pytest.raises(ValidationError):
        GradedVectorSpaceDims(ranks={(0, 0): -1})


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, -1, 2])
def test_twist_closures_agree(k):
    report = compare_twist_closures(k, 2)
    assert report.holds
    assert bool(report.open_level) == (k == 1)


def test_twist_closures_need_a_twist():
    with pytest.raises(InvalidInputError):
        compare_twist_closures(0, 2)
