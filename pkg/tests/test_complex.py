import pytest
from pydantic import ValidationError
from sympy import QQ

from modules.complex.chain import ComplexOfMF, find_pivot, gaussian_eliminate, mapping_cone, scalar_isomorphism
from modules.complex.closure import (ClosedNetwork, Piece, close_braid, close_complex, close_simplified,
                                     graph_network)
from modules.complex.diagram import BraidDiagram, load_diagram, parse_diagram, torus_diagram
from modules.complex.local import (STANDARD, b_complex, braid_complex, build_F_k, cokernel, crossing_complex,
                                   simplified_b_complex)
from modules.homology.poincare import complex_homology
from modules.mf.factorization import resolution_mf
from modules.mf.morphisms import identity, multiplication
from modules.ring.potential import Variant
from modules.utils.errors import InvalidInputError, ResourceGuardError

HOPF = "X+ 1 2 3 4\nX+ 3 4 1 2\n"


def test_braid_diagram_marks():
    diagram = BraidDiagram(word=-3)
    assert diagram.sign == -1
    assert diagram.crossings == 3
    assert diagram.crossing_marks(0) == ("x5", "x6", "x3", "x4")
    assert diagram.crossing_marks(2) == ("x1", "x2", "x7", "x8")
    assert diagram.interior_marks == ["x5", "x6", "x7", "x8"]


def test_empty_braid_word_rejected():
    with pytest.raises(ValidationError):
        BraidDiagram(word=0)


def test_parse_diagram_and_components():
    graph = parse_diagram("# Hopf link\n" + HOPF, "hopf")
    assert graph.is_closed
    assert graph.positive_crossings == 2
    assert graph.components() == 2
    assert parse_diagram(graph.to_text()).vertices == graph.vertices


@pytest.mark.parametrize("n, components", [(1, 1), (3, 1), (4, 2), (-5, 1)])
def test_torus_diagram_components(n, components):
    graph = torus_diagram(n)
    assert graph.is_closed
    assert graph.components() == components


@pytest.mark.parametrize("text", ["X+ 1 2 3", "Y 1 2 3 4", "X+ 1 2 3 four", "# nothing\n"])
def test_malformed_diagrams(text):
    with pytest.raises(InvalidInputError):
        parse_diagram(text)


def test_open_graph_is_rejected():
    graph = parse_diagram("W 1 2 3 4")
    assert graph.open_edges == [1, 2, 3, 4]
    with pytest.raises(InvalidInputError):
        graph.require_closed()


def test_load_diagram_uses_file_stem(diagram_file):
    graph = load_diagram(diagram_file(HOPF, "hopf.txt"))
    assert graph.name == "hopf"
    with pytest.raises(InvalidInputError):
        load_diagram(diagram_file(HOPF).parent / "missing.txt")
    undecodable = diagram_file(HOPF).parent / "binary.txt"
    undecodable.write_bytes(b"\xff\xfe\x00bad")
    with pytest.raises(InvalidInputError):
        load_diagram(undecodable)


@pytest.mark.parametrize("sign", [1, -1])
def test_crossing_complex(sign, equivariant2):
    complex_ = crossing_complex(sign, equivariant2)
    complex_.check()
    assert complex_.degrees == ([-1, 0] if sign > 0 else [0, 1])


def test_crossing_sign_validated(generic2):
    with pytest.raises(InvalidInputError):
        crossing_complex(2, generic2)


def test_b_complex_degrees(generic2):
    assert b_complex(0, generic2).degrees == [0]
    assert b_complex(2, generic2).degrees == [-4, -3, -2, -1, 0]
    assert b_complex(-1, generic2).degrees == [0, 1, 2]
    b_complex(1, generic2).check(exact=False)


def test_F_k_embeds_the_previous_twist(generic2):
    f = build_F_k(2, generic2)
    assert f.source.degrees == [-2, -1, 0]
    quotient = cokernel(f)
    assert quotient.degrees == [-4, -3]
    with pytest.raises(InvalidInputError):
        build_F_k(0, generic2)


def test_mapping_cone_grading(generic2):
    cone = mapping_cone(build_F_k(1, generic2))
    assert cone.degrees == [-1, 0, 1]
    assert [len(cone.objects(h)) for h in cone.degrees] == [1, 2, 1]
    cone.check(exact=False)


def _pivot_complex(spec, epsilon=None) -> ComplexOfMF:
    """A -2id-> B cancels; C -> B and A -> D are the delta and gamma of the correction"""
    ring = spec.ring(STANDARD)
    wide = resolution_mf(spec, "wide", STANDARD, ring)
    x1, x3, x4 = ring["x1"], ring["x3"], ring["x4"]
    complex_ = ComplexOfMF(spec, "pivot")
    a = complex_.add(0, wide, 0, "A")
    c = complex_.add(0, wide, 2, "C")
    b = complex_.add(1, wide, 0, "B")
    d = complex_.add(1, wide, -2, "D")
    complex_.set_map(0, a, b, identity(wide).scaled(2))
    complex_.set_map(0, c, b, multiplication(wide, x1 - x3))
    complex_.set_map(0, a, d, multiplication(wide, x1 - x4))
    if epsilon is not None:
        complex_.set_map(0, c, d, multiplication(wide, epsilon(ring)))
    complex_.check()
    return complex_


def test_identity_cone_eliminates_to_zero(generic2):
    wide = resolution_mf(generic2, "wide", STANDARD)
    complex_ = ComplexOfMF(generic2, "id")
    complex_.set_map(0, complex_.add(0, wide), complex_.add(1, wide), identity(wide))
    assert find_pivot(complex_) == (0, 0, 0, 1)
    assert gaussian_eliminate(complex_).degrees == []


@pytest.mark.parametrize("with_epsilon", [False, True])
def test_elimination_corrects_the_remaining_map(generic2, with_epsilon):
    def epsilon(ring):
        return (ring["x1"] - ring["x3"]) * (ring["x1"] - ring["x4"])

    complex_ = _pivot_complex(generic2, epsilon if with_epsilon else None)
    assert find_pivot(complex_) == (0, 0, 0, 2)
    reduced = gaussian_eliminate(complex_)
    assert [s.label for h in reduced.degrees for s in reduced.objects(h)] == ["C", "D"]
    wide = reduced.objects(0)[0].mf
    product = epsilon(wide.ring)
    expected = product * QQ(1, 2) if with_epsilon else -product * QQ(1, 2)
    assert reduced.component(0, 0, 0) == multiplication(wide, expected)
    assert reduced.rank_characteristic() == complex_.rank_characteristic()
    reduced.check()


@pytest.mark.parametrize("variant", list(Variant))
def test_elimination_keeps_closed_homology(equivariant2, variant):
    complex_ = _pivot_complex(equivariant2, lambda ring: ring["x2"] ** 2)
    before = complex_homology(close_complex(complex_), variant)
    after = complex_homology(close_complex(gaussian_eliminate(complex_)), variant)
    assert before.dims == after.dims
    assert before.torsion == after.torsion


def test_cone_of_F_1_eliminates_to_the_cokernel(generic2):
    f = build_F_k(1, generic2)
    reduced = gaussian_eliminate(mapping_cone(f))
    assert reduced.layout() == {h + 1: objects for h, objects in cokernel(f).layout().items()}
    reduced.check()


def test_scalar_isomorphism_needs_equal_shifts(generic2):
    complex_ = _pivot_complex(generic2)
    low, high = complex_.objects(0), complex_.objects(1)
    assert scalar_isomorphism(complex_.component(0, 0, 0), low[0], high[0]) == 2
    assert scalar_isomorphism(complex_.component(0, 1, 0), low[1], high[0]) is None


@pytest.mark.slow
def test_square_reduces_to_simplified_twist(generic2):
    split = braid_complex(BraidDiagram(word=2), generic2, exclude=True)
    assert [len(split.objects(h)) for h in split.degrees] == [2, 2, 1]
    assert find_pivot(split) is not None
    reduced = gaussian_eliminate(split)
    assert reduced.layout() == simplified_b_complex(1, generic2).layout()
    assert reduced.rank_characteristic() == split.rank_characteristic()
    reduced.check(exact=False)


def test_braid_complex_guard(generic2):
    with pytest.raises(ResourceGuardError):
        braid_complex(BraidDiagram(word=3), generic2, max_rows=10)


def test_network_orientation_is_checked(generic2):
    marks = {"x1": "y1", "x2": "y2", "x3": "y3", "x4": "y4"}
    with pytest.raises(InvalidInputError):
        ClosedNetwork(generic2, [Piece(crossing_complex(1, generic2), marks)], "open")


def test_stacked_closures(equivariant2):
    network = close_simplified(1, equivariant2, tail=1)
    assert network.variables == ["y1", "y2", "y3", "y4"]
    assert len(network.pieces) == 2
    assert len(close_braid(BraidDiagram(word=3), equivariant2).pieces) == 3


def test_graph_network_names_edges(equivariant2):
    network = graph_network(parse_diagram(HOPF, "hopf"), equivariant2)
    assert network.variables == ["e1", "e2", "e3", "e4"]
    assert len(list(network.vertices())) == 4
