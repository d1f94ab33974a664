import pytest
from pydantic import ValidationError

from modules.complex.closure import close_cone
from modules.homology.poincare import complex_homology
from modules.rasmussen.invariants import s_N_torus, s_N_unknot, torus_knot_network
from modules.rasmussen.les import closed_cone_vanishes, verify_les, wide_closure_graph
from modules.rasmussen.recursion import (CableSpec, cable_s_N, check_ladder, linearity_step_cable,
                                         linearity_step_general, s2_cable_formula, s_N_torus_recursion,
                                         vanishing_bound)
from modules.ring.potential import Variant, make_spec
from modules.utils.errors import InvalidInputError, StructuralError


def test_general_step_thresholds():
    assert linearity_step_general(0, 1, 0, 0, 2) == 2
    assert linearity_step_general(0, 2, 0, 3, 2) is None
    assert linearity_step_general(5, -1, 0, 0, 4) == 5 + 6


def test_cable_step_thresholds():
    assert linearity_step_cable(0, -1, 4, 4, 2) == 2
    assert linearity_step_cable(0, 2, 0, 2, 3) is None
    assert linearity_step_cable(0, 3, 0, 2, 3) == 4
    assert linearity_step_cable(0, 0, 0, 0, 2) is None


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_s2_of_cables_of_slice_and_amphicheiral_knots(k):
    assert s2_cable_formula("slice", k) == 2 * k
    assert s2_cable_formula("amphicheiral", -k - 1) == -2 * k


def test_s2_formula_rejects_unknown_companions():
    with pytest.raises(InvalidInputError):
        s2_cable_formula("torus", 1)


def test_cable_spec_validation():
    with pytest.raises(ValidationError):
        CableSpec(companion="abstract", k=1)
    with pytest.raises(ValidationError):
        CableSpec(c_plus=3, k=1)
    with pytest.raises(ValidationError):
        CableSpec(k=1, n=1)
    assert CableSpec(k=2).base_plus == 0
    assert CableSpec(k=-3).name == "U_(2,-5)"


def test_cable_walk_stops_where_linearity_stops():
    spec = CableSpec(companion="abstract", c_plus=0, c_minus=2, base_plus=4, base_minus=0, k=2, n=3)
    with pytest.raises(InvalidInputError):
        cable_s_N(spec)
    result = cable_s_N(spec.model_copy(update={"c_minus": 0}))
    assert result.s == 4 + 2 * 4
    assert len(result.certificates) == 2


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("word", [1, 3, 5, -3])
def test_torus_recursion(n, word):
    assert s_N_torus_recursion(word, n).s == (word - 1 if word > 0 else word + 1) * (n - 1)


def test_recursion_needs_a_knot():
    with pytest.raises(InvalidInputError):
        s_N_torus_recursion(4, 2)


def test_vanishing_bound():
    assert vanishing_bound(1, 0, 0, 3)
    assert not vanishing_bound(2, 0, 2, 3)
    assert vanishing_bound(2, 0, 2, 2)
    assert vanishing_bound(2, 0, 2, 3, cable=False)
    assert not vanishing_bound(1, 0, 1, 3, cable=False)
    with pytest.raises(InvalidInputError):
        vanishing_bound(1, -1, 0, 2)


def test_ladder():
    check_ladder([0, 4, 8], 3)
    with pytest.raises(StructuralError):
        check_ladder([0, 2, 6], 2)


def test_unknot():
    assert s_N_unknot(5).s == 0


def test_torus_knot_network_uses_the_simplified_twist():
    assert len(torus_knot_network(5, 2).pieces) == 2
    assert len(torus_knot_network(1, 2).pieces) == 1


@pytest.mark.parametrize("word, n, s", [(1, 2, 0), (3, 2, 2), (-3, 2, -2), (3, 3, 4)])
def test_pipeline(word, n, s):
    result = s_N_torus(word, n)
    assert result.s == s
    assert result.method == "pipeline"
    assert result.s == s_N_torus_recursion(word, n).s


@pytest.mark.slow
def test_pipeline_t25():
    assert s_N_torus(5, 2).s == 4


def test_pipeline_needs_a_knot():
    with pytest.raises(InvalidInputError):
        s_N_torus(2, 2)


def test_les_generic():
    report = verify_les(1, 2)
    assert report.alternating_sum_zero
    assert report.exact
    assert report.certificate is None
    assert report.holds


def test_les_deformed_is_certified():
    report = verify_les(1, 2, Variant.DEFORMED)
    assert report.certificate
    assert report.certified_match
    assert report.cone_vanishes
    assert report.holds


@pytest.mark.slow
def test_les_generic_k2():
    assert verify_les(2, 2).alternating_sum_zero


def test_les_arguments():
    with pytest.raises(InvalidInputError):
        verify_les(1, 2, Variant.EQUIVARIANT)
    with pytest.raises(InvalidInputError):
        verify_les(0, 2)
    with pytest.raises(InvalidInputError):
        verify_les(1, 2, tail=2)


def test_wide_closure_graph():
    graph = wide_closure_graph(1)
    assert graph.wide_edges == 1
    assert graph.positive_crossings == 1
    assert graph.is_closed


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("tail", [1, -1])
def test_closed_cone_has_no_deformed_homology(n, tail):
    spec = make_spec(n, Variant.EQUIVARIANT)
    result = complex_homology(close_cone(spec, tail), Variant.DEFORMED)
    assert result.dims.ranks == {}
    assert closed_cone_vanishes(spec, tail)
