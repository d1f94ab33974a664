import pytest

from modules.complex.closure import close_braid
from modules.complex.diagram import BraidDiagram, parse_diagram, torus_diagram
from modules.gornik.states import (Same, Wide, compare_with_engine, cone_vanishing_certificate, deformed_dimension,
                                   eigenvalue_consistency, enumerate_states, is_multiplication_invertible,
                                   multiplication_action, solve_constraints)
from modules.rasmussen.les import wide_closure_graph
from modules.ring.field import CyclotomicField
from modules.ring.potential import Variant, make_spec
from modules.utils.errors import InvalidInputError

THETA = "W 1 2 1 2\n"


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("word", [1, 2, 3, 4, -3])
def test_torus_state_counts(n, word):
    expected = n if word % 2 else n ** 2
    assert deformed_dimension(torus_diagram(word), n) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
def test_theta_states(n):
    states = enumerate_states(parse_diagram(THETA), n)
    assert len(states) == n * (n - 1)
    assert all(s["e1"] != s["e2"] for s in states)


def test_states_need_n_at_least_two():
    with pytest.raises(InvalidInputError):
        enumerate_states(torus_diagram(3), 1)


def test_wide_constraint_permutes_colours():
    edges = ["a", "b", "c", "d"]
    states = solve_constraints(edges, [Wide("c", "d", "a", "b"), Same("a", "d")], 3)
    assert len(states) == 6
    for s in states:
        assert s["c"] == s["b"]
        assert s["a"] != s["b"]


def test_multiplication_action_is_a_root_of_unity():
    state = enumerate_states(torus_diagram(1), 3)[2]
    value = multiplication_action(state, 1, 3)
    field = CyclotomicField(3)
    assert value == field.zeta(state["e1"])
    assert value ** 3 == field.one


def test_cone_certificate():
    assert cone_vanishing_certificate(wide_closure_graph(1), 3)
    assert cone_vanishing_certificate(wide_closure_graph(-1), 2)
    assert not cone_vanishing_certificate(parse_diagram(THETA), 3)
    assert not is_multiplication_invertible(parse_diagram(THETA), 2, 1, 1)


def test_cone_certificate_needs_a_wide_edge():
    with pytest.raises(InvalidInputError):
        cone_vanishing_certificate(torus_diagram(2), 2)
    with pytest.raises(InvalidInputError):
        cone_vanishing_certificate(wide_closure_graph(1), 2, wide_index=1)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("word", [1, 2])
def test_eigenvalues_are_common_zeros(n, word):
    checks = eigenvalue_consistency(close_braid(BraidDiagram(word=word), make_spec(n, Variant.EQUIVARIANT)))
    assert len(checks) == 2 ** word
    assert all(c.zeros and c.states == c.rank for c in checks)


@pytest.mark.parametrize("word", [2, 3])
def test_states_match_deformed_homology(word):
    check = compare_with_engine(word, 2)
    assert check.holds
    assert check.engine == (2 if word % 2 else 4)
