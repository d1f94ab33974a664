import pytest

from modules.mf.factorization import KoszulFactorization, arc_mf, resolution_mf, tensor, wide_edge_mf
from modules.mf.homotopy import is_null_homotopic
from modules.mf.morphisms import chi0, chi1, identity, multiplication, xi0, xi1
from modules.mf.moy import verify_moy_package, verify_saddle_compositions
from modules.mf.reduction import exclude_variable, find_linear_row
from modules.ring.potential import Variant, make_spec, potential
from modules.utils.errors import InvalidInputError

STANDARD = ("x1", "x2", "x3", "x4")


@pytest.mark.parametrize("variant", list(Variant))
def test_arc_squares_to_potential_difference(variant):
    spec = make_spec(3, variant)
    mf = arc_mf(spec, "x3", "x1")
    mf.check()
    assert mf.potential == potential(spec, mf.ring, "x1") - potential(spec, mf.ring, "x3")
    assert mf.rank == 2


@pytest.mark.parametrize("variant", list(Variant))
def test_wide_edge_potential(variant):
    spec = make_spec(2, variant)
    mf = wide_edge_mf(spec, *STANDARD)
    mf.check()
    ring = mf.ring
    expected = sum(potential(spec, ring, x) for x in ("x1", "x2")) - sum(potential(spec, ring, x) for x in ("x3", "x4"))
    assert mf.potential == expected
    assert mf.shift == -1


def test_wide_edge_needs_distinct_marks(generic2):
    with pytest.raises(InvalidInputError):
        wide_edge_mf(generic2, "x1", "x1", "x3", "x4")


def test_gluing_two_arcs_and_excluding_the_middle_mark(generic2):
    glued = tensor(arc_mf(generic2, "x3", "x5"), arc_mf(generic2, "x5", "x1"))
    assert isinstance(glued, KoszulFactorization)
    assert "x5" not in glued.boundary
    assert find_linear_row(glued, "x5") is not None
    result = exclude_variable(glued, "x5")
    assert result.excluded
    reduced = result.factorization
    assert reduced.length == 1
    assert reduced.potential == potential(generic2, reduced.ring, "x1") - potential(generic2, reduced.ring, "x3")


def test_boundary_mark_cannot_be_excluded(generic2):
    with pytest.raises(InvalidInputError):
        exclude_variable(arc_mf(generic2, "x3", "x1"), "x1")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_saddle_compositions(n):
    checked = verify_saddle_compositions(make_spec(n, Variant.GENERIC))
    assert "chi1.chi0 = m(x1-x4)" in checked
    assert "xi1.xi0 = m(x1-x3)" in checked


def test_saddles_are_chain_maps_of_degree_one(equivariant2):
    ring = equivariant2.ring(STANDARD)
    for f in (chi0(equivariant2, ring=ring), chi1(equivariant2, ring=ring),
              xi0(equivariant2, ring=ring), xi1(equivariant2, ring=ring)):
        assert f.is_chain_map()
        assert f.degree() == 1


def test_mixed_saddle_composite_is_null_homotopic(generic2):
    ring = generic2.ring(STANDARD)
    assert is_null_homotopic(xi1(generic2, ring=ring) @ chi0(generic2, ring=ring))


def test_multiplication_by_a_mark_difference_on_arcs_is_null_homotopic(generic2):
    arcs = resolution_mf(generic2, "arcs", STANDARD)
    ring = arcs.ring
    assert is_null_homotopic(multiplication(arcs, ring["x1"] - ring["x3"]))
    assert not is_null_homotopic(identity(arcs))


@pytest.mark.slow
def test_moy_decomposition_package_n2():
    report = verify_moy_package(make_spec(2, Variant.GENERIC))
    assert "P.J ~ 0" in report.certified
    assert report.finite_rank == 8
