import random

import pytest
from sympy import QQ

from modules.ring.field import CyclotomicField, evaluate_polynomial
from modules.ring.linalg import LinearSystem, nullspace, rank, solve
from modules.ring.normal_form import QuotientRing
from modules.ring.polynomial import GradedRing
from modules.ring.potential import (Variant, g_difference, make_spec, pi_quotient, potential, potential_derivative,
                                    uv_quotients)
from modules.utils.errors import InvalidInputError, StructuralError


def test_grading_of_marks_and_a():
    ring = GradedRing(3, ["x1", "x2"])
    assert ring.homogeneous_degree(ring["x1"] ** 2 * ring["x2"]) == 6
    assert ring.homogeneous_degree(ring.a) == 6
    assert ring.homogeneous_degree(ring["x1"] + ring.one) is None


def test_duplicate_names_rejected():
    with pytest.raises(InvalidInputError):
        GradedRing(2, ["x1", "x1"])


def test_coefficients_in_one_variable():
    ring = GradedRing(2, ["x1", "x2"])
    x1, x2 = ring["x1"], ring["x2"]
    assert ring.coefficients_in(x1 ** 2 * x2 + x2, "x1") == {0: x2, 2: x2}
    assert ring.coefficients_in(x2, "x1") == {0: x2}
    assert ring.coefficients_in(ring.zero, "x1") == {}


def test_make_spec_rejects_small_n():
    with pytest.raises(InvalidInputError):
        make_spec(1)


@pytest.mark.parametrize("variant", list(Variant))
def test_pi_quotient_is_exact(variant):
    spec = make_spec(3, variant)
    ring = spec.ring(["x1", "x2"])
    pi = pi_quotient(spec, ring, "x1", "x2")
    assert pi * (ring["x1"] - ring["x2"]) == potential(spec, ring, "x1") - potential(spec, ring, "x2")


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("variant", list(Variant))
def test_uv_identity(n, variant):
    spec = make_spec(n, variant)
    rng = random.Random(n)
    names = ["x1", "x2", "x3", "x4"]
    ring = spec.ring(names)
    for _ in range(3):
        i, j, k, l = (rng.choice(names) for _ in range(4))
        u, v = uv_quotients(spec, ring, i, j, k, l)
        s = ring[i] + ring[j] - ring[k] - ring[l]
        p = ring[i] * ring[j] - ring[k] * ring[l]
        assert u * s + v * p == g_difference(spec, ring, i, j, k, l)


def test_derivative_quotient_has_n_standard_monomials():
    spec = make_spec(3, Variant.EQUIVARIANT)
    ring = spec.ring(["x"])
    quotient = QuotientRing(ring, [potential_derivative(spec, ring, "x")])
    assert len(quotient) == 3
    assert quotient.degrees == [0, 2, 4]
    assert quotient.coordinates(ring["x"] ** 3) == {0: {1: QQ(1, 4)}}


def test_infinite_quotient_is_reported():
    ring = GradedRing(2, ["x", "y"], with_a=False)
    with pytest.raises(StructuralError):
        QuotientRing(ring, [ring["x"] ** 2])


def test_roots_of_unity():
    field = CyclotomicField(3)
    roots = field.roots_of_unity()
    assert field.zeta(3) == field.one
    assert sum(roots, field.zero).is_zero
    assert (field.zeta(1) * field.zeta(2)) == field.one


def test_roots_of_unity_are_critical_points_at_a_equal_n_plus_one():
    spec = make_spec(3, Variant.EQUIVARIANT)
    ring = spec.ring(["x"])
    field = CyclotomicField(3)
    derivative = potential_derivative(spec, ring, "x")
    for k in range(3):
        value = evaluate_polynomial(derivative, {ring.index("a"): field(4), ring.index("x"): field.zeta(k)}, field)
        assert value.is_zero


def test_sparse_linear_algebra():
    entries = {0: {0: 1, 1: 2}, 1: {0: 2, 1: 4}}
    assert rank(entries, (2, 2)) == 1
    kernel = nullspace(entries, (2, 2))
    assert len(kernel) == 1
    assert kernel[0] == {1: QQ(1), 0: QQ(-2)}
    assert solve({0: {0: 1}}, {0: 3}, (1, 1)) == {0: QQ(3)}
    assert solve(entries, {0: 1, 1: 1}, (2, 2)) is None


def test_linear_system_by_labels():
    system = LinearSystem()
    system.add("e1", "u", 1)
    system.add("e1", "v", 1)
    system.add("e2", "u", 1)
    system.add_rhs("e1", 5)
    system.add_rhs("e2", 2)
    assert system.solve() == {"u": QQ(2), "v": QQ(3)}
