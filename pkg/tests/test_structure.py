import numpy as np
import pytest
from pydantic import ValidationError
from sympy import QQ

from modules.structure.decompose import (ElementaryPiece, GradedModuleOverA, decompose, extract_s_N,
                                         homology_over_A)
from modules.structure.graded_complex import GradedFreeComplexOverA, from_blocks
from modules.structure.random_complex import assemble, random_complex
from modules.utils.errors import InvalidInputError, StructuralError, VerificationError


def small_complex() -> GradedFreeComplexOverA:
    """F[a]{q^5} --a--> F[a]{q^1} plus a free generator, N=2"""
    return from_blocks(2, {0: [5, 3], 1: [1]}, {0: {(0, 0): 1}}, "small")


def test_exponent_forced_by_grading():
    complex_ = small_complex()
    assert complex_.exponent(0, 0, 0) == 1
    assert complex_.exponent(0, 1, 0) is None
    with pytest.raises(StructuralError):
        complex_.set_entry(0, 1, 0, 1)
    with pytest.raises(StructuralError):
        complex_.set_entry(0, 0, 0, 1, a_power=2)


def test_d_squared_is_checked():
    with pytest.raises(VerificationError):
        from_blocks(1, {0: [0], 1: [0], 2: [0]}, {0: {(0, 0): 1}, 1: {(0, 0): 1}})
    with pytest.raises(InvalidInputError):
        from_blocks(0, {}, {})


def test_specializations():
    complex_ = small_complex()
    assert complex_.dims_at_zero() == {(0, 5): 1, (0, 3): 1, (1, 1): 1}
    assert complex_.dims_at_one() == {0: 1}
    assert complex_.euler_characteristic() == {5: 1, 3: 1, 1: -1}


def test_decompose_small_complex():
    found = decompose(small_complex())
    assert [p.kind for p in found.pieces] == ["cancel", "free"]
    cancel = found.of_kind("cancel")[0]
    assert (cancel.h, cancel.q, cancel.target_q, cancel.k) == (0, 5, 1, 1)
    modules = homology_over_A(small_complex(), found)
    assert modules[0].free == [3]
    assert modules[1].torsion == [(1, 1)]


def test_units_cancel_without_torsion():
    complex_ = from_blocks(2, {0: [2, 6], 1: [2, 2]}, {0: {(0, 0): 1, (0, 1): 3, (1, 1): 2}})
    found = decompose(complex_)
    assert found.of_kind("free") == []
    assert sorted(p.k for p in found.of_kind("cancel")) == [0, 1]
    assert homology_over_A(complex_, found)[1].torsion == [(2, 1)]


def test_module_validation():
    with pytest.raises(ValidationError):
        GradedModuleOverA(torsion=[(0, 0)])
    assert GradedModuleOverA(free=[-1, 3, 1]).free == [3, 1, -1]


def test_extract_s_N():
    assert extract_s_N(GradedModuleOverA(free=[1, 3]), 2) == 2
    assert extract_s_N(GradedModuleOverA(free=[-2, 0, 2]), 3) == 0
    with pytest.raises(StructuralError):
        extract_s_N(GradedModuleOverA(free=[1]), 2)
    with pytest.raises(StructuralError):
        extract_s_N(GradedModuleOverA(free=[-3, 3]), 2)


def test_assembled_pieces_come_back():
    pieces = [ElementaryPiece(kind="cancel", h=0, q=4, target_q=0, k=1),
              ElementaryPiece(kind="cancel", h=-1, q=2, target_q=2, k=0),
              ElementaryPiece(kind="free", h=0, q=2)]
    complex_ = assemble(pieces, 2, np.random.default_rng(7))
    found = decompose(complex_)
    assert sorted(p.model_dump_json() for p in found.pieces) == sorted(p.model_dump_json() for p in pieces)


def _free_ranks(found):
    free = {}
    for p in found.of_kind("free"):
        free[p.h] = free.get(p.h, 0) + 1
    return free


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("n", [2, 3])
def test_random_complexes(seed, n):
    complex_, pieces = random_complex(seed, n)
    found = decompose(complex_)
    assert complex_.dims_at_one() == _free_ranks(found)
    assert sorted(p.model_dump_json() for p in found.pieces) == sorted(p.model_dump_json() for p in pieces)


@pytest.mark.slow
def test_many_random_complexes():
    for seed in range(100):
        complex_, _ = random_complex(seed, 2, count=10)
        assert complex_.dims_at_one() == _free_ranks(decompose(complex_))


def test_change_of_basis_is_verified():
    found = decompose(small_complex())
    found.basis[0] = {(0, 0): QQ(1)}
    with pytest.raises(VerificationError):
        found.check()
