"""Local complexes on the marks x1..x4: crossings, the simplified twist complexes B_k, F_k and the x1 - x3 cone"""
import logging
from typing import Optional, Sequence

from modules.complex.chain import ChainMap, ComplexOfMF, exclude_interior, tensor_complexes
from modules.complex.diagram import BraidDiagram
from modules.mf.factorization import resolution_mf
from modules.mf.morphisms import chi0, chi1, identity, multiplication, tensor_morphism
from modules.mf.moy import LEFT, RIGHT, j_map, moy_models
from modules.ring.polynomial import GradedRing
from modules.ring.potential import PotentialSpec
from modules.utils.config import get_settings
from modules.utils.errors import InvalidInputError, ResourceGuardError

logger = logging.getLogger(__name__)

STANDARD = ("x1", "x2", "x3", "x4")


def _ring(spec: PotentialSpec, marks: Sequence[str], ring: Optional[GradedRing]) -> GradedRing:
    return ring if ring is not None else spec.ring(marks)


def crossing_complex(sign: int, spec: PotentialSpec, marks: Sequence[str] = STANDARD,
                     ring: Optional[GradedRing] = None) -> ComplexOfMF:
    """Positive: Gamma_1{q^N} -chi1-> Gamma_0{q^(N-1)} in degrees -1, 0; negative: Gamma_0{q^(1-N)} -chi0-> Gamma_1{q^-N} in 0, 1"""
    if sign not in (1, -1):
        raise InvalidInputError(f"Crossing sign must be +1 or -1, got {sign}")
    ring = _ring(spec, marks, ring)
    n = spec.n
    complex_ = ComplexOfMF(spec, "X+" if sign > 0 else "X-")
    if sign > 0:
        wide = complex_.add(-1, resolution_mf(spec, "wide", marks, ring), n, "1")
        arcs = complex_.add(0, resolution_mf(spec, "arcs", marks, ring), n - 1, "0")
        complex_.set_map(-1, wide, arcs, chi1(spec, marks, ring))
    else:
        arcs = complex_.add(0, resolution_mf(spec, "arcs", marks, ring), 1 - n, "0")
        wide = complex_.add(1, resolution_mf(spec, "wide", marks, ring), -n, "1")
        complex_.set_map(0, arcs, wide, chi0(spec, marks, ring))
    return complex_


def braid_complex(diagram: BraidDiagram, spec: PotentialSpec, exclude: bool = False,
                  max_rows: Optional[int] = None) -> ComplexOfMF:
    """Tensor product of the crossing complexes of b^word over the shared interior marks

    With exclude the interior marks are reduced away; for b^2 over a graded potential the doubled wide edge
    is also split into two shifted copies of Gamma'.
    """
    marks = [m for level in range(diagram.crossings + 1) for m in diagram.level_marks(level)]
    ring = spec.ring(marks)
    rows = 2 * diagram.crossings * (1 << diagram.crossings)
    limit = max_rows if max_rows is not None else get_settings().max_rows
    if rows > limit:
        raise ResourceGuardError(f"C(b^{diagram.word}) needs {rows} Koszul rows, guard is {limit}")
    if exclude and diagram.word == 2 and spec.graded:
        return split_square(spec)
    result = None
    for i in range(diagram.crossings):
        piece = crossing_complex(diagram.sign, spec, diagram.crossing_marks(i), ring)
        result = piece if result is None else tensor_complexes(result, piece)
    result.name = f"C(b^{diagram.word})"
    logger.info(f"Built {result.name} for N={spec.n} ({spec.variant.value}): {result.object_count()} objects, "
                f"{rows} Koszul rows")
    if exclude and diagram.interior_marks:
        result = exclude_interior(result, diagram.interior_marks)
    return result


def split_square(spec: PotentialSpec) -> ComplexOfMF:
    """C(b^2) with x5, x6 excluded and Gamma_11 = Gamma'{q} + Gamma'{q^-1} split along xi_r0 and J

    Gamma_11 is the leftmost term, so its outgoing maps composed with the two inclusions still square to zero.
    """
    models = moy_models(spec)
    ring = models.ring
    n = spec.n
    fin = models.chain_fin
    reduce = models.reduce
    j = j_map(spec)
    xi_r0 = reduce(models.xi_r0, models.chain2, fin, "xi_r0")
    chi_r1 = reduce(models.chi_r1, fin, models.chain10, "chi_r1")
    chi_l1 = reduce(models.chi_l1, fin, models.chain01, "chi_l1")
    low_left = tensor_morphism(chi1(spec, LEFT, ring), identity(models.right_arcs), models.gamma10, models.gamma00)
    low_right = tensor_morphism(identity(models.left_arcs), chi1(spec, RIGHT, ring), models.gamma01, models.gamma00)
    result = ComplexOfMF(spec, "C(b^2)|split")
    upper = result.add(-2, models.prime, 2 * n + 1, "11+")
    lower = result.add(-2, models.prime, 2 * n - 1, "11-")
    right = result.add(-1, models.prime, 2 * n - 1, "10")
    left = result.add(-1, models.prime, 2 * n - 1, "01")
    arcs = result.add(0, models.arcs, 2 * n - 2, "00")
    result.set_map(-2, upper, right, -(chi_r1 @ xi_r0))
    result.set_map(-2, upper, left, chi_l1 @ xi_r0)
    result.set_map(-2, lower, right, -(chi_r1 @ j))
    result.set_map(-2, lower, left, chi_l1 @ j)
    result.set_map(-1, right, arcs, reduce(low_left, models.chain10, models.chain00, "chi_l1"))
    result.set_map(-1, left, arcs, reduce(low_right, models.chain01, models.chain00, "chi_r1"))
    logger.info(f"Split the doubled wide edge of C(b^2) for N={n} ({spec.variant.value})")
    return result


def b_complex(k: int, spec: PotentialSpec, marks: Sequence[str] = STANDARD,
              ring: Optional[GradedRing] = None) -> ComplexOfMF:
    """B_k for any integer k; B_0 is Gamma_0 alone in degree 0"""
    ring = _ring(spec, marks, ring)
    n = spec.n
    x1, x2, x3, x4 = (ring[m] for m in marks)
    result = ComplexOfMF(spec, f"B_{k}")
    wide = resolution_mf(spec, "wide", marks, ring)
    arcs = resolution_mf(spec, "arcs", marks, ring)
    if k == 0:
        result.add(0, arcs, 0, "0")
        return result
    count = 2 * abs(k)
    if k > 0:
        for level in range(count, 0, -1):
            result.add(-level, wide, 2 * k * (n - 1) + 2 * level - 1, f"1.{level}")
        result.add(0, arcs, 2 * k * (n - 1), "0")
        for step, level in enumerate(range(count, 1, -1)):
            factor = x1 - x3 if step % 2 == 0 else x1 - x4
            result.set_map(-level, 0, 0, multiplication(wide, factor))
        result.set_map(-1, 0, 0, chi1(spec, marks, ring))
    else:
        result.add(0, arcs, -2 * abs(k) * (n - 1), "0")
        for level in range(1, count + 1):
            result.add(level, wide, -2 * abs(k) * (n - 1) - 2 * level + 1, f"1.{level}")
        result.set_map(0, 0, 0, chi0(spec, marks, ring))
        for step, level in enumerate(range(1, count)):
            factor = x1 - x3 if step % 2 == 0 else x1 - x4
            result.set_map(level, 0, 0, multiplication(wide, factor))
    return result


def simplified_b_complex(k: int, spec: PotentialSpec, marks: Sequence[str] = STANDARD,
                         ring: Optional[GradedRing] = None) -> ComplexOfMF:
    if k == 0:
        raise InvalidInputError("B_k is defined for k != 0")
    return b_complex(k, spec, marks, ring)


def cone_of_x1_minus_x3(spec: PotentialSpec, marks: Sequence[str] = STANDARD,
                        ring: Optional[GradedRing] = None) -> ComplexOfMF:
    """C(Gamma_1) -> C(Gamma_1){q^-2} by m(x1 - x3), in degrees 0 and 1"""
    ring = _ring(spec, marks, ring)
    wide = resolution_mf(spec, "wide", marks, ring)
    result = ComplexOfMF(spec, "Cone(x1-x3)")
    result.add(0, wide, 0, "1")
    result.add(1, wide, -2, "1'")
    result.set_map(0, 0, 0, multiplication(wide, ring[marks[0]] - ring[marks[2]]))
    return result


def wide_edge_complex(spec: PotentialSpec, marks: Sequence[str] = STANDARD,
                      ring: Optional[GradedRing] = None) -> ComplexOfMF:
    result = ComplexOfMF(spec, "W")
    result.add(0, resolution_mf(spec, "wide", marks, _ring(spec, marks, ring)), 0, "1")
    return result


def build_F_k(k: int, spec: PotentialSpec, marks: Sequence[str] = STANDARD,
              ring: Optional[GradedRing] = None) -> ChainMap:
    """Identity components B_(k-1){q^(2(N-1))} -> B_k on degrees -2k+2 .. 0"""
    if k < 1:
        raise InvalidInputError("F_k is defined for k >= 1")
    ring = _ring(spec, marks, ring)
    source = b_complex(k - 1, spec, marks, ring).shifted(q=2 * (spec.n - 1))
    target = b_complex(k, spec, marks, ring)
    f = ChainMap(source, target, f"F_{k}")
    for h in source.degrees:
        s, t = source.objects(h)[0], target.objects(h)[0]
        if s.shift != t.shift:
            raise InvalidInputError(f"F_{k}: shift mismatch at degree {h}")
        f.set(h, 0, 0, identity(t.mf))
    f.check()
    return f


def cokernel(f: ChainMap, name: str = "") -> ComplexOfMF:
    """Quotient of the target by the image of a termwise-identity embedding"""
    hit = {(h, j) for h, blocks in f.components.items() for (_, j) in blocks}
    result = ComplexOfMF(f.target.spec, name or f"coker({f.name})")
    renumber = {}
    for h in f.target.degrees:
        for j, s in enumerate(f.target.objects(h)):
            if (h, j) not in hit:
                renumber[(h, j)] = result.add(h, s.mf, s.shift, s.label)
    for h, i, j, d in f.target.components():
        if (h, i) in renumber and (h + 1, j) in renumber:
            result.set_map(h, renumber[(h, i)], renumber[(h + 1, j)], d)
    return result
