"""Morphisms of matrix factorizations, elementary Koszul isomorphisms and the saddle maps chi, xi"""
import logging
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from modules.mf.factorization import (KoszulFactorization, KoszulRow, Matrix, MatrixFactorization, Vector,
                                      add_to, resolution_mf, wedge_index)
from modules.ring.polynomial import GradedRing
from modules.ring.potential import PotentialSpec
from modules.utils.errors import InvalidInputError, VerificationError

logger = logging.getLogger(__name__)


class MFMorphism:
    """Module map between factorizations; matrix[i][j] is the coefficient of target generator j in f(source generator i)"""

    def __init__(self, source: MatrixFactorization, target: MatrixFactorization, matrix: Matrix,
                 parity: int = 0, name: str = ""):
        self.source = source
        self.target = target
        cleaned = ((i, {j: e for j, e in col.items() if e}) for i, col in matrix.items())
        self.matrix = {i: col for i, col in cleaned if col}
        self.parity = parity % 2
        self.name = name

    def __repr__(self) -> str:
        return f"MFMorphism({self.name or '?'}: {self.source.name} -> {self.target.name})"

    @property
    def ring(self) -> GradedRing:
        return self.target.ring

    def apply(self, vector: Vector) -> Vector:
        image: Vector = {}
        for i, coeff in vector.items():
            for j, entry in self.matrix.get(i, {}).items():
                add_to(image, j, coeff * entry)
        return image

    def compose(self, first: "MFMorphism") -> "MFMorphism":
        """self after first"""
        if first.target.rank != self.source.rank:
            raise InvalidInputError(f"Cannot compose {self.name} after {first.name}: rank mismatch")
        matrix = {i: self.apply(col) for i, col in first.matrix.items()}
        return MFMorphism(first.source, self.target, matrix, self.parity + first.parity,
                          f"{self.name}.{first.name}")

    __matmul__ = compose

    def _combine(self, other: "MFMorphism", sign: int) -> "MFMorphism":
        if other.source.rank != self.source.rank or other.target.rank != self.target.rank:
            raise InvalidInputError("Cannot add morphisms between different factorizations")
        matrix: Matrix = {i: dict(col) for i, col in self.matrix.items()}
        for i, col in other.matrix.items():
            target = matrix.setdefault(i, {})
            for j, entry in col.items():
                add_to(target, j, sign * entry)
        return MFMorphism(self.source, self.target, matrix, self.parity, self.name)

    def __add__(self, other: "MFMorphism") -> "MFMorphism":
        return self._combine(other, 1)

    def __sub__(self, other: "MFMorphism") -> "MFMorphism":
        return self._combine(other, -1)

    def __neg__(self) -> "MFMorphism":
        return self.scaled(-1)

    def scaled(self, factor) -> "MFMorphism":
        factor = self.ring.convert(factor)
        matrix = {i: {j: factor * e for j, e in col.items()} for i, col in self.matrix.items()}
        return MFMorphism(self.source, self.target, matrix, self.parity, self.name)

    def __rmul__(self, factor) -> "MFMorphism":
        return self.scaled(factor)

    def is_zero(self) -> bool:
        return not any(self.matrix.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, MFMorphism) and (self - other).is_zero()

    def commutator(self) -> "MFMorphism":
        """D_target f - (-1)^|f| f D_source"""
        differential_t = MFMorphism(self.target, self.target, self.target.differential, 1)
        differential_s = MFMorphism(self.source, self.source, self.source.differential, 1)
        left = differential_t.compose(self)
        right = self.compose(differential_s)
        return left + right if self.parity else left - right

    def is_chain_map(self) -> bool:
        return self.commutator().is_zero()

    def degree(self) -> Optional[int]:
        """q-degree when every entry is homogeneous of one common degree, else None"""
        degrees = set()
        for i, col in self.matrix.items():
            for j, entry in col.items():
                d = self.ring.homogeneous_degree(entry)
                if d is None:
                    return None
                degrees.add(d + self.target.degree(j) - self.source.degree(i))
        if len(degrees) > 1:
            return None
        return degrees.pop() if degrees else 0


def identity(mf: MatrixFactorization) -> MFMorphism:
    return MFMorphism(mf, mf, {i: {i: mf.ring.one} for i in range(mf.rank)}, 0, "id")


def multiplication(mf: MatrixFactorization, factor, name: str = "") -> MFMorphism:
    """The endomorphism m(p) = p * id"""
    factor = mf.ring.convert(factor)
    return MFMorphism(mf, mf, {i: {i: factor} for i in range(mf.rank)} if factor else {}, 0, name or f"m({factor})")


def zero_morphism(source: MatrixFactorization, target: MatrixFactorization, parity: int = 0) -> MFMorphism:
    return MFMorphism(source, target, {}, parity, "0")


def reinterpret(f: MFMorphism, source: MatrixFactorization, target: MatrixFactorization, name: str = "") -> MFMorphism:
    """Same matrix read between factorizations with identical generator labels"""
    if [g.label for g in source.generators] != [g.label for g in f.source.generators] or \
            [g.label for g in target.generators] != [g.label for g in f.target.generators]:
        raise InvalidInputError("Generator labels differ, cannot reinterpret morphism")
    return MFMorphism(source, target, f.matrix, f.parity, name or f.name)


def tensor_morphism(first: MFMorphism, second: MFMorphism, source: MatrixFactorization,
                    target: MatrixFactorization) -> MFMorphism:
    """first (x) second on source = A (x) B, with the Koszul sign (-1)^{|second||a|}"""
    matrix: Matrix = {}
    ring = target.ring
    for a in first.source.generators:
        ia = first.source.index(a.label)
        sign = -1 if second.parity and a.parity else 1
        for b in second.source.generators:
            ib = second.source.index(b.label)
            col: Vector = {}
            for ja, ea in first.matrix.get(ia, {}).items():
                la = first.target.generators[ja].label
                for jb, eb in second.matrix.get(ib, {}).items():
                    lb = second.target.generators[jb].label
                    add_to(col, target.index(la + lb), sign * ring.convert(ea) * ring.convert(eb))
            if col:
                matrix[source.index(a.label + b.label)] = col
    return MFMorphism(source, target, matrix, first.parity + second.parity, f"{first.name}(x){second.name}")


def _exterior_map(mf: KoszulFactorization, images) -> Matrix:
    """Matrix of Lambda(g) for g given by images[i] = {k: coeff} on exterior generators"""
    matrix: Matrix = {}
    for src, g in enumerate(mf.generators):
        t = g.label
        terms = {(0,) * mf.length: mf.ring.one}
        for i in (k for k, bit in enumerate(t) if bit):
            expanded: Dict = {}
            for current, coeff in terms.items():
                for k, c in images.get(i, {i: mf.ring.one}).items():
                    step = _append(current, k)
                    if step is not None:
                        sign, nxt = step
                        add_to(expanded, nxt, sign * c * coeff)
            terms = expanded
        col = {}
        for label, coeff in terms.items():
            add_to(col, mf.index(label), coeff)
        if col:
            matrix[src] = col
    return matrix


def _append(t: Tuple[int, ...], k: int) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """e_t wedge e_k as (sign, index)"""
    if t[k]:
        return None
    sign = -1 if sum(t[k + 1:]) % 2 else 1
    return sign, t[:k] + (1,) + t[k + 1:]


def row_operation(mf: KoszulFactorization, i: int, j: int, mu) -> Tuple[KoszulFactorization, MFMorphism]:
    """right_i += mu right_j and left_j -= mu left_i, with the isomorphism induced by e_i -> e_i - mu e_j"""
    if i == j:
        raise InvalidInputError("Row operation needs two distinct rows")
    mu = mf.ring.convert(mu)
    rows = list(mf.rows)
    rows[i] = KoszulRow(rows[i].left, rows[i].right + mu * rows[j].right)
    rows[j] = KoszulRow(rows[j].left - mu * rows[i].left, rows[j].right)
    target = mf.with_rows(rows)
    matrix = _exterior_map(mf, {i: {i: mf.ring.one, j: -mu}})
    return target, MFMorphism(mf, target, matrix, 0, f"S({i},{j})")


def twist(mf: KoszulFactorization, i: int, j: int, h) -> Tuple[KoszulFactorization, MFMorphism]:
    """left_i += h right_j and left_j -= h right_i, with the isomorphism 1 + h e_i e_j"""
    h = mf.ring.convert(h)
    rows = list(mf.rows)
    rows[i] = KoszulRow(mf.rows[i].left + h * mf.rows[j].right, mf.rows[i].right)
    rows[j] = KoszulRow(mf.rows[j].left - h * mf.rows[i].right, mf.rows[j].right)
    target = mf.with_rows(rows)
    matrix: Matrix = {}
    for src, g in enumerate(mf.generators):
        col = {src: mf.ring.one}
        first = wedge_index(j, g.label)
        second = wedge_index(i, first[1]) if first else None
        if second and h:
            add_to(col, target.index(second[1]), first[0] * second[0] * h)
        matrix[src] = col
    return target, MFMorphism(mf, target, matrix, 0, f"Phi({i},{j})")


def scale_row(mf: KoszulFactorization, i: int, alpha, beta) -> Tuple[KoszulFactorization, MFMorphism]:
    """Row (P, Q) -> (beta P / alpha, alpha Q / beta) with e_t -> (alpha or beta) e_t by the bit t_i"""
    ring = mf.ring
    alpha, beta = ring.convert(alpha), ring.convert(beta)
    row = mf.rows[i]
    try:
        left = (beta * row.left).exquo(alpha) if row.left else ring.zero
        right = (alpha * row.right).exquo(beta) if row.right else ring.zero
    except Exception:
        raise VerificationError(f"Row {i} of {mf.name} is not divisible as required for rescaling")
    rows = list(mf.rows)
    rows[i] = KoszulRow(left, right)
    target = mf.with_rows(rows)
    matrix = {src: {src: beta if g.label[i] else alpha} for src, g in enumerate(mf.generators)}
    return target, MFMorphism(mf, target, matrix, 0, f"G({i})")


def _chain(steps: Sequence[MFMorphism]) -> MFMorphism:
    result = steps[0]
    for step in steps[1:]:
        result = step.compose(result)
    return result


@lru_cache(maxsize=None)
def saddle_maps(spec: PotentialSpec, ring: GradedRing, marks: Tuple[str, str, str, str]) -> Tuple[MFMorphism, MFMorphism]:
    """(chi0, chi1) between the arcs x3->x1, x4->x2 and the wide edge on the same marks

    Both have q-degree 1 and compose to (x1 - x4) id in either order.
    """
    x1, x2, x3, x4 = (ring[x] for x in marks)
    arcs = resolution_mf(spec, "arcs", marks, ring)
    wide = resolution_mf(spec, "wide", marks, ring)
    u, v = wide.rows[0].left, wide.rows[1].left
    pi13 = arcs.rows[0].left
    m = x1 - x4
    h = (u + x4 * v - pi13).exquo(x2 - x4)

    after_s, s = row_operation(arcs, 0, 1, 1)
    after_phi, phi = twist(after_s, 0, 1, h)
    after_g, g = scale_row(after_phi, 1, m, 1)
    after_t, t = row_operation(after_g, 1, 0, x4)
    if not after_t.same_rows(wide):
        raise VerificationError(f"Row reduction of arcs did not reach the wide edge on {marks}")
    chi0 = reinterpret(_chain([s, phi, g, t]), arcs, wide, "chi0")

    start = arcs.with_rows(wide.rows)
    back_t, t_inv = row_operation(start, 1, 0, -x4)
    back_g, g_inv = scale_row(back_t, 1, 1, m)
    back_phi, phi_inv = twist(back_g, 0, 1, -h)
    back_s, s_inv = row_operation(back_phi, 0, 1, -1)
    if not back_s.same_rows(arcs):
        raise VerificationError(f"Row reduction of the wide edge did not reach the arcs on {marks}")
    chi1 = reinterpret(_chain([t_inv, g_inv, phi_inv, s_inv]), wide, arcs, "chi1")
    logger.debug(f"Built saddle maps on {marks} for N={spec.n} ({spec.variant.value})")
    return chi0, chi1


def _local_ring(spec: PotentialSpec, marks: Sequence[str], ring: Optional[GradedRing]) -> GradedRing:
    if len(set(marks)) != 4:
        raise InvalidInputError(f"Saddle maps need four distinct marks, got {tuple(marks)}")
    if ring is None:
        return spec.ring(marks)
    missing = [x for x in marks if x not in ring]
    if missing:
        raise InvalidInputError(f"Marks {missing} are not variables of {ring}")
    return ring


def chi0(spec: PotentialSpec, marks: Sequence[str] = ("x1", "x2", "x3", "x4"), ring: Optional[GradedRing] = None) -> MFMorphism:
    return saddle_maps(spec, _local_ring(spec, marks, ring), tuple(marks))[0]


def chi1(spec: PotentialSpec, marks: Sequence[str] = ("x1", "x2", "x3", "x4"), ring: Optional[GradedRing] = None) -> MFMorphism:
    return saddle_maps(spec, _local_ring(spec, marks, ring), tuple(marks))[1]


def _crossed_pair(spec: PotentialSpec, marks: Sequence[str], ring: Optional[GradedRing]) -> Tuple[MFMorphism, MFMorphism]:
    ring = _local_ring(spec, marks, ring)
    x1, x2, x3, x4 = marks
    into, out = saddle_maps(spec, ring, (x1, x2, x4, x3))
    crossed = resolution_mf(spec, "crossed", marks, ring)
    wide = resolution_mf(spec, "wide", marks, ring)
    if not crossed.same_rows(into.source) or not wide.same_rows(into.target):
        raise VerificationError(f"Crossed arcs on {tuple(marks)} do not match the swapped saddle")
    return reinterpret(into, crossed, wide, "xi0"), reinterpret(out, wide, crossed, "xi1")


def xi0(spec: PotentialSpec, marks: Sequence[str] = ("x1", "x2", "x3", "x4"), ring: Optional[GradedRing] = None) -> MFMorphism:
    """Crossed arcs x4->x1, x3->x2 into the wide edge; xi1 after xi0 is (x1 - x3) id"""
    return _crossed_pair(spec, marks, ring)[0]


def xi1(spec: PotentialSpec, marks: Sequence[str] = ("x1", "x2", "x3", "x4"), ring: Optional[GradedRing] = None) -> MFMorphism:
    return _crossed_pair(spec, marks, ring)[1]

