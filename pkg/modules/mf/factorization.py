"""Graded matrix factorizations, Koszul factorizations and their tensor products"""
from functools import cached_property
import logging
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from modules.ring.polynomial import GradedRing
from modules.ring.potential import PotentialSpec, pi_quotient, uv_quotients
from modules.utils.errors import InvalidInputError, VerificationError

logger = logging.getLogger(__name__)

Label = Tuple
Vector = Dict[int, PolyElement]
Matrix = Dict[int, Dict[int, PolyElement]]


class Generator(NamedTuple):
    label: Label
    parity: int
    degree: int


class KoszulRow(NamedTuple):
    left: PolyElement
    right: PolyElement


def wedge_index(i: int, t: Tuple[int, ...]) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """e_i wedge e_t as (sign, index), or None when t already contains i"""
    if t[i]:
        return None
    sign = -1 if sum(t[:i]) % 2 else 1
    return sign, t[:i] + (1,) + t[i + 1:]


def add_to(vector: Dict, key, value) -> None:
    """vector[key] += value, dropping zeros"""
    if not value:
        return
    total = vector.get(key)
    total = value if total is None else total + value
    if total:
        vector[key] = total
    else:
        vector.pop(key, None)


def row_left_degree(row: KoszulRow, ring: GradedRing, n: int) -> int:
    """q-degree of the left entry, read off the right entry when the left one vanishes"""
    if row.left:
        degree = ring.homogeneous_degree(row.left)
        return degree if degree is not None else ring.max_degree(row.left)
    if row.right:
        degree = ring.homogeneous_degree(row.right)
        degree = degree if degree is not None else ring.max_degree(row.right)
        return 2 * n + 2 - degree
    raise InvalidInputError("Koszul row with two zero entries has no degree")


class MatrixFactorization:
    """Free Z2-graded module with an odd differential D such that D^2 = w * id"""

    def __init__(self, ring: GradedRing, spec: PotentialSpec, generators: Sequence[Generator],
                 differential: Matrix, potential: PolyElement, name: str = "",
                 boundary: Optional[Dict[str, int]] = None):
        self.ring = ring
        self.spec = spec
        self._generators = list(generators)
        self._differential = differential
        self.potential = ring.convert(potential)
        self.name = name
        self.boundary = dict(boundary or {})
        self._index = {g.label: i for i, g in enumerate(self._generators)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or 'unnamed'}, rank={self.rank})"

    @property
    def generators(self) -> List[Generator]:
        return self._generators

    @property
    def differential(self) -> Matrix:
        return self._differential

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, label: Label) -> int:
        return self._index[label]

    def parity(self, i: int) -> int:
        return self.generators[i].parity

    def degree(self, i: int) -> int:
        return self.generators[i].degree

    def apply(self, vector: Vector) -> Vector:
        """D applied to a vector of coefficients"""
        image: Vector = {}
        for i, coeff in vector.items():
            for j, entry in self.differential.get(i, {}).items():
                add_to(image, j, coeff * entry)
        return image

    def shifted(self, shift: int) -> "MatrixFactorization":
        generators = [Generator(g.label, g.parity, g.degree + shift) for g in self.generators]
        return MatrixFactorization(self.ring, self.spec, generators, self.differential, self.potential,
                                   self.name, self.boundary)

    def check(self) -> None:
        """Raise VerificationError unless D^2 = w * id and D is odd of q-degree N+1"""
        for i in range(self.rank):
            twice = self.apply(self.apply({i: self.ring.one}))
            expected = {i: self.potential} if self.potential else {}
            if twice != expected:
                raise VerificationError(f"D^2 != w on generator {self.generators[i].label} of {self.name}")
            for j in self.differential.get(i, {}):
                if self.parity(i) == self.parity(j):
                    raise VerificationError(f"Differential of {self.name} is not odd at {i}->{j}")
        if self.spec.graded and not self.is_homogeneous():
            raise VerificationError(f"Differential of {self.name} is not homogeneous of degree N+1")

    def is_homogeneous(self) -> bool:
        target = self.spec.n + 1
        for i, row in self.differential.items():
            for j, entry in row.items():
                degree = self.ring.homogeneous_degree(entry)
                if degree is None or degree + self.degree(j) - self.degree(i) != target:
                    return False
        return True


class KoszulFactorization(MatrixFactorization):
    """Tensor product of rank-one factorizations (left_i, right_i)

    Generators are indexed by bit tuples t, ordered lexicographically; the
    differential is D = sum_i left_i e_i^ + right_i contraction_i, with the sign
    (-1)^(t_0 + ... + t_{i-1}) on row i.
    """

    def __init__(self, ring: GradedRing, spec: PotentialSpec, rows: Sequence[KoszulRow], shift: int = 0,
                 name: str = "", boundary: Optional[Dict[str, int]] = None):
        self.ring = ring
        self.spec = spec
        self.rows = [KoszulRow(ring.convert(r.left), ring.convert(r.right)) for r in rows]
        self.shift = shift
        self.name = name
        self.boundary = dict(boundary or {})
        self.left_degrees = [row_left_degree(r, ring, spec.n) for r in self.rows]
        self.potential = sum((r.left * r.right for r in self.rows), ring.zero)

    @property
    def length(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return 1 << self.length

    def label(self, i: int) -> Tuple[int, ...]:
        return tuple((i >> (self.length - 1 - r)) & 1 for r in range(self.length))

    def index(self, label: Label) -> int:
        value = 0
        for bit in label:
            value = (value << 1) | bit
        return value

    def parity(self, i: int) -> int:
        return bin(i).count("1") % 2

    def degree(self, i: int) -> int:
        t = self.label(i)
        return self.shift + sum(self.spec.n + 1 - d for d, bit in zip(self.left_degrees, t) if bit)

    @cached_property
    def generators(self) -> List[Generator]:
        return [Generator(self.label(i), self.parity(i), self.degree(i)) for i in range(self.rank)]

    @cached_property
    def differential(self) -> Matrix:
        differential: Matrix = {}
        for i in range(self.rank):
            column = self.apply({i: self.ring.one})
            if column:
                differential[i] = column
        return differential

    def apply(self, vector: Vector) -> Vector:
        image: Vector = {}
        length = self.length
        for i, coeff in vector.items():
            for r, row in enumerate(self.rows):
                bit = 1 << (length - 1 - r)
                sign = -1 if bin(i >> (length - r)).count("1") % 2 else 1
                if i & bit:
                    if row.right:
                        add_to(image, i ^ bit, sign * row.right * coeff)
                elif row.left:
                    add_to(image, i | bit, sign * row.left * coeff)
        return image

    def shifted(self, shift: int) -> "KoszulFactorization":
        return self.with_rows(self.rows, self.shift + shift)

    def with_rows(self, rows: Sequence[KoszulRow], shift: Optional[int] = None, name: Optional[str] = None) -> "KoszulFactorization":
        return KoszulFactorization(self.ring, self.spec, rows, self.shift if shift is None else shift,
                                   name or self.name, self.boundary)

    def substitute(self, mapping: Dict[str, PolyElement]) -> "KoszulFactorization":
        rows = [KoszulRow(self.ring.substitute(r.left, mapping), self.ring.substitute(r.right, mapping))
                for r in self.rows]
        return self.with_rows(rows)

    def same_rows(self, other: "KoszulFactorization") -> bool:
        if self.length != other.length:
            return False
        return all(self.ring.convert(a.left) == self.ring.convert(b.left)
                   and self.ring.convert(a.right) == self.ring.convert(b.right)
                   for a, b in zip(self.rows, other.rows))


def _merge_boundaries(first: Dict[str, int], second: Dict[str, int]) -> Dict[str, int]:
    merged = dict(first)
    for name, direction in second.items():
        if name not in merged:
            merged[name] = direction
        elif merged[name] == direction:
            raise InvalidInputError(f"Mark {name} is {'an output' if direction > 0 else 'an input'} of both factors")
        else:
            del merged[name]
    return merged


def common_ring(first: GradedRing, second: GradedRing) -> GradedRing:
    if first == second:
        return first
    if first.n != second.n or first.with_a != second.with_a:
        raise InvalidInputError("Factorizations live over incompatible rings")
    return first.extended(second.x_names)


def tensor(first: MatrixFactorization, second: MatrixFactorization, name: str = "") -> MatrixFactorization:
    """Tensor product over the common polynomial ring; shared marks must be glued output to input"""
    if first.spec != second.spec:
        raise InvalidInputError("Cannot tensor factorizations of different potentials")
    ring = common_ring(first.ring, second.ring)
    boundary = _merge_boundaries(first.boundary, second.boundary)
    name = name or f"{first.name}*{second.name}"
    if isinstance(first, KoszulFactorization) and isinstance(second, KoszulFactorization):
        return KoszulFactorization(ring, first.spec, list(first.rows) + list(second.rows),
                                   first.shift + second.shift, name, boundary)
    generators = []
    pairs = []
    for a in first.generators:
        for b in second.generators:
            generators.append(Generator(a.label + b.label, (a.parity + b.parity) % 2, a.degree + b.degree))
            pairs.append((first.index(a.label), second.index(b.label)))
    index = {pair: k for k, pair in enumerate(pairs)}
    differential: Matrix = {}
    for k, (i, j) in enumerate(pairs):
        column: Vector = {}
        for i2, entry in first.differential.get(i, {}).items():
            add_to(column, index[(i2, j)], ring.convert(entry))
        sign = -1 if first.parity(i) else 1
        for j2, entry in second.differential.get(j, {}).items():
            add_to(column, index[(i, j2)], sign * ring.convert(entry))
        if column:
            differential[k] = column
    potential = ring.convert(first.potential) + ring.convert(second.potential)
    return MatrixFactorization(ring, first.spec, generators, differential, potential, name, boundary)


def tensor_all(factors: Iterable[MatrixFactorization], name: str = "") -> MatrixFactorization:
    factors = list(factors)
    result = factors[0]
    for factor in factors[1:]:
        result = tensor(result, factor)
    result.name = name or result.name
    return result


def _local_ring(spec: PotentialSpec, ring: Optional[GradedRing], names: Sequence[str]) -> GradedRing:
    if ring is None:
        return spec.ring(names)
    missing = [x for x in names if x not in ring]
    return ring.extended(missing) if missing else ring


def arc_mf(spec: PotentialSpec, from_var: str, to_var: str, ring: Optional[GradedRing] = None) -> KoszulFactorization:
    """One-row factorization (pi(x_to, x_from), x_to - x_from) of an oriented arc"""
    if from_var == to_var:
        raise InvalidInputError(f"An arc needs two distinct marks, got {from_var} twice")
    ring = _local_ring(spec, ring, [to_var, from_var])
    row = KoszulRow(pi_quotient(spec, ring, to_var, from_var), ring[to_var] - ring[from_var])
    return KoszulFactorization(ring, spec, [row], 0, f"arc({from_var}->{to_var})", {to_var: 1, from_var: -1})


def wide_edge_rows(spec: PotentialSpec, ring: GradedRing, x1: str, x2: str, x3: str, x4: str) -> List[KoszulRow]:
    u, v = uv_quotients(spec, ring, x1, x2, x3, x4)
    return [KoszulRow(u, ring[x1] + ring[x2] - ring[x3] - ring[x4]),
            KoszulRow(v, ring[x1] * ring[x2] - ring[x3] * ring[x4])]


def wide_edge_mf(spec: PotentialSpec, x1: str, x2: str, x3: str, x4: str,
                 ring: Optional[GradedRing] = None) -> KoszulFactorization:
    """Wide edge with outputs x1, x2 and inputs x3, x4, shifted by q^-1"""
    marks = (x1, x2, x3, x4)
    if len(set(marks)) != 4:
        raise InvalidInputError(f"A wide edge needs four distinct marks, got {marks}")
    ring = _local_ring(spec, ring, marks)
    return KoszulFactorization(ring, spec, wide_edge_rows(spec, ring, *marks), -1,
                               f"wide({x1},{x2}<-{x3},{x4})", {x1: 1, x2: 1, x3: -1, x4: -1})


def resolution_mf(spec: PotentialSpec, kind: str, marks: Sequence[str],
                  ring: Optional[GradedRing] = None) -> KoszulFactorization:
    """Gamma_0 (straight arcs), Gamma_1 (wide edge) or Gamma_2 (crossed arcs) on marks x1..x4"""
    x1, x2, x3, x4 = marks
    if kind == "wide":
        return wide_edge_mf(spec, x1, x2, x3, x4, ring)
    ring = _local_ring(spec, ring, marks)
    if kind == "arcs":
        pair = (arc_mf(spec, x3, x1, ring), arc_mf(spec, x4, x2, ring))
    elif kind == "crossed":
        pair = (arc_mf(spec, x4, x1, ring), arc_mf(spec, x3, x2, ring))
    else:
        raise InvalidInputError(f"Unknown resolution kind: {kind}")
    return tensor(*pair, name=f"{kind}({','.join(marks)})")
