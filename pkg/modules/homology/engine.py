"""Homology of every resolution of a closed network, and the induced complex of graded-free F[a]-modules

For one resolution the Koszul factorization has potential 0. Rows whose right
entry is linear in some mark are contracted first. The remaining rows are
split into a regular sequence b (one entry of each row) and the partners c;
then H = S/(b) z where z is an explicit cycle, and the class of any cycle of
the same parity is its coefficient on the corner generator, reduced mod (b).
"""
import logging
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement

from modules.complex.closure import ClosedNetwork, Vertex
from modules.mf.factorization import KoszulFactorization, KoszulRow, Vector, add_to
from modules.mf.reduction import ReductionChain, exclude_variable, find_linear_row
from modules.ring.linalg import LinearSystem
from modules.ring.normal_form import QuotientRing, normal_form
from modules.ring.polynomial import GradedRing
from modules.structure.graded_complex import GradedFreeComplexOverA
from modules.utils.errors import StructuralError, VerificationError

logger = logging.getLogger(__name__)

Form = Dict[Tuple[int, ...], PolyElement]


def contract_linear_rows(mf: KoszulFactorization) -> ReductionChain:
    """Contract rows linear in a mark until none is left"""
    chain = ReductionChain(mf)
    progress = True
    while progress:
        progress = False
        for var in mf.ring.x_names:
            current = chain.target
            row = find_linear_row(current, var)
            if row is None:
                continue
            chain = chain.then(exclude_variable(current, var, row).step)
            progress = True
    return chain


def _entry_degrees(row: KoszulRow, ring: GradedRing, n: int) -> Tuple[int, int]:
    total = 2 * n + 2
    if row.left:
        left = ring.homogeneous_degree(row.left)
        if left is None:
            raise StructuralError(f"Koszul entry {row.left} is not homogeneous")
        return left, total - left
    right = ring.homogeneous_degree(row.right)
    if right is None:
        raise StructuralError(f"Koszul entry {row.right} is not homogeneous")
    return total - right, right


def _first_choice(rows: Sequence[KoszulRow]) -> List[bool]:
    """True where b is the left entry: forced by a zero, otherwise right unless it is already in (b)"""
    chosen: List[PolyElement] = []
    sides = []
    for row in rows:
        if not row.right:
            left = True
        elif not row.left:
            left = False
        else:
            left = bool(chosen) and not normal_form(row.right, chosen)
        sides.append(left)
        chosen.append(row.left if left else row.right)
    return sides


def _candidates(rows: Sequence[KoszulRow]) -> List[List[bool]]:
    first = _first_choice(rows)
    found = [first]
    for i, row in enumerate(rows):
        if row.left and row.right:
            flipped = list(first)
            flipped[i] = not flipped[i]
            found.append(flipped)
    return found


def _live_ring(ring: GradedRing, excluded: Sequence[str]) -> GradedRing:
    return ring.restricted([x for x in ring.x_names if x not in excluded])


def _wedge(first: Form, second: Form) -> Form:
    product: Form = {}
    for s, p in first.items():
        for t, r in second.items():
            if any(a and b for a, b in zip(s, t)):
                continue
            inversions = sum(1 for i, bit in enumerate(s) if bit for j in range(i) if t[j])
            label = tuple(a | b for a, b in zip(s, t))
            add_to(product, label, -p * r if inversions % 2 else p * r)
    return product


def _exponential(omega: Form, length: int, ring: GradedRing) -> Form:
    total: Form = {(0,) * length: ring.one}
    power: Form = dict(total)
    for k in range(1, length // 2 + 1):
        power = _wedge(power, omega)
        if not power:
            break
        for label, p in power.items():
            add_to(total, label, p * QQ(1, factorial(k)))
    return total


def _swap(form: Form, i: int) -> Form:
    """The odd isomorphism (wedge - contraction) on row i, exchanging the roles of its two entries"""
    result: Form = {}
    for t, p in form.items():
        sign = -1 if sum(t[:i]) % 2 else 1
        if t[i]:
            sign = -sign
        add_to(result, t[:i] + (1 - t[i],) + t[i + 1:], sign * p)
    return result


class VertexHomology:
    """H of one resolution: S/(b) times an explicit cycle, with q-degrees of the monomial basis"""

    def __init__(self, network: ClosedNetwork, vertex: Vertex):
        self.network = network
        self.vertex = vertex
        self.ring = network.ring
        n = network.spec.n
        self.chain = contract_linear_rows(network.factorization(vertex))
        self.reduced: KoszulFactorization = self.chain.target
        self.substitution = self.chain.substitution
        self.live = _live_ring(self.ring, list(self.substitution))
        rows = self.reduced.rows
        if len(rows) != len(self.live.x_names):
            raise StructuralError(f"Resolution {vertex} of {network.name} keeps {len(rows)} rows over "
                                  f"{len(self.live.x_names)} marks; its homology is not a complete intersection")
        self.degrees_of_rows = [_entry_degrees(r, self.ring, n) for r in rows]
        self.sides, self.quotient = self._regular_sequence(rows)
        self.b = [r.left if left else r.right for r, left in zip(rows, self.sides)]
        self.c = [r.right if left else r.left for r, left in zip(rows, self.sides)]
        self.corner_label = tuple(1 if left else 0 for left in self.sides)
        self.corner = self.reduced.index(self.corner_label)
        self.cycle = self._cycle()
        self.parity = sum(self.corner_label) % 2
        self.corner_degree = self.reduced.degree(self.corner) + network.shift(vertex)
        self.basis = [self.ring.pull_back(self.live.monomial(m), {}) for m in self.quotient.basis]
        self.degrees = [d + self.corner_degree for d in self.quotient.degrees]
        self._lifted: Optional[Vector] = None
        logger.debug(f"{network.name} resolution {vertex}: {len(self.reduced.rows)} rows after contraction, "
                     f"rank {len(self.basis)}, corner degree {self.corner_degree}")

    def to_live(self, p: PolyElement) -> PolyElement:
        zeros = {x: self.live.zero for x in self.substitution}
        return self.live.pull_back(p, zeros)

    def _regular_sequence(self, rows: Sequence[KoszulRow]) -> Tuple[List[bool], QuotientRing]:
        for sides in _candidates(rows):
            b = [self.to_live(r.left if left else r.right) for r, left in zip(rows, sides)]
            try:
                return sides, QuotientRing(self.live, b)
            except StructuralError as e:
                logger.debug(f"Side choice {sides} rejected: {e}")
        raise StructuralError(f"No regular sequence found among the Koszul rows of resolution {self.vertex}")

    def _two_form(self) -> Form:
        """omega with contraction_b(omega) = -c, solved degree by degree over Q"""
        length = len(self.b)
        b_deg = [d[0] if left else d[1] for d, left in zip(self.degrees_of_rows, self.sides)]
        c_deg = [2 * self.network.spec.n + 2 - d for d in b_deg]
        system = LinearSystem()
        monomials: Dict[Tuple[int, int], List[PolyElement]] = {}
        for i in range(length):
            for j in range(i + 1, length):
                degree = c_deg[j] - b_deg[i]
                monomials[(i, j)] = [self.ring.pull_back(self.live.monomial(m), {})
                                     for m in self.live.monomials_of_degree(degree)]
                for k, mono in enumerate(monomials[(i, j)]):
                    unknown = (i, j, k)
                    system.unknown(unknown)
                    for m, coeff in (mono * self.b[i]).terms():
                        system.add((j, m), unknown, coeff)
                    for m, coeff in (mono * self.b[j]).terms():
                        system.add((i, m), unknown, -coeff)
        for j, c in enumerate(self.c):
            for m, coeff in c.terms():
                system.add_rhs((j, m), -coeff)
        solution = system.solve()
        if solution is None:
            raise StructuralError(f"Partner entries of resolution {self.vertex} are not a boundary of b")
        omega: Form = {}
        for (i, j, k), value in solution.items():
            label = tuple(1 if r in (i, j) else 0 for r in range(length))
            add_to(omega, label, monomials[(i, j)][k] * value)
        return omega

    def _cycle(self) -> Vector:
        length = len(self.b)
        form = _exponential(self._two_form(), length, self.ring)
        for i, left in enumerate(self.sides):
            if left:
                form = _swap(form, i)
        lead = form.get(self.corner_label)
        if lead is None or not lead.is_ground:
            raise StructuralError(f"Cycle of resolution {self.vertex} has no unit corner coefficient")
        scale = QQ.one / lead.LC
        cycle = {self.reduced.index(t): p * scale for t, p in form.items()}
        if self.reduced.apply(cycle):
            raise VerificationError(f"Constructed cycle of resolution {self.vertex} is not closed")
        return cycle

    @property
    def rank(self) -> int:
        return len(self.basis)

    def lifted_cycle(self) -> Vector:
        """The cycle in the unreduced resolution factorization"""
        if self._lifted is None:
            self._lifted = self.chain.lift(self.cycle)
        return self._lifted

    def class_of(self, vector: Vector) -> PolyElement:
        """Multiplier r with [vector] = r [z], for a cycle of the unreduced factorization"""
        return self.chain.project(vector).get(self.corner, self.ring.zero)

    def coordinates(self, p: PolyElement) -> Dict[int, Dict[int, object]]:
        return self.quotient.coordinates(self.to_live(self.ring.substitute(p, self.substitution)))


class NetworkHomology:
    """Vertex homologies of a closed network and the complex they assemble into"""

    def __init__(self, network: ClosedNetwork):
        self.network = network
        self._vertices: Dict[Vertex, VertexHomology] = {}

    def vertex(self, vertex: Vertex) -> VertexHomology:
        if vertex not in self._vertices:
            self._vertices[vertex] = VertexHomology(self.network, vertex)
        return self._vertices[vertex]

    def complex(self) -> GradedFreeComplexOverA:
        network = self.network
        result = GradedFreeComplexOverA(network.spec.n, network.name)
        offsets: Dict[Vertex, int] = {}
        vertices = list(network.vertices())
        for v in vertices:
            vh = self.vertex(v)
            h = network.degree(v)
            offsets[v] = result.rank(h)
            for mono, q in zip(vh.basis, vh.degrees):
                result.add_generator(h, q, f"{v}:{mono.as_expr()}")
        for v in vertices:
            vh = self.vertex(v)
            h = network.degree(v)
            entries: Dict[Tuple[int, int], Dict[int, object]] = {}
            for edge in network.edges(v):
                target = self.vertex(edge.target)
                r = target.class_of(network.apply(edge, v, vh.lifted_cycle()))
                if not r:
                    continue
                for j, mono in enumerate(vh.basis):
                    for k, powers in target.coordinates(mono * r).items():
                        slot = entries.setdefault((offsets[v] + j, offsets[edge.target] + k), {})
                        for power, c in powers.items():
                            slot[power] = slot.get(power, QQ.zero) + c
            for (i, j), powers in entries.items():
                powers = {m: c for m, c in powers.items() if c}
                if len(powers) > 1:
                    raise StructuralError(f"Induced map of {network.name} at degree {h} has the non-monomial "
                                          f"entry {powers}")
                for m, c in powers.items():
                    result.set_entry(h, i, j, c, m)
        result.check()
        logger.info(f"Induced complex of {network.name}: "
                    f"{ {h: result.rank(h) for h in result.degrees} } generators over F[a]")
        return result


def network_complex(network: ClosedNetwork) -> GradedFreeComplexOverA:
    return NetworkHomology(network).complex()
