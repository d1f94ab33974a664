"""Normal forms modulo ideals and monomial bases of finite quotient rings"""
import logging
from typing import Dict, List, Optional, Sequence

from sympy import QQ
from sympy.polys.groebnertools import groebner, is_groebner
from sympy.polys.rings import PolyElement

from modules.ring.polynomial import A_NAME, GradedRing, Monomial
from modules.utils.errors import InvalidInputError, StructuralError

logger = logging.getLogger(__name__)


def groebner_basis(relations: Sequence[PolyElement], ring: GradedRing) -> List[PolyElement]:
    polys = [ring.convert(r) for r in relations if r]
    if not polys:
        return []
    return groebner(polys, ring.ring)


def is_confluent(relations: Sequence[PolyElement], ring: GradedRing) -> bool:
    """True when reduction by the relations already has unique normal forms"""
    polys = [ring.convert(r) for r in relations if r]
    return not polys or is_groebner(polys, ring.ring)


def normal_form(p: PolyElement, relations: Sequence[PolyElement], order: str = "grlex") -> PolyElement:
    """Reduced representative of p modulo the ideal generated by relations"""
    if not isinstance(p, PolyElement):
        raise InvalidInputError("normal_form expects a ring element")
    source = p.ring
    ring = GradedRing(1, [str(s) for s in source.symbols], with_a=False, order=order)
    polys = [ring.convert(r) for r in relations if r]
    if not polys:
        return p
    if not is_confluent(polys, ring):
        logger.debug(f"Relations not confluent under {order}, completing {len(polys)} generators")
        polys = groebner_basis(polys, ring)
    return ring.convert(p).rem(polys).set_ring(source)


class QuotientRing:
    """S/(relations) for a homogeneous ideal whose quotient is finite and free over F[a]

    The basis consists of the standard monomials in the x variables; a never
    occurs in a leading monomial because grlex puts a-free terms first for
    weighted-homogeneous polynomials.
    """

    def __init__(self, ring: GradedRing, relations: Sequence[PolyElement]):
        self.ring = ring
        self.relations = [ring.convert(r) for r in relations if r]
        self.gb = groebner_basis(self.relations, ring)
        self.leading = [g.LM for g in self.gb]
        self._a_index = ring.index(A_NAME) if ring.with_a else None
        self._check_leading_terms()
        self.basis: List[Monomial] = self._standard_monomials()
        self.basis_index: Dict[Monomial, int] = {m: i for i, m in enumerate(self.basis)}
        self.degrees = [ring.monomial_degree(m) for m in self.basis]

    def __len__(self) -> int:
        return len(self.basis)

    def _check_leading_terms(self) -> None:
        if self._a_index is not None and any(lm[self._a_index] for lm in self.leading):
            raise StructuralError("Quotient is not free over F[a]: a leading monomial contains a")
        x_indices = [self.ring.index(x) for x in self.ring.x_names]
        for i in x_indices:
            pure = any(lm[i] > 0 and all(e == 0 for j, e in enumerate(lm) if j != i) for lm in self.leading)
            if not pure:
                raise StructuralError(f"Quotient is not finite: no pure power of {self.ring.names[i]} is a leading monomial")

    def _divisible(self, monom: Monomial) -> bool:
        return any(all(m >= l for m, l in zip(monom, lm)) for lm in self.leading)

    def _standard_monomials(self) -> List[Monomial]:
        width = len(self.ring.names)
        x_indices = [self.ring.index(x) for x in self.ring.x_names]
        start = (0,) * width
        if self._divisible(start):
            return []
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for monom in frontier:
                for i in x_indices:
                    grown = list(monom)
                    grown[i] += 1
                    grown = tuple(grown)
                    if grown not in seen and not self._divisible(grown):
                        seen.add(grown)
                        nxt.append(grown)
            frontier = nxt
        return sorted(seen, key=lambda m: (self.ring.monomial_degree(m), tuple(-e for e in m)))

    def reduce(self, p: PolyElement) -> PolyElement:
        p = self.ring.convert(p)
        return p.rem(self.gb) if self.gb and p else p

    def coordinates(self, p: PolyElement) -> Dict[int, Dict[int, object]]:
        """basis index -> {power of a: rational coefficient} for the normal form of p"""
        coords: Dict[int, Dict[int, object]] = {}
        for monom, coeff in self.reduce(p).iterterms():
            a_power = 0
            if self._a_index is not None:
                a_power = monom[self._a_index]
                monom = monom[:self._a_index] + (0,) + monom[self._a_index + 1:]
            index = self.basis_index.get(monom)
            if index is None:
                raise StructuralError(f"Normal form left a non-standard monomial {monom}")
            coords.setdefault(index, {})[a_power] = coeff
        return coords

    def contains(self, p: PolyElement) -> bool:
        return not self.reduce(p)
