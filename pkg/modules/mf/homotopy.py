"""Null-homotopy solver and homotopy classes of morphisms, by linear algebra on a degree-bounded ansatz"""
import logging
from typing import Dict, Hashable, List, Optional, Set, Tuple

from sympy import QQ

from modules.mf.factorization import KoszulFactorization, Matrix, MatrixFactorization
from modules.mf.morphisms import MFMorphism
from modules.ring.linalg import LinearSystem, rank
from modules.ring.polynomial import A_NAME, Monomial
from modules.utils.errors import InvalidInputError, VerificationError

logger = logging.getLogger(__name__)

Key = Tuple[int, int, Monomial]
SCALAR = ("scalar",)


def live_variables(mf: MatrixFactorization) -> Set[str]:
    """Variables that occur in the differential, plus a when present"""
    ring = mf.ring
    used = {A_NAME} if ring.with_a else set()
    if isinstance(mf, KoszulFactorization):
        entries = [p for row in mf.rows for p in row]
    else:
        entries = [e for col in mf.differential.values() for e in col.values()]
    for entry in entries:
        if entry:
            used.update(ring.variables_of(entry))
    return used


def _filtered_degree(f: MFMorphism) -> Optional[int]:
    degrees = [f.ring.max_degree(e) + f.target.degree(j) - f.source.degree(i)
               for i, col in f.matrix.items() for j, e in col.items()]
    return max(degrees) if degrees else None


class Ansatz:
    """Morphisms source -> target of a fixed parity whose entries are combinations of monomials of bounded degree"""

    def __init__(self, source: MatrixFactorization, target: MatrixFactorization, degree: int, parity: int,
                 graded: bool = True):
        self.source = source
        self.target = target
        self.degree = degree
        self.parity = parity % 2
        self.graded = graded
        ring = target.ring
        self.ring = ring
        allowed = live_variables(source) | live_variables(target)
        self._allowed = {ring.index(x) for x in allowed if x in ring}
        self._monomials: Dict[int, List[Monomial]] = {}
        self.unknowns: List[Key] = []
        for i in range(source.rank):
            for j in range(target.rank):
                if (source.parity(i) + self.parity) % 2 != target.parity(j):
                    continue
                for monom in self.monomials(degree + source.degree(i) - target.degree(j)):
                    self.unknowns.append((i, j, monom))
        self._reverse = {}
        for i, col in source.differential.items():
            for k, entry in col.items():
                self._reverse.setdefault(k, []).append((i, entry))

    def monomials(self, degree: int) -> List[Monomial]:
        if degree < 0:
            return []
        if degree not in self._monomials:
            found = self.ring.monomials_of_degree(degree) if self.graded else self.ring.monomials_up_to(degree)
            self._monomials[degree] = [m for m in found
                                       if all(i in self._allowed for i, e in enumerate(m) if e)]
        return self._monomials[degree]

    def commutator_terms(self, unknown: Key) -> Dict[Key, object]:
        """Coefficients of D_t g - (-1)^|g| g D_s for the single-entry morphism g = unknown"""
        i, j, monom = unknown
        sign = -1 if self.parity else 1
        terms: Dict[Key, object] = {}

        def add(src, tgt, poly, factor):
            for m, c in poly.iterterms():
                key = (src, tgt, tuple(a + b for a, b in zip(m, monom)))
                value = terms.get(key, QQ.zero) + factor * c
                if value:
                    terms[key] = value
                else:
                    terms.pop(key, None)

        for k, entry in self.target.differential.get(j, {}).items():
            add(i, k, entry, 1)
        for i2, entry in self._reverse.get(i, []):
            add(i2, j, entry, -sign)
        return terms

    def morphism(self, solution: Dict[Hashable, object], name: str = "") -> MFMorphism:
        matrix: Matrix = {}
        for label, c in solution.items():
            if label == SCALAR or not c:
                continue
            i, j, monom = label
            col = matrix.setdefault(i, {})
            col[j] = col.get(j, self.ring.zero) + self.ring.ring({monom: c})
        return MFMorphism(self.source, self.target, matrix, self.parity, name)


def _add_rhs(system: LinearSystem, f: MFMorphism, factor=1) -> None:
    for i, col in f.matrix.items():
        for j, entry in col.items():
            for m, c in entry.iterterms():
                system.add_rhs((i, j, m), factor * c)


def _homotopy_degree(f: MFMorphism, slack: int) -> Tuple[Optional[int], bool]:
    spec = f.target.spec
    if spec.graded:
        degree = f.degree()
        if degree is None:
            raise InvalidInputError(f"Morphism {f.name} is not homogeneous")
        return degree - (spec.n + 1), True
    bound = _filtered_degree(f)
    return (None if bound is None else bound - (spec.n + 1) + slack), False


def _homotopy_system(f: MFMorphism, against: Optional[MFMorphism], slack: int) -> Tuple[LinearSystem, Ansatz]:
    degree, graded = _homotopy_degree(f, slack)
    ansatz = Ansatz(f.source, f.target, degree, f.parity + 1, graded)
    system = LinearSystem()
    for unknown in ansatz.unknowns:
        system.unknown(unknown)
        for key, c in ansatz.commutator_terms(unknown).items():
            system.add(key, unknown, c)
    if against is not None:
        system.unknown(SCALAR)
        for i, col in against.matrix.items():
            for j, entry in col.items():
                for m, c in entry.iterterms():
                    system.add((i, j, m), SCALAR, c)
    _add_rhs(system, f)
    logger.debug(f"Homotopy system for {f.name}: {system.shape[0]} equations, {system.shape[1]} unknowns")
    return system, ansatz


def null_homotopy(f: MFMorphism, slack: int = 0) -> Optional[MFMorphism]:
    """h with f = D h - (-1)^|h| h D, or None when no h exists in the degree-forced ansatz"""
    if f.is_zero():
        return MFMorphism(f.source, f.target, {}, f.parity + 1, "0")
    system, ansatz = _homotopy_system(f, None, slack)
    solution = system.solve()
    if solution is None:
        return None
    h = ansatz.morphism(solution, f"h({f.name})")
    if h.commutator() != f:
        raise VerificationError(f"Homotopy found for {f.name} does not re-expand to it")
    return h


def is_null_homotopic(f: MFMorphism) -> bool:
    return null_homotopy(f) is not None


def homotopic(f: MFMorphism, g: MFMorphism) -> bool:
    return is_null_homotopic(f - g)


def homotopic_scalar(f: MFMorphism, g: MFMorphism, slack: int = 0) -> Optional[Tuple[object, MFMorphism]]:
    """(c, h) with f = c g + [D, h], solved jointly; None when f is not a multiple of g up to homotopy"""
    if f.source.rank != g.source.rank or f.target.rank != g.target.rank or f.parity != g.parity:
        raise InvalidInputError(f"Cannot compare {f.name} with {g.name}")
    if f.is_zero():
        return QQ.zero, MFMorphism(f.source, f.target, {}, f.parity + 1, "0")
    system, ansatz = _homotopy_system(f, g, slack)
    solution = system.solve()
    if solution is None:
        return None
    c = solution.get(SCALAR, QQ.zero)
    h = ansatz.morphism(solution, f"h({f.name})")
    if h.commutator() != f - g.scaled(c):
        raise VerificationError(f"Scalar homotopy for {f.name} does not re-expand")
    return c, h


def require_scalar(f: MFMorphism, g: MFMorphism, nonzero: bool = True) -> object:
    """The scalar c with f ~ c g, raising VerificationError when it does not exist (or vanishes)"""
    found = homotopic_scalar(f, g)
    if found is None:
        raise VerificationError(f"{f.name} is not homotopic to a multiple of {g.name}")
    if nonzero and not found[0]:
        raise VerificationError(f"{f.name} is homotopic to zero, expected a non-zero multiple of {g.name}")
    return found[0]


def chain_map_space(source: MatrixFactorization, target: MatrixFactorization, degree: int,
                    parity: int = 0) -> List[MFMorphism]:
    """Representatives of a basis of homotopy classes of chain maps of the given q-degree and parity"""
    if not target.spec.graded:
        raise InvalidInputError("Homotopy classes are computed for graded potentials only")
    maps = Ansatz(source, target, degree, parity)
    cycles = LinearSystem()
    for unknown in maps.unknowns:
        cycles.unknown(unknown)
        for key, c in maps.commutator_terms(unknown).items():
            cycles.add(key, unknown, c)
    kernel = cycles.nullspace()
    columns = {u: k for k, u in enumerate(maps.unknowns)}

    homotopies = Ansatz(source, target, degree - (target.spec.n + 1), parity + 1)
    rows: Dict[int, Dict[int, object]] = {}
    for unknown in homotopies.unknowns:
        image = homotopies.commutator_terms(unknown)
        if image:
            rows[len(rows)] = {columns[key]: c for key, c in image.items()}
    current = rank(rows, (len(rows), len(columns))) if rows else 0
    classes = []
    for vector in kernel:
        candidate = dict(rows)
        candidate[len(candidate)] = {columns[key]: c for key, c in vector.items()}
        grown = rank(candidate, (len(candidate), len(columns)))
        if grown > current:
            rows, current = candidate, grown
            classes.append(maps.morphism(vector, f"g{len(classes)}"))
    logger.debug(f"Hom({source.name}, {target.name}) in degree {degree}: {len(kernel)} cycles, "
                 f"{len(classes)} classes")
    return classes
