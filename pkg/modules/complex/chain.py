"""Chain complexes of matrix factorizations: direct sums, tensor products, Gaussian elimination and cones"""
import logging
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from sympy import QQ

from modules.mf.factorization import KoszulFactorization, MatrixFactorization, tensor
from modules.mf.homotopy import homotopic_scalar, null_homotopy
from modules.mf.morphisms import MFMorphism, identity, reinterpret, tensor_morphism
from modules.mf.reduction import ReductionChain, exclude_variable, transport
from modules.ring.potential import PotentialSpec
from modules.utils.config import get_settings
from modules.utils.errors import InvalidInputError, ResourceGuardError, VerificationError

logger = logging.getLogger(__name__)

Block = Tuple[int, int]


class Summand(NamedTuple):
    mf: MatrixFactorization
    shift: int = 0
    label: str = ""

    def degree(self, i: int) -> int:
        return self.mf.degree(i) + self.shift

    @property
    def rows(self) -> int:
        return self.mf.length if isinstance(self.mf, KoszulFactorization) else self.mf.rank.bit_length() - 1


class ComplexOfMF:
    """Homologically graded direct sums of factorizations; maps[h][(i, j)] runs from terms[h][i] to terms[h+1][j]"""

    def __init__(self, spec: PotentialSpec, name: str = ""):
        self.spec = spec
        self.name = name
        self.terms: Dict[int, List[Summand]] = {}
        self.maps: Dict[int, Dict[Block, MFMorphism]] = {}

    def __repr__(self) -> str:
        shape = ", ".join(f"{h}:{len(self.terms[h])}" for h in self.degrees)
        return f"ComplexOfMF({self.name or 'unnamed'}; {shape})"

    @property
    def degrees(self) -> List[int]:
        return sorted(h for h, objects in self.terms.items() if objects)

    def objects(self, h: int) -> List[Summand]:
        return self.terms.get(h, [])

    def add(self, h: int, mf: MatrixFactorization, shift: int = 0, label: str = "") -> int:
        objects = self.terms.setdefault(h, [])
        objects.append(Summand(mf, shift, label))
        return len(objects) - 1

    def set_map(self, h: int, i: int, j: int, f: MFMorphism) -> None:
        if f.parity:
            raise InvalidInputError(f"Differential component {f.name} of {self.name} is odd")
        if f.is_zero():
            self.maps.get(h, {}).pop((i, j), None)
            return
        self.maps.setdefault(h, {})[(i, j)] = f

    def component(self, h: int, i: int, j: int) -> Optional[MFMorphism]:
        return self.maps.get(h, {}).get((i, j))

    def components(self) -> Iterator[Tuple[int, int, int, MFMorphism]]:
        for h in sorted(self.maps):
            for (i, j), f in sorted(self.maps[h].items()):
                yield h, i, j, f

    @property
    def total_rows(self) -> int:
        return sum(s.rows for h in self.degrees for s in self.objects(h))

    def guard(self, max_rows: Optional[int] = None) -> None:
        limit = max_rows if max_rows is not None else get_settings().max_rows
        if self.total_rows > limit:
            raise ResourceGuardError(f"{self.name} needs {self.total_rows} Koszul rows, guard is {limit}")

    def shifted(self, q: int = 0, h: int = 0, name: str = "") -> "ComplexOfMF":
        """C{q^q}||h||: every object moved to degree + h and its q-shift raised by q"""
        result = ComplexOfMF(self.spec, name or self.name)
        for degree in self.degrees:
            for s in self.objects(degree):
                result.add(degree + h, s.mf, s.shift + q, s.label)
        for degree, blocks in self.maps.items():
            result.maps[degree + h] = dict(blocks)
        return result

    def check(self, exact: bool = True) -> None:
        """Components commute with the factorization differentials, have q-degree 0, and d.d vanishes

        With exact=False the square of the differential only has to be null-homotopic.
        """
        for h, i, j, f in self.components():
            if not f.is_chain_map():
                raise VerificationError(f"Component {h}:{i}->{j} of {self.name} is not a morphism of factorizations")
            if self.spec.graded and not f.is_zero():
                degree = f.degree()
                src, tgt = self.objects(h)[i], self.objects(h + 1)[j]
                if degree is None or degree + tgt.shift - src.shift != 0:
                    raise VerificationError(f"Component {h}:{i}->{j} of {self.name} is not of q-degree 0")
        for h in self.degrees:
            for i in range(len(self.objects(h))):
                for k in range(len(self.objects(h + 2))):
                    square = self.square(h, i, k)
                    if square is None or square.is_zero():
                        continue
                    if exact or null_homotopy(square) is None:
                        raise VerificationError(f"d.d does not vanish on {h}:{i} -> {h + 2}:{k} of {self.name}")

    def square(self, h: int, i: int, k: int) -> Optional[MFMorphism]:
        total = None
        for j in range(len(self.objects(h + 1))):
            first, second = self.component(h, i, j), self.component(h + 1, j, k)
            if first is None or second is None:
                continue
            part = second @ first
            total = part if total is None else total + part
        return total

    def rank_characteristic(self) -> Dict[int, int]:
        """sum over objects of (-1)^h q^(generator degree + shift), a bookkeeping invariant of elimination"""
        chi: Dict[int, int] = {}
        for h in self.degrees:
            sign = -1 if h % 2 else 1
            for s in self.objects(h):
                for i in range(s.mf.rank):
                    q = s.degree(i)
                    chi[q] = chi.get(q, 0) + sign
        return {q: c for q, c in sorted(chi.items()) if c}

    def object_count(self) -> int:
        return sum(len(self.objects(h)) for h in self.degrees)

    def layout(self) -> Dict[int, List[Tuple[int, ...]]]:
        """Sorted generator q-degrees of every object, per homological degree"""
        return {h: sorted(tuple(sorted(s.degree(i) for i in range(s.mf.rank))) for s in self.objects(h))
                for h in self.degrees}


class ChainMap:
    """components[h][(i, j)]: source.terms[h][i] -> target.terms[h][j]"""

    def __init__(self, source: ComplexOfMF, target: ComplexOfMF, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        self.components: Dict[int, Dict[Block, MFMorphism]] = {}

    def set(self, h: int, i: int, j: int, f: MFMorphism) -> None:
        if not f.is_zero():
            self.components.setdefault(h, {})[(i, j)] = f

    def check(self) -> None:
        """d f = f d on every block"""
        degrees = set(self.source.degrees) | set(self.target.degrees)
        for h in degrees:
            for i in range(len(self.source.objects(h))):
                for k in range(len(self.target.objects(h + 1))):
                    left = self._composite(h, i, k, first_source=True)
                    right = self._composite(h, i, k, first_source=False)
                    if not _difference_zero(left, right):
                        raise VerificationError(f"{self.name} does not commute with the differentials at {h}:{i}")

    def _composite(self, h: int, i: int, k: int, first_source: bool) -> Optional[MFMorphism]:
        total = None
        if first_source:
            for j in range(len(self.source.objects(h + 1))):
                d, f = self.source.component(h, i, j), self.components.get(h + 1, {}).get((j, k))
                if d is not None and f is not None:
                    total = f @ d if total is None else total + f @ d
        else:
            for j in range(len(self.target.objects(h))):
                f, d = self.components.get(h, {}).get((i, j)), self.target.component(h, j, k)
                if d is not None and f is not None:
                    total = d @ f if total is None else total + d @ f
        return total


def _difference_zero(left: Optional[MFMorphism], right: Optional[MFMorphism]) -> bool:
    if left is None and right is None:
        return True
    if left is None:
        return right.is_zero()
    if right is None:
        return left.is_zero()
    return left == right


def tensor_complexes(first: ComplexOfMF, second: ComplexOfMF, name: str = "") -> ComplexOfMF:
    """Total complex of the tensor product; d(x (x) y) = dx (x) y + (-1)^h x (x) dy"""
    if first.spec != second.spec:
        raise InvalidInputError("Cannot tensor complexes of different potentials")
    result = ComplexOfMF(first.spec, name or f"{first.name}*{second.name}")
    position: Dict[Tuple[int, int, int, int], Tuple[int, int]] = {}
    for h1 in first.degrees:
        for i1, s1 in enumerate(first.objects(h1)):
            for h2 in second.degrees:
                for i2, s2 in enumerate(second.objects(h2)):
                    mf = tensor(s1.mf, s2.mf)
                    label = f"{s1.label}{s2.label}"
                    position[(h1, i1, h2, i2)] = (h1 + h2, result.add(h1 + h2, mf, s1.shift + s2.shift, label))
    for (h1, i1, h2, i2), (h, k) in position.items():
        s1, s2 = first.objects(h1)[i1], second.objects(h2)[i2]
        for (a, b), f in first.maps.get(h1, {}).items():
            if a != i1:
                continue
            h_t, k_t = position[(h1 + 1, b, h2, i2)]
            tgt = result.objects(h_t)[k_t].mf
            result.set_map(h, k, k_t, tensor_morphism(f, identity(s2.mf), result.objects(h)[k].mf, tgt))
        sign = -1 if h1 % 2 else 1
        for (a, b), g in second.maps.get(h2, {}).items():
            if a != i2:
                continue
            h_t, k_t = position[(h1, i1, h2 + 1, b)]
            tgt = result.objects(h_t)[k_t].mf
            piece = tensor_morphism(identity(s1.mf), g, result.objects(h)[k].mf, tgt).scaled(sign)
            existing = result.component(h, k, k_t)
            result.set_map(h, k, k_t, piece if existing is None else existing + piece)
    return result


def scalar_isomorphism(f: MFMorphism, source: Summand, target: Summand, up_to_homotopy: bool = True):
    """c when f = c * id between factorizations with identical presentations and equal shifts, else None

    With up_to_homotopy a component that is only homotopic to c * id also qualifies.
    """
    if source.shift != target.shift or f.source.rank != f.target.rank:
        return None
    if [g.label for g in f.source.generators] != [g.label for g in f.target.generators]:
        return None
    if isinstance(f.source, KoszulFactorization) and isinstance(f.target, KoszulFactorization):
        if not f.source.same_rows(f.target):
            return None
    elif f.source.differential != f.target.differential:
        return None
    c = _exact_scalar(f)
    if c is None and up_to_homotopy and not f.is_zero():
        if f.target.spec.graded and f.degree() != 0:
            return None
        found = homotopic_scalar(f, reinterpret(identity(f.source), f.source, f.target, "id"))
        if found is not None:
            c = found[0]
            logger.debug(f"{f.name} is homotopic to {c} id")
    return c if c else None


def _exact_scalar(f: MFMorphism):
    c = None
    for i in range(f.source.rank):
        column = f.matrix.get(i, {})
        if set(column) != {i} or not column[i].is_ground:
            return None
        value = column[i].LC
        if c is None:
            c = value
        elif value != c:
            return None
    return c


def find_pivot(complex_: ComplexOfMF, up_to_homotopy: bool = True) -> Optional[Tuple[int, int, int, object]]:
    """First scalar-isomorphism component in increasing (h, i, j) order"""
    for h, i, j, f in complex_.components():
        c = scalar_isomorphism(f, complex_.objects(h)[i], complex_.objects(h + 1)[j], up_to_homotopy)
        if c is not None:
            return h, i, j, c
    return None


def eliminate(complex_: ComplexOfMF, h: int, i: int, j: int, c) -> ComplexOfMF:
    """Remove the pair A = terms[h][i], B = terms[h+1][j] along phi ~ c id; eps - gamma phi^-1 delta on the rest"""
    a, b = complex_.objects(h)[i], complex_.objects(h + 1)[j]
    inverse = reinterpret(identity(b.mf), b.mf, a.mf, "phi^-1").scaled(QQ.one / c)
    result = ComplexOfMF(complex_.spec, complex_.name)
    renumber: Dict[Tuple[int, int], int] = {}
    for degree in complex_.degrees:
        for k, s in enumerate(complex_.objects(degree)):
            if (degree, k) in ((h, i), (h + 1, j)):
                continue
            renumber[(degree, k)] = result.add(degree, s.mf, s.shift, s.label)
    for degree, src, tgt, f in complex_.components():
        if (degree, src) not in renumber or (degree + 1, tgt) not in renumber:
            continue
        g = f
        if degree == h:
            delta = complex_.component(h, src, j)
            gamma = complex_.component(h, i, tgt)
            if delta is not None and gamma is not None:
                g = f - gamma @ inverse @ delta
        result.set_map(degree, renumber[(degree, src)], renumber[(degree + 1, tgt)], g)
    for src, s in enumerate(complex_.objects(h)):
        for tgt, t in enumerate(complex_.objects(h + 1)):
            if src == i or tgt == j or complex_.component(h, src, tgt) is not None:
                continue
            delta = complex_.component(h, src, j)
            gamma = complex_.component(h, i, tgt)
            if delta is not None and gamma is not None:
                result.set_map(h, renumber[(h, src)], renumber[(h + 1, tgt)], -(gamma @ inverse @ delta))
    logger.debug(f"Eliminated {a.label or a.mf.name} -> {b.label or b.mf.name} at degree {h} of {complex_.name}")
    return result


def gaussian_eliminate(complex_: ComplexOfMF, up_to_homotopy: bool = True) -> ComplexOfMF:
    """Repeat elimination until no component is a scalar isomorphism (up to homotopy by default)"""
    steps = 0
    while True:
        pivot = find_pivot(complex_, up_to_homotopy)
        if pivot is None:
            break
        complex_ = eliminate(complex_, *pivot)
        steps += 1
    if steps:
        logger.info(f"Gaussian elimination removed {steps} pairs from {complex_.name}")
    return complex_


def mapping_cone(f: ChainMap, name: str = "") -> ComplexOfMF:
    """Cone^h = A^h + B^(h-1) with d(a, b) = (d a, f a - d b)"""
    f.check()
    source, target = f.source, f.target
    cone = ComplexOfMF(source.spec, name or f"Cone({f.name})")
    left: Dict[Tuple[int, int], int] = {}
    right: Dict[Tuple[int, int], int] = {}
    degrees = sorted(set(source.degrees) | {h + 1 for h in target.degrees})
    for h in degrees:
        for k, s in enumerate(source.objects(h)):
            left[(h, k)] = cone.add(h, s.mf, s.shift, s.label)
        for k, s in enumerate(target.objects(h - 1)):
            right[(h - 1, k)] = cone.add(h, s.mf, s.shift, s.label)
    for h, i, j, d in source.components():
        cone.set_map(h, left[(h, i)], left[(h + 1, j)], d)
    for h, i, j, d in target.components():
        cone.set_map(h + 1, right[(h, i)], right[(h + 1, j)], -d)
    for h, blocks in f.components.items():
        for (i, j), g in blocks.items():
            cone.set_map(h, left[(h, i)], right[(h, j)], g)
    return cone


def exclude_interior(complex_: ComplexOfMF, variables: List[str]) -> ComplexOfMF:
    """Replace every Koszul object by its reduction along the given internal marks, transporting the differential"""
    chains: Dict[Tuple[int, int], ReductionChain] = {}
    result = ComplexOfMF(complex_.spec, f"{complex_.name}|excluded")
    for h in complex_.degrees:
        for k, s in enumerate(complex_.objects(h)):
            chain = ReductionChain(s.mf)
            for var in variables:
                if not isinstance(chain.target, KoszulFactorization):
                    break
                outcome = exclude_variable(chain.target, var)
                if outcome.excluded:
                    chain = chain.then(outcome.step)
            chains[(h, k)] = chain
            result.add(h, chain.target, s.shift, s.label)
    for h, i, j, f in complex_.components():
        result.set_map(h, i, j, transport(f, chains[(h, i)], chains[(h + 1, j)]))
    return result
