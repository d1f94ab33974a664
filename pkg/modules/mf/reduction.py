"""Mark removal: contracting a Koszul row against a variable, and transport of morphisms along reductions"""
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from modules.mf.factorization import (Generator, KoszulFactorization, KoszulRow, Matrix, MatrixFactorization,
                                      Vector, add_to)
from modules.mf.morphisms import MFMorphism, reinterpret, row_operation
from modules.ring.polynomial import X_DEGREE
from modules.utils.errors import InvalidInputError, StructuralError

logger = logging.getLogger(__name__)


class ReductionStep:
    """A homotopy equivalence source -> target given by a projection and a lift"""
    source: MatrixFactorization
    target: MatrixFactorization

    def project(self, vector: Vector) -> Vector:
        raise NotImplementedError

    def lift(self, vector: Vector) -> Vector:
        raise NotImplementedError


class IsomorphismStep(ReductionStep):
    """An isomorphism of factorizations together with its inverse"""

    def __init__(self, forward: MFMorphism, backward: MFMorphism):
        self.forward = forward
        self.backward = backward
        self.source = forward.source
        self.target = forward.target

    def project(self, vector: Vector) -> Vector:
        return self.forward.apply(vector)

    def lift(self, vector: Vector) -> Vector:
        return self.backward.apply(vector)


def _insert(t: Tuple[int, ...], position: int, bit: int) -> Tuple[int, ...]:
    return t[:position] + (bit,) + t[position:]


class Exclusion(ReductionStep):
    """Contract row `row` of a Koszul factorization whose right entry f has a unit leading coefficient in `var`

    The target is the remaining rows over R[var]/(f). For linear f this is the
    Koszul factorization with var substituted away; otherwise it is a general
    factorization with basis e_t * var^j, j < deg f.
    """

    def __init__(self, source: KoszulFactorization, row: int, var: str):
        self.source = source
        self.row = row
        self.var = var
        ring = source.ring
        self.f = source.rows[row].right
        self.d = self.f.degree(ring[var])
        if self.d < 1:
            raise InvalidInputError(f"Row {row} of {source.name} does not involve {var}")
        lead = self.f.coeff_wrt(ring[var], self.d)
        if not lead.is_ground:
            raise InvalidInputError(f"Row {row} of {source.name} has a non-unit leading coefficient in {var}")
        if source.potential.degree(ring[var]) > 0:
            raise InvalidInputError(f"{var} occurs in the potential of {source.name}; it is not internal")
        rest = [r for i, r in enumerate(source.rows) if i != row]
        self.rest = KoszulFactorization(ring, source.spec, rest, source.shift, f"{source.name}/{var}")
        self.substitution: Dict[str, PolyElement] = {}
        if self.d == 1:
            self.substitution = {var: ring[var] - self.f * ring.ring.ground_new(1 / lead.LC)}
            target_rows = [KoszulRow(self.reduce(r.left), self.reduce(r.right)) for r in rest]
            self.target = KoszulFactorization(ring, source.spec, target_rows, source.shift,
                                              f"{source.name}|{var}", source.boundary)
        else:
            self.target = self._monic_target()
        logger.debug(f"Excluded {var} from {source.name} (degree {self.d}), rank {source.rank} -> {self.target.rank}")

    def reduce(self, p: PolyElement) -> PolyElement:
        """Remainder of p modulo f in the excluded variable"""
        if self.d == 1:
            return self.source.ring.substitute(p, self.substitution)
        return self.source.ring.divmod_in(p, self.f, self.var)[1]

    def _powers(self, p: PolyElement) -> Dict[int, PolyElement]:
        return self.source.ring.coefficients_in(self.reduce(p), self.var)

    def _target_index(self, t: Tuple[int, ...], power: int) -> int:
        if self.d == 1:
            return self.target.index(t)
        return self._monic_index[(t, power)]

    def _monic_target(self) -> MatrixFactorization:
        ring = self.source.ring
        generators = []
        for i in range(self.rest.rank):
            t = self.rest.label(i)
            base = self.source.degree(self.source.index(_insert(t, self.row, 0)))
            for j in range(self.d):
                generators.append(Generator((t, j), sum(t) % 2, base + X_DEGREE * j))
        self._monic_index = {g.label: k for k, g in enumerate(generators)}
        x = ring[self.var]
        differential: Matrix = {}
        for k, g in enumerate(generators):
            t, j = g.label
            image = self.rest.apply({self.rest.index(t): x ** j})
            column: Vector = {}
            for s, coeff in image.items():
                for power, c in self._powers(coeff).items():
                    add_to(column, self._monic_index[(self.rest.label(s), power)], c)
            if column:
                differential[k] = column
        return MatrixFactorization(ring, self.source.spec, generators, differential, self.source.potential,
                                   f"{self.source.name}|{self.var}^{self.d}", self.source.boundary)

    def project(self, vector: Vector) -> Vector:
        image: Vector = {}
        for i, coeff in vector.items():
            t = self.source.label(i)
            if t[self.row]:
                continue
            rest = t[:self.row] + t[self.row + 1:]
            for power, c in self._powers(coeff).items():
                add_to(image, self._target_index(rest, power), c)
        return image

    def _as_rest_vector(self, vector: Vector) -> Vector:
        """Target coordinates back to a vector of the remaining rows over R"""
        if self.d == 1:
            return {self.rest.index(self.target.label(i)): c for i, c in vector.items()}
        x = self.source.ring[self.var]
        rest: Vector = {}
        for i, c in vector.items():
            t, j = self.target.generators[i].label
            add_to(rest, self.rest.index(t), c * x ** j)
        return rest

    def lift(self, vector: Vector) -> Vector:
        """k -> k e0 + (-1)^|k| ((D k) quo f) e1, placed with the row in its original position"""
        ring = self.source.ring
        lifted: Vector = {}
        for s, k in self._as_rest_vector(vector).items():
            t = self.rest.label(s)
            add_to(lifted, self.source.index(_insert(t, self.row, 0)), k)
            sign_k = -1 if sum(t) % 2 else 1
            for s2, coeff in self.rest.apply({s: k}).items():
                quotient = ring.divmod_in(coeff, self.f, self.var)[0]
                if not quotient:
                    continue
                t2 = self.rest.label(s2)
                sign = sign_k * (-1 if sum(t2[self.row:]) % 2 else 1)
                add_to(lifted, self.source.index(_insert(t2, self.row, 1)), sign * quotient)
        return lifted


class ReductionChain:
    """Composite of reduction steps from an original factorization to a smaller model"""

    def __init__(self, source: MatrixFactorization, steps: Optional[Sequence[ReductionStep]] = None):
        self.source = source
        self.steps: List[ReductionStep] = list(steps or [])

    @property
    def target(self) -> MatrixFactorization:
        return self.steps[-1].target if self.steps else self.source

    def then(self, step: ReductionStep) -> "ReductionChain":
        if step.source is not self.target:
            raise InvalidInputError("Reduction step does not start where the chain ends")
        return ReductionChain(self.source, self.steps + [step])

    def project(self, vector: Vector) -> Vector:
        for step in self.steps:
            vector = step.project(vector)
        return vector

    def lift(self, vector: Vector) -> Vector:
        for step in reversed(self.steps):
            vector = step.lift(vector)
        return vector

    @property
    def substitution(self) -> Dict[str, PolyElement]:
        """Composite substitution of the linear exclusions, as images of the excluded variables"""
        ring = self.source.ring
        images: Dict[str, PolyElement] = {}
        for step in self.steps:
            if isinstance(step, Exclusion):
                if step.d != 1:
                    raise StructuralError("A chain with a non-linear exclusion is not a substitution")
                images = {x: ring.substitute(p, step.substitution) for x, p in images.items()}
                images.update(step.substitution)
        return images


class ExclusionResult(NamedTuple):
    factorization: MatrixFactorization
    step: Optional[Exclusion]
    excluded: bool


def is_linear_in(p: PolyElement, x: PolyElement) -> bool:
    return bool(p) and p.degree(x) == 1 and p.coeff_wrt(x, 1).is_ground


def find_linear_row(mf: KoszulFactorization, var: str) -> Optional[int]:
    """Shortest row whose right entry is linear in var with a constant coefficient"""
    x = mf.ring[var]
    candidates = [(len(row.right.terms()), i) for i, row in enumerate(mf.rows) if is_linear_in(row.right, x)]
    return min(candidates)[1] if candidates else None


def exclude_variable(mf: KoszulFactorization, var: str, row: Optional[int] = None) -> ExclusionResult:
    """Remove an internal mark using a row whose right entry is linear in it

    Returns the input unchanged, flagged, when no row qualifies.
    """
    if var in mf.boundary:
        raise InvalidInputError(f"{var} is a boundary mark of {mf.name} and cannot be excluded")
    if var not in mf.ring:
        raise InvalidInputError(f"{var} is not a variable of {mf.name}")
    if row is None:
        row = find_linear_row(mf, var)
    elif not is_linear_in(mf.rows[row].right, mf.ring[var]):
        raise InvalidInputError(f"Row {row} of {mf.name} is not linear in {var}")
    if row is None:
        logger.warning(f"No row of {mf.name} is linear in {var}; nothing excluded")
        return ExclusionResult(mf, None, False)
    step = Exclusion(mf, row, var)
    return ExclusionResult(step.target, step, True)


def row_operation_step(mf: KoszulFactorization, i: int, j: int, mu) -> IsomorphismStep:
    """The row operation of morphisms.row_operation packaged with its inverse"""
    target, forward = row_operation(mf, i, j, mu)
    back, backward = row_operation(target, i, j, -mf.ring.convert(mu))
    if not back.same_rows(mf):
        raise StructuralError(f"Row operation on {mf.name} is not invertible as computed")
    return IsomorphismStep(forward, reinterpret(backward, target, mf))


def exclude_all(mf: KoszulFactorization, variables: Sequence[str]) -> ReductionChain:
    """Exclude the given internal marks in order, chaining the steps"""
    chain = ReductionChain(mf)
    for var in variables:
        result = exclude_variable(chain.target, var)
        if not result.excluded:
            raise StructuralError(f"Could not exclude {var} from {mf.name}")
        chain = chain.then(result.step)
    return chain


def transport(f: MFMorphism, source_chain: ReductionChain, target_chain: ReductionChain, name: str = "") -> MFMorphism:
    """project_target . f . lift_source between the reduced models"""
    if source_chain.source.rank != f.source.rank or target_chain.source.rank != f.target.rank:
        raise InvalidInputError("Reduction chains do not match the morphism")
    source, target = source_chain.target, target_chain.target
    matrix: Matrix = {}
    for i in range(source.rank):
        image = target_chain.project(f.apply(source_chain.lift({i: source.ring.one})))
        if image:
            matrix[i] = image
    return MFMorphism(source, target, matrix, f.parity, name or f.name)
