"""Bigraded dimensions, Poincare polynomials and Euler characteristics of closed networks in each theory"""
import logging
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy import Symbol

from modules.complex.closure import ClosedNetwork
from modules.homology.engine import network_complex
from modules.ring.potential import Variant
from modules.structure.decompose import GradedModuleOverA, homology_over_A
from modules.structure.graded_complex import GradedFreeComplexOverA
from modules.utils.errors import VerificationError

logger = logging.getLogger(__name__)

T = Symbol("t")
Q = Symbol("q")


class GradedVectorSpaceDims(BaseModel):
    """(homological degree, q-degree) -> rank"""
    ranks: Dict[Tuple[int, int], int] = Field(default_factory=dict)

    @field_validator("ranks")
    @classmethod
    def _nonnegative(cls, value: Dict[Tuple[int, int], int]) -> Dict[Tuple[int, int], int]:
        for key, rank in value.items():
            if rank < 0:
                raise ValueError(f"Negative rank {rank} at {key}")
        return {key: rank for key, rank in sorted(value.items()) if rank}

    def by_degree(self) -> Dict[int, int]:
        totals: Dict[int, int] = {}
        for (h, _), rank in self.ranks.items():
            totals[h] = totals.get(h, 0) + rank
        return totals

    def at(self, h: int) -> Dict[int, int]:
        return {q: rank for (d, q), rank in self.ranks.items() if d == h}

    @property
    def total(self) -> int:
        return sum(self.ranks.values())

    def shifted(self, q: int = 0, h: int = 0) -> "GradedVectorSpaceDims":
        return GradedVectorSpaceDims(ranks={(d + h, e + q): r for (d, e), r in self.ranks.items()})

    def __add__(self, other: "GradedVectorSpaceDims") -> "GradedVectorSpaceDims":
        ranks = dict(self.ranks)
        for key, rank in other.ranks.items():
            ranks[key] = ranks.get(key, 0) + rank
        return GradedVectorSpaceDims(ranks=ranks)


class PoincarePolynomial(BaseModel):
    terms: Dict[Tuple[int, int], int] = Field(default_factory=dict, description="(t exponent, q exponent) -> coefficient")

    def as_expr(self):
        return sum((c * T ** t * Q ** q for (t, q), c in sorted(self.terms.items())), 0)

    def at_minus_one(self) -> Dict[int, int]:
        """Laurent polynomial in q obtained by substituting t = -1"""
        result: Dict[int, int] = {}
        for (t, q), c in self.terms.items():
            result[q] = result.get(q, 0) + (-c if t % 2 else c)
        return {q: c for q, c in result.items() if c}

    def __str__(self) -> str:
        return str(self.as_expr())


def poincare(dims: GradedVectorSpaceDims) -> PoincarePolynomial:
    return PoincarePolynomial(terms=dict(dims.ranks))


def euler_characteristic(dims: GradedVectorSpaceDims) -> Dict[int, int]:
    """q-degree -> alternating sum over homological degrees"""
    chi: Dict[int, int] = {}
    for (h, q), rank in dims.ranks.items():
        chi[q] = chi.get(q, 0) + (-rank if h % 2 else rank)
    return {q: c for q, c in sorted(chi.items()) if c}


def q_dimension(dims: Dict[int, int]) -> str:
    return " + ".join(f"{c}q^{q}" for q, c in sorted(dims.items(), reverse=True)) or "0"


class HomologyResult(BaseModel):
    """Homology of a closed network in one theory; torsion only for the equivariant theory"""
    name: str
    n: int
    variant: Variant
    dims: GradedVectorSpaceDims
    torsion: List[Tuple[int, int, int]] = Field(default_factory=list, description="(h, q, a exponent)")
    modules: Dict[int, GradedModuleOverA] = Field(default_factory=dict)

    @property
    def poincare(self) -> PoincarePolynomial:
        return poincare(self.dims)

    @property
    def euler(self) -> Dict[int, int]:
        return euler_characteristic(self.dims)


def dims_from_complex(complex_: GradedFreeComplexOverA, variant: Variant,
                      modules: Optional[Dict[int, GradedModuleOverA]] = None) -> GradedVectorSpaceDims:
    """Generic homology is the a = 0 specialization; deformed and equivariant report free graded ranks

    The deformed dimensions are filtered dimensions; they are checked against
    the ungraded a = 1 specialization degree by degree.
    """
    if variant == Variant.GENERIC:
        return GradedVectorSpaceDims(ranks=complex_.dims_at_zero())
    modules = modules if modules is not None else homology_over_A(complex_)
    ranks: Dict[Tuple[int, int], int] = {}
    for h, module in modules.items():
        for q in module.free:
            ranks[(h, q)] = ranks.get((h, q), 0) + 1
    dims = GradedVectorSpaceDims(ranks=ranks)
    if variant == Variant.DEFORMED:
        ungraded = complex_.dims_at_one()
        if ungraded != dims.by_degree():
            raise VerificationError(f"Free ranks {dims.by_degree()} of {complex_.name} differ from the "
                                    f"a=1 dimensions {ungraded}")
    return dims


def complex_homology(network: ClosedNetwork, variant: Variant = Variant.GENERIC,
                     complex_: Optional[GradedFreeComplexOverA] = None) -> HomologyResult:
    """Homology of a closed network, computed once over F[a] and specialized to the requested theory"""
    variant = Variant(variant)
    complex_ = complex_ if complex_ is not None else network_complex(network)
    modules: Dict[int, GradedModuleOverA] = {}
    torsion: List[Tuple[int, int, int]] = []
    if variant != Variant.GENERIC:
        modules = homology_over_A(complex_)
        torsion = [(h, q, k) for h, module in modules.items() for q, k in module.torsion]
    dims = dims_from_complex(complex_, variant, modules if variant != Variant.GENERIC else None)
    logger.info(f"H({network.name}) for N={network.spec.n}, {variant.value}: {dims.by_degree()}")
    return HomologyResult(name=network.name, n=network.spec.n, variant=variant, dims=dims,
                          torsion=torsion if variant == Variant.EQUIVARIANT else [], modules=modules)
