"""Potentials w(x) for the three theories and the polynomials derived from them"""
import logging
from enum import Enum
from functools import lru_cache
from typing import Sequence, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy.polys.rings import PolyElement, PolyRing
from sympy import QQ

from modules.ring.polynomial import GradedRing
from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    GENERIC = "generic"
    EQUIVARIANT = "equivariant"
    DEFORMED = "deformed"


class PotentialSpec(BaseModel):
    n: int = Field(..., description="Rank N of sl(N); the potential has degree N+1 in x")
    variant: Variant = Field(Variant.GENERIC, description="Which of the three potentials to use")

    model_config = {"frozen": True}

    @field_validator("n")
    @classmethod
    def _check_rank(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"N must be at least 2, got {value}")
        return value

    @property
    def graded(self) -> bool:
        return self.variant != Variant.DEFORMED

    @property
    def needs_a(self) -> bool:
        return self.variant == Variant.EQUIVARIANT

    def ring(self, x_names: Sequence[str], order: str = "grlex") -> GradedRing:
        """Polynomial ring suited to this potential over the given marks"""
        return GradedRing(self.n, x_names, with_a=self.needs_a, order=order)


def make_spec(n: int, variant="generic") -> PotentialSpec:
    """Build a PotentialSpec, mapping validation failures to InvalidInputError"""
    try:
        return PotentialSpec(n=n, variant=Variant(variant))
    except ValueError as e:
        raise InvalidInputError(str(e))


def _linear_coefficient(spec: PotentialSpec, ring: GradedRing) -> PolyElement:
    """c in w(x) = x^(N+1) - c*x"""
    if spec.variant == Variant.EQUIVARIANT:
        return ring.a
    if spec.variant == Variant.DEFORMED:
        return ring.one
    return ring.zero


def potential(spec: PotentialSpec, ring: GradedRing, var: str) -> PolyElement:
    """w(x) for the chosen variant in the named variable"""
    x = ring[var]
    return x ** (spec.n + 1) - _linear_coefficient(spec, ring) * x


def potential_derivative(spec: PotentialSpec, ring: GradedRing, var: str) -> PolyElement:
    x = ring[var]
    return (spec.n + 1) * x ** spec.n - _linear_coefficient(spec, ring)


def pi_quotient(spec: PotentialSpec, ring: GradedRing, xi: str, xj: str) -> PolyElement:
    """(w(x_i) - w(x_j)) / (x_i - x_j), an exact quotient"""
    if xi == xj:
        raise InvalidInputError("pi_quotient needs two distinct variables")
    numerator = potential(spec, ring, xi) - potential(spec, ring, xj)
    return numerator.exquo(ring[xi] - ring[xj])


def power_sums(s: PolyElement, p: PolyElement, top: int) -> list:
    """x^k + y^k written in s = x+y and p = xy, for k = 0..top"""
    sums = [2 * s.ring.one, s]
    for _ in range(2, top + 1):
        sums.append(s * sums[-1] - p * sums[-2])
    return sums[:top + 1]


@lru_cache(maxsize=None)
def _uv_template(n: int, variant: Variant) -> Tuple[PolyRing, PolyElement, PolyElement]:
    """u and v as polynomials in a, S1, S2, P1, P2"""
    aux = PolyRing("a,S1,S2,P1,P2", QQ, "grlex")
    a, s1, s2, p1, p2 = aux.gens
    c = {Variant.EQUIVARIANT: a, Variant.DEFORMED: aux.one, Variant.GENERIC: aux.zero}[variant]

    def g(s, p):
        return power_sums(s, p, n + 1)[n + 1] - c * s

    u = (g(s1, p1) - g(s2, p1)).exquo(s1 - s2)
    v = (g(s2, p1) - g(s2, p2)).exquo(p1 - p2)
    return aux, u, v


def uv_quotients(spec: PotentialSpec, ring: GradedRing, i: str, j: str, k: str, l: str) -> Tuple[PolyElement, PolyElement]:
    """(u, v) with u(s1 - s2) + v(p1 - p2) = g(s1, p1) - g(s2, p2)

    Here w(x) + w(y) = g(x + y, xy), s1 = x_i + x_j, p1 = x_i x_j and
    s2, p2 are built from x_k, x_l.
    """
    _, u_template, v_template = _uv_template(spec.n, spec.variant)
    xi, xj, xk, xl = (ring[name] for name in (i, j, k, l))
    a = ring.a if spec.needs_a else ring.zero
    images = {"a": a, "S1": xi + xj, "S2": xk + xl, "P1": xi * xj, "P2": xk * xl}
    return ring.pull_back(u_template, images), ring.pull_back(v_template, images)


def g_difference(spec: PotentialSpec, ring: GradedRing, i: str, j: str, k: str, l: str) -> PolyElement:
    """w(x_i) + w(x_j) - w(x_k) - w(x_l)"""
    return (potential(spec, ring, i) + potential(spec, ring, j)
            - potential(spec, ring, k) - potential(spec, ring, l))
