"""s_N of two-strand torus knots from the degree-0 free part of equivariant homology"""
import logging
from typing import List, Literal

from pydantic import BaseModel, Field

from modules.complex.closure import ClosedNetwork, close_braid, close_simplified
from modules.complex.diagram import BraidDiagram
from modules.homology.engine import network_complex
from modules.ring.potential import Variant, make_spec
from modules.structure.decompose import GradedModuleOverA, homology_over_A, extract_s_N
from modules.utils.errors import InvalidInputError, ResourceGuardError, StructuralError

logger = logging.getLogger(__name__)


class RasmussenResult(BaseModel):
    name: str
    n: int = Field(..., description="Rank N of sl(N)")
    s: int
    method: Literal["pipeline", "recursion", "formula"]
    certificates: List[str] = Field(default_factory=list)


def torus_knot_network(word: int, n: int) -> ClosedNetwork:
    """T(2, word) over the equivariant potential: B_k and one crossing for |word| >= 3"""
    spec = make_spec(n, Variant.EQUIVARIANT)
    if abs(word) < 3:
        return close_braid(BraidDiagram(word=word), spec)
    sign = 1 if word > 0 else -1
    return close_simplified(sign * (abs(word) // 2), spec, tail=sign)


def s_N_torus(word: int, n: int) -> RasmussenResult:
    if word % 2 == 0:
        raise InvalidInputError(f"T(2,{word}) is a two-component link; s_N needs a knot")
    name = f"T(2,{word})"
    try:
        network = torus_knot_network(word, n)
    except ResourceGuardError:
        logger.error(f"{name} for N={n} exceeds the size guard; use the recursion method instead")
        raise
    modules = homology_over_A(network_complex(network))
    degree_zero = modules.get(0, GradedModuleOverA())
    try:
        s = extract_s_N(degree_zero, n)
    except StructuralError:
        logger.error(f"Degree-0 homology of {name} for N={n}: free {degree_zero.free}, "
                     f"torsion {degree_zero.torsion}")
        raise
    others = {h: m.free_rank for h, m in modules.items() if h != 0 and m.free_rank}
    if others:
        raise StructuralError(f"{name} has free homology outside degree 0: {others}")
    logger.info(f"s_{n}({name}) = {s} from the equivariant pipeline")
    return RasmussenResult(name=name, n=n, s=s, method="pipeline",
                           certificates=[f"H^0({network.name}) free part {degree_zero.free}"])


def s_N_unknot(n: int) -> RasmussenResult:
    return RasmussenResult(name="unknot", n=n, s=0, method="formula", certificates=["unknot"])
