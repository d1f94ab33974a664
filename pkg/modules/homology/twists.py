"""Closures of b^(2k) by brute force against closures of the simplified complex B_k"""
import logging
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from modules.complex.closure import close_braid, close_simplified
from modules.complex.chain import gaussian_eliminate
from modules.complex.diagram import BraidDiagram
from modules.complex.local import braid_complex, simplified_b_complex
from modules.homology.engine import network_complex
from modules.homology.poincare import complex_homology
from modules.mf.moy import verify_two_crossing_reduction
from modules.ring.potential import PotentialSpec, Variant, make_spec
from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class TwistReport(BaseModel):
    k: int
    n: int
    theories: Dict[str, bool] = Field(default_factory=dict, description="Theory -> bigraded homologies agree")
    euler_match: bool
    elimination_invariant: Optional[bool] = Field(None, description="C(b^2) eliminates to the layout of B_1, for k=1")
    open_level: List[str] = Field(default_factory=list, description="Identities certified for the k=1 reduction")

    @property
    def holds(self) -> bool:
        return all(self.theories.values()) and self.euler_match and self.elimination_invariant is not False


def reduces_to_simplified_twist(spec: PotentialSpec) -> bool:
    """Gaussian elimination of the split C(b^2) leaves the objects of B_1 and keeps the rank characteristic"""
    split = braid_complex(BraidDiagram(word=2), spec, exclude=True)
    eliminated = gaussian_eliminate(split)
    target = simplified_b_complex(1, spec)
    same = eliminated.layout() == target.layout()
    if not same:
        logger.warning(f"C(b^2) eliminates to {eliminated.layout()}, B_1 has {target.layout()}")
    return same and eliminated.rank_characteristic() == split.rank_characteristic()


def compare_twist_closures(k: int, n: int, open_level: Optional[bool] = None) -> TwistReport:
    """Both closures are computed once over F[a] and specialized to every theory"""
    if k == 0:
        raise InvalidInputError("k must be non-zero")
    spec = make_spec(n, Variant.EQUIVARIANT)
    brute_network = close_braid(BraidDiagram(word=2 * k), spec)
    simple_network = close_simplified(k, spec)
    brute, simple = network_complex(brute_network), network_complex(simple_network)
    theories = {}
    for variant in Variant:
        left = complex_homology(brute_network, variant, brute)
        right = complex_homology(simple_network, variant, simple)
        theories[variant.value] = left.dims == right.dims and left.torsion == right.torsion
        if not theories[variant.value]:
            logger.warning(f"{variant.value} homology differs for k={k}, N={n}: "
                           f"{left.dims.ranks} against {right.dims.ranks}")

    certified: List[str] = []
    invariant = None
    if open_level if open_level is not None else k == 1:
        generic = make_spec(n, Variant.GENERIC)
        certified = verify_two_crossing_reduction(generic).certified
        invariant = reduces_to_simplified_twist(generic)
    report = TwistReport(k=k, n=n, theories=theories,
                         euler_match=brute.euler_characteristic() == simple.euler_characteristic(),
                         elimination_invariant=invariant, open_level=certified)
    logger.info(f"b^{2 * k} against B_{k} for N={n}: {'agree' if report.holds else 'DISAGREE'}")
    return report
