"""Closed MOY graphs: circles, the closed wide edge and the closed double wide edge, plus diagram files"""
import logging
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from modules.complex.chain import ComplexOfMF
from modules.complex.closure import ClosedNetwork, Piece, close_complex, graph_network, stack_closure
from modules.complex.diagram import KnottedMOYGraph, Vertex
from modules.complex.local import wide_edge_complex
from modules.homology.engine import NetworkHomology, VertexHomology
from modules.homology.poincare import GradedVectorSpaceDims, complex_homology
from modules.mf.factorization import arc_mf
from modules.ring.linalg import rank
from modules.ring.potential import PotentialSpec, Variant, make_spec
from modules.utils.errors import InvalidInputError, VerificationError

logger = logging.getLogger(__name__)

SHAPES = ("circle", "circles", "theta", "double")


class ClosedGraphHomology(BaseModel):
    """H of a closed graph over F[a]: a monomial basis with q-degrees, concentrated in one Z2-degree"""
    name: str
    n: int
    rank: int
    parity: int = Field(..., description="Z2-degree carrying the homology")
    basis: List[str] = Field(default_factory=list)
    degrees: List[int] = Field(default_factory=list)
    free_over_a: bool = True

    @property
    def q_dimension(self) -> Dict[int, int]:
        dims: Dict[int, int] = {}
        for q in self.degrees:
            dims[q] = dims.get(q, 0) + 1
        return dims


def _circle_complex(spec: PotentialSpec) -> ComplexOfMF:
    complex_ = ComplexOfMF(spec, "arc")
    complex_.add(0, arc_mf(spec, "x3", "x1"), 0, "arc")
    return complex_


def shape_network(shape: str, n: int, count: int = 1) -> ClosedNetwork:
    """A catalogued closed graph over the equivariant potential"""
    spec = make_spec(n, Variant.EQUIVARIANT)
    if shape == "circle":
        shape, count = "circles", 1
    if shape == "circles":
        if count < 1:
            raise InvalidInputError("Need at least one circle")
        arc = _circle_complex(spec)
        pieces = [Piece(arc, {"x1": f"y{i + 1}", "x3": f"y{i + 1}"}) for i in range(count)]
        return ClosedNetwork(spec, pieces, f"circles({count})")
    if shape == "theta":
        return close_complex(wide_edge_complex(spec), spec, "theta")
    if shape == "double":
        return stack_closure(spec, [wide_edge_complex(spec), wide_edge_complex(spec)], "double")
    raise InvalidInputError(f"Unknown closed graph shape {shape!r}; expected one of {SHAPES}")


def _single_vertex(network: ClosedNetwork) -> VertexHomology:
    vertices = list(network.vertices())
    if len(vertices) != 1:
        raise InvalidInputError(f"{network.name} has crossings; a closed graph has a single resolution")
    return NetworkHomology(network).vertex(vertices[0])


def describe(network: ClosedNetwork) -> ClosedGraphHomology:
    vh = _single_vertex(network)
    return ClosedGraphHomology(name=network.name, n=network.spec.n, rank=vh.rank, parity=vh.parity,
                               basis=[str(m.as_expr()) for m in vh.basis], degrees=sorted(vh.degrees))


@lru_cache(maxsize=None)
def closed_shape_homology(shape: str, n: int, count: int = 1) -> ClosedGraphHomology:
    return describe(shape_network(shape, n, count))


def closed_graph_homology(graph: KnottedMOYGraph, spec: PotentialSpec) -> ClosedGraphHomology:
    """H of a crossing-free closed graph read from the diagram format"""
    if graph.positive_crossings or graph.negative_crossings:
        raise InvalidInputError("closed_graph_homology expects wide edges only")
    network = graph_network(graph, make_spec(spec.n, Variant.EQUIVARIANT))
    return describe(network)


def stated_basis(shape: str, n: int) -> Tuple[List[Dict[str, int]], int]:
    """Monomial basis and lowest q-degree stated for the closed wide edge and the closed double wide edge"""
    if shape == "theta":
        return [{"y1": i, "y2": j} for i in range(n) for j in range(n - 1)], 3 - 2 * n
    if shape == "double":
        return [{"y1": i, "y2": j, "y3": e} for e in (0, 1) for i in range(n) for j in range(n - 1)], 2 - 2 * n
    raise InvalidInputError(f"No stated basis for {shape!r}")


class StatedBasisReport(BaseModel):
    shape: str
    n: int
    rank: int
    expected_rank: int
    shift: int
    basis_spans: bool
    free_over_a: bool


def verify_stated_basis(shape: str, n: int) -> StatedBasisReport:
    """Rank N(N-1) or 2N(N-1), q-degrees of the stated basis, and that the stated monomials form a basis over F[a]"""
    network = shape_network(shape, n)
    vh = _single_vertex(network)
    stated, shift = stated_basis(shape, n)
    ring = network.ring
    expected_degrees = sorted(shift + 2 * sum(m.values()) for m in stated)
    if sorted(vh.degrees) != expected_degrees:
        raise VerificationError(f"{shape}, N={n}: degrees {sorted(vh.degrees)} differ from {expected_degrees}")
    rows: Dict[int, Dict[int, object]] = {}
    for r, powers in enumerate(stated):
        mono = ring.one
        for name, power in powers.items():
            mono *= ring[name] ** power
        for k, coeffs in vh.coordinates(mono).items():
            for c in coeffs.values():
                rows.setdefault(r, {})[k] = c
    spans = rank(rows, (len(stated), vh.rank)) == len(stated) == vh.rank
    if not spans:
        raise VerificationError(f"Stated monomials do not form a basis of H({shape}) for N={n}")
    logger.info(f"H({shape}) for N={n}: rank {vh.rank}, lowest degree {min(vh.degrees)}, stated basis verified")
    return StatedBasisReport(shape=shape, n=n, rank=vh.rank, expected_rank=len(stated), shift=min(vh.degrees),
                             basis_spans=spans, free_over_a=True)


def find_double_wide_edge(graph: KnottedMOYGraph) -> Optional[Tuple[int, int]]:
    """Indices of two wide edges where the outputs of the first are exactly the inputs of the second"""
    for i, v in enumerate(graph.vertices):
        if v.kind != "W":
            continue
        for j, w in enumerate(graph.vertices):
            if j != i and w.kind == "W" and set(v.outputs) == set(w.inputs) and len(set(v.outputs)) == 2:
                return i, j
    return None


def merge_double_wide_edge(graph: KnottedMOYGraph) -> KnottedMOYGraph:
    found = find_double_wide_edge(graph)
    if found is None:
        raise InvalidInputError(f"{graph.name or 'graph'} has no pair of stacked wide edges")
    i, j = found
    first, second = graph.vertices[i], graph.vertices[j]
    merged = Vertex(kind="W", edges=first.inputs + second.outputs)
    vertices = [v for k, v in enumerate(graph.vertices) if k not in (i, j)] + [merged]
    return KnottedMOYGraph(vertices=vertices, name=f"{graph.name}'")


class MoyCheck(BaseModel):
    holds: bool
    left: GradedVectorSpaceDims
    right: GradedVectorSpaceDims


def moy2_check(graph: KnottedMOYGraph, n: int) -> MoyCheck:
    """dim_q H(G) = (q + q^-1) dim_q H(G') where G' merges a stacked pair of wide edges"""
    smaller = merge_double_wide_edge(graph)
    spec = make_spec(n, Variant.EQUIVARIANT)
    left = complex_homology(graph_network(graph, spec), Variant.GENERIC).dims
    base = complex_homology(graph_network(smaller, spec), Variant.GENERIC).dims
    right = base.shifted(q=1) + base.shifted(q=-1)
    holds = left.ranks == right.ranks
    logger.info(f"MOY II on {graph.name or 'graph'} for N={n}: {'holds' if holds else 'FAILS'}")
    return MoyCheck(holds=holds, left=left, right=right)
