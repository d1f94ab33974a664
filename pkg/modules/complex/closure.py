"""Closed networks of local complexes: braid closures, closed MOY graphs and their resolution vertices"""
import itertools
import logging
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from modules.complex.chain import ComplexOfMF, Summand
from modules.complex.diagram import BraidDiagram, KnottedMOYGraph
from modules.complex.local import STANDARD, b_complex, cone_of_x1_minus_x3, crossing_complex, wide_edge_complex
from modules.mf.factorization import KoszulFactorization, KoszulRow, Matrix, Vector, add_to
from modules.mf.morphisms import MFMorphism
from modules.ring.potential import PotentialSpec
from modules.utils.config import get_settings
from modules.utils.errors import InvalidInputError, ResourceGuardError

logger = logging.getLogger(__name__)

Choice = Tuple[int, int]
Vertex = Tuple[Choice, ...]


class Piece(NamedTuple):
    complex: ComplexOfMF
    marks: Dict[str, str]


class Edge(NamedTuple):
    target: Vertex
    sign: int
    piece: int
    morphism: MFMorphism


class ClosedNetwork:
    """Local complexes on x1..x4 glued by naming their marks; outputs x1, x2 and inputs x3, x4

    A vertex picks one object in every piece. Its factorization is the tensor
    product of the chosen objects pulled back to the edge variables.
    """

    def __init__(self, spec: PotentialSpec, pieces: Sequence[Piece], name: str = ""):
        if not pieces:
            raise InvalidInputError("A closed network needs at least one piece")
        self.spec = spec
        self.pieces = list(pieces)
        self.name = name
        self._check_orientation()
        names = sorted({v for p in self.pieces for v in p.marks.values()}, key=_natural)
        self.ring = spec.ring(names)
        rows = sum(max(s.rows for h in p.complex.degrees for s in p.complex.objects(h)) for p in self.pieces)
        if rows > get_settings().max_rows:
            raise ResourceGuardError(f"{name} needs {rows} Koszul rows per resolution, guard is "
                                     f"{get_settings().max_rows}")
        self._cache: Dict[Vertex, KoszulFactorization] = {}
        self._matrices: Dict[Tuple[int, int], Matrix] = {}

    def _check_orientation(self) -> None:
        outputs: Dict[str, int] = {}
        inputs: Dict[str, int] = {}
        for p in self.pieces:
            for local, edge in p.marks.items():
                side = outputs if local in ("x1", "x2") else inputs
                side[edge] = side.get(edge, 0) + 1
        for edge in set(outputs) | set(inputs):
            if outputs.get(edge) != 1 or inputs.get(edge) != 1:
                raise InvalidInputError(f"Edge {edge} of {self.name} must leave one piece and enter one piece "
                                        f"(leaves {outputs.get(edge, 0)}, enters {inputs.get(edge, 0)})")

    @property
    def variables(self) -> List[str]:
        return list(self.ring.x_names)

    def vertices(self) -> Iterator[Vertex]:
        choices = [[(h, i) for h in p.complex.degrees for i in range(len(p.complex.objects(h)))]
                   for p in self.pieces]
        return itertools.product(*choices)

    def degree(self, vertex: Vertex) -> int:
        return sum(h for h, _ in vertex)

    def summand(self, piece: int, choice: Choice) -> Summand:
        h, i = choice
        return self.pieces[piece].complex.objects(h)[i]

    def shift(self, vertex: Vertex) -> int:
        """Total q-shift of the chosen objects, on top of the factorization's own shift"""
        return sum(self.summand(p, c).shift for p, c in enumerate(vertex))

    def _images(self, piece: int) -> Dict[str, object]:
        return {local: self.ring[edge] for local, edge in self.pieces[piece].marks.items()}

    def factorization(self, vertex: Vertex) -> KoszulFactorization:
        if vertex not in self._cache:
            rows: List[KoszulRow] = []
            shift = 0
            for p, choice in enumerate(vertex):
                mf = self.summand(p, choice).mf
                if not isinstance(mf, KoszulFactorization):
                    raise InvalidInputError(f"Piece {p} of {self.name} has a non-Koszul object")
                images = self._images(p)
                rows.extend(KoszulRow(self.ring.pull_back(r.left, images), self.ring.pull_back(r.right, images))
                            for r in mf.rows)
                shift += mf.shift
            self._cache[vertex] = KoszulFactorization(self.ring, self.spec, rows, shift,
                                                      f"{self.name}@{vertex}", {})
        return self._cache[vertex]

    def edges(self, vertex: Vertex) -> List[Edge]:
        """Differential components leaving a vertex with the sign (-1)^(degrees of the earlier pieces)"""
        found = []
        before = 0
        for p, (h, i) in enumerate(vertex):
            for (src, tgt), f in self.pieces[p].complex.maps.get(h, {}).items():
                if src != i:
                    continue
                target = vertex[:p] + ((h + 1, tgt),) + vertex[p + 1:]
                found.append(Edge(target, -1 if before % 2 else 1, p, f))
            before += h
        return found

    def apply(self, edge: Edge, source: Vertex, vector: Vector) -> Vector:
        """The local morphism of an edge acting on its piece's bits of a vertex vector"""
        src_mf = self.factorization(source)
        tgt_mf = self.factorization(edge.target)
        offset = sum(self.summand(p, c).mf.length for p, c in enumerate(source[:edge.piece]))
        width = edge.morphism.source.length
        pulled = self._pulled(edge.piece, edge.morphism)
        image: Vector = {}
        for index, coeff in vector.items():
            t = src_mf.label(index)
            local = edge.morphism.source.index(t[offset:offset + width])
            for j, entry in pulled.get(local, {}).items():
                u = edge.morphism.target.label(j)
                add_to(image, tgt_mf.index(t[:offset] + u + t[offset + width:]), edge.sign * entry * coeff)
        return image

    def _pulled(self, piece: int, f: MFMorphism) -> Matrix:
        key = (piece, id(f))
        if key not in self._matrices:
            images = self._images(piece)
            self._matrices[key] = {i: {j: self.ring.pull_back(e, images) for j, e in col.items()}
                                   for i, col in f.matrix.items()}
        return self._matrices[key]


def _natural(name: str) -> Tuple[str, int]:
    digits = "".join(ch for ch in name if ch.isdigit())
    return name.rstrip("0123456789"), int(digits) if digits else 0


def stack_closure(spec: PotentialSpec, complexes: Sequence[ComplexOfMF], name: str) -> ClosedNetwork:
    """Stack local complexes bottom to top and close the two strands"""
    count = len(complexes)
    pieces = []
    for i, c in enumerate(complexes):
        low, high = i, (i + 1) % count
        marks = {"x1": f"y{2 * high + 1}", "x2": f"y{2 * high + 2}",
                 "x3": f"y{2 * low + 1}", "x4": f"y{2 * low + 2}"}
        pieces.append(Piece(c, marks))
    return ClosedNetwork(spec, pieces, name)


def close_complex(complex_: ComplexOfMF, spec: Optional[PotentialSpec] = None, name: str = "") -> ClosedNetwork:
    """Closure of a single local complex: x1 is glued to x3 and x2 to x4"""
    return stack_closure(spec or complex_.spec, [complex_], name or f"closure({complex_.name})")


def close_braid(diagram: BraidDiagram, spec: PotentialSpec) -> ClosedNetwork:
    """Closure of b^word as one piece per crossing; this is T(2, word)"""
    crossing = crossing_complex(diagram.sign, spec)
    return stack_closure(spec, [crossing] * diagram.crossings, f"T(2,{diagram.word})")


def close_simplified(k: int, spec: PotentialSpec, tail: int = 0) -> ClosedNetwork:
    """Closure of B_k followed by |tail| crossings of the sign of tail; tail=±1 gives T(2, 2k±1)"""
    complexes = [b_complex(k, spec)]
    if tail:
        complexes.extend([crossing_complex(1 if tail > 0 else -1, spec)] * abs(tail))
    return stack_closure(spec, complexes, f"closure(B_{k}{'+' if tail > 0 else ''}{tail or ''})")


def close_cone(spec: PotentialSpec, tail: int = 0) -> ClosedNetwork:
    """Closure of the cone of m(x1 - x3) on a wide edge, optionally stacked with crossings"""
    complexes = [cone_of_x1_minus_x3(spec)]
    if tail:
        complexes.extend([crossing_complex(1 if tail > 0 else -1, spec)] * abs(tail))
    return stack_closure(spec, complexes, f"closure(cone{tail or ''})")


def graph_network(graph: KnottedMOYGraph, spec: PotentialSpec) -> ClosedNetwork:
    """One piece per vertex of a closed diagram; edge e becomes the variable e<e>"""
    graph.require_closed()
    pieces = []
    for v in graph.vertices:
        if v.kind == "W":
            local = wide_edge_complex(spec)
        else:
            local = crossing_complex(1 if v.kind == "X+" else -1, spec)
        pieces.append(Piece(local, dict(zip(STANDARD, v.marks()))))
    return ClosedNetwork(spec, pieces, graph.name or "graph")


@lru_cache(maxsize=None)
def unknot_network(spec: PotentialSpec) -> ClosedNetwork:
    """A single positive crossing closed up; Reidemeister I makes it the unknot"""
    return close_braid(BraidDiagram(word=1), spec)
