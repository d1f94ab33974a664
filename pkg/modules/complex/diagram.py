"""2-braid words and knotted MOY graphs, with the line-oriented diagram text format"""
import logging
from pathlib import Path
from typing import Dict, List, Literal, Tuple

from pydantic import BaseModel, Field, ValidationError, field_validator

from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

VertexKind = Literal["X+", "X-", "W"]


class BraidDiagram(BaseModel):
    """The open braid b^word on two strands; bottom marks x3, x4 and top marks x1, x2"""
    word: int = Field(..., description="Signed power of the positive crossing generator")

    model_config = {"frozen": True}

    @field_validator("word")
    @classmethod
    def _nonzero(cls, value: int) -> int:
        if value == 0:
            raise ValueError("A braid diagram needs at least one crossing")
        return value

    @property
    def writhe(self) -> int:
        return self.word

    @property
    def crossings(self) -> int:
        return abs(self.word)

    @property
    def sign(self) -> int:
        return 1 if self.word > 0 else -1

    def level_marks(self, level: int) -> Tuple[str, str]:
        """Marks on the two strands between crossing level-1 and crossing level"""
        if level == 0:
            return "x3", "x4"
        if level == self.crossings:
            return "x1", "x2"
        return f"x{2 * level + 3}", f"x{2 * level + 4}"

    def crossing_marks(self, i: int) -> Tuple[str, str, str, str]:
        """(out1, out2, in1, in2) of the i-th crossing counted from the bottom"""
        return self.level_marks(i + 1) + self.level_marks(i)

    @property
    def interior_marks(self) -> List[str]:
        return [m for level in range(1, self.crossings) for m in self.level_marks(level)]


class Vertex(BaseModel):
    kind: VertexKind = Field(..., description="Positive crossing, negative crossing or wide edge")
    edges: Tuple[int, int, int, int] = Field(..., description="Edge ids (a, b) entering and (c, d) leaving")

    model_config = {"frozen": True}

    @property
    def inputs(self) -> Tuple[int, int]:
        return self.edges[0], self.edges[1]

    @property
    def outputs(self) -> Tuple[int, int]:
        return self.edges[2], self.edges[3]

    def marks(self) -> Tuple[str, str, str, str]:
        """Edge variables in the local order x1, x2, x3, x4 = c, d, a, b"""
        a, b, c, d = self.edges
        return edge_name(c), edge_name(d), edge_name(a), edge_name(b)


def edge_name(edge: int) -> str:
    return f"e{edge}"


class KnottedMOYGraph(BaseModel):
    """Crossings and wide edges glued along integer-labelled thin edges"""
    vertices: List[Vertex] = Field(default_factory=list)
    name: str = Field("", description="Free-form label used in logs and records")

    @property
    def edges(self) -> List[int]:
        return sorted({e for v in self.vertices for e in v.edges})

    @property
    def positive_crossings(self) -> int:
        return sum(1 for v in self.vertices if v.kind == "X+")

    @property
    def negative_crossings(self) -> int:
        return sum(1 for v in self.vertices if v.kind == "X-")

    @property
    def wide_edges(self) -> int:
        return sum(1 for v in self.vertices if v.kind == "W")

    def _endpoint_counts(self) -> Tuple[Dict[int, int], Dict[int, int]]:
        heads: Dict[int, int] = {}
        tails: Dict[int, int] = {}
        for v in self.vertices:
            for e in v.inputs:
                heads[e] = heads.get(e, 0) + 1
            for e in v.outputs:
                tails[e] = tails.get(e, 0) + 1
        return heads, tails

    @property
    def open_edges(self) -> List[int]:
        heads, tails = self._endpoint_counts()
        return [e for e in self.edges if heads.get(e, 0) != 1 or tails.get(e, 0) != 1]

    @property
    def is_closed(self) -> bool:
        return bool(self.vertices) and not self.open_edges

    def require_closed(self) -> None:
        heads, tails = self._endpoint_counts()
        for e in self.edges:
            if heads.get(e, 0) > 1 or tails.get(e, 0) > 1:
                raise InvalidInputError(f"Edge {e} is oriented inconsistently: it enters or leaves two vertices")
        if not self.is_closed:
            raise InvalidInputError(f"Graph {self.name or ''} is not closed; open edges {self.open_edges}")

    def components(self) -> int:
        """Number of link components, following strands through crossings (a -> d, b -> c)"""
        if self.wide_edges:
            raise InvalidInputError("Components are only defined for crossings-only diagrams")
        parent = {e: e for e in self.edges}

        def find(e: int) -> int:
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for v in self.vertices:
            a, b, c, d = v.edges
            for x, y in ((a, d), (b, c)):
                parent[find(x)] = find(y)
        return len({find(e) for e in self.edges})

    def with_vertex(self, index: int, kind: VertexKind) -> "KnottedMOYGraph":
        """Copy with one vertex replaced by another kind on the same edges"""
        vertices = list(self.vertices)
        vertices[index] = Vertex(kind=kind, edges=vertices[index].edges)
        return KnottedMOYGraph(vertices=vertices, name=f"{self.name}[{index}:{kind}]")

    def to_text(self) -> str:
        return "\n".join(f"{v.kind} " + " ".join(str(e) for e in v.edges) for v in self.vertices) + "\n"


def parse_diagram(text: str, name: str = "") -> KnottedMOYGraph:
    """One vertex per line: `X+ a b c d`, `X- a b c d` or `W a b c d`; `#` starts a comment"""
    vertices = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise InvalidInputError(f"Line {number}: expected a kind and four edge ids, got {line!r}")
        try:
            edges = tuple(int(p) for p in parts[1:])
            vertices.append(Vertex(kind=parts[0], edges=edges))
        except (ValueError, ValidationError) as e:
            raise InvalidInputError(f"Line {number}: {e}")
    if not vertices:
        raise InvalidInputError("Diagram contains no vertices")
    graph = KnottedMOYGraph(vertices=vertices, name=name)
    logger.debug(f"Parsed diagram {name or '<text>'} with {len(vertices)} vertices")
    return graph


def load_diagram(path) -> KnottedMOYGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InvalidInputError(f"Cannot read diagram file {path}: {e}")
    return parse_diagram(text, path.stem)


def torus_diagram(n: int) -> KnottedMOYGraph:
    """Closure of b^n as a crossings-only diagram; the strand on edge b leaves on edge c"""
    if n == 0:
        raise InvalidInputError("T(2,0) has no crossings; use the two-component unlink instead")
    kind = "X+" if n > 0 else "X-"
    count = abs(n)

    def edge(level: int, strand: int) -> int:
        return 2 * (level % count) + strand + 1

    vertices = [Vertex(kind=kind, edges=(edge(i, 0), edge(i, 1), edge(i + 1, 0), edge(i + 1, 1)))
                for i in range(count)]
    return KnottedMOYGraph(vertices=vertices, name=f"T(2,{n})")
