"""Gornik states: root-of-unity edge colourings that index a basis of the deformed homology"""
import logging
from typing import Dict, Hashable, List, NamedTuple, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field

from modules.complex.closure import ClosedNetwork, Vertex as NetworkVertex, close_braid
from modules.complex.diagram import BraidDiagram, KnottedMOYGraph, edge_name, torus_diagram
from modules.homology.engine import NetworkHomology
from modules.homology.poincare import complex_homology
from modules.mf.factorization import KoszulFactorization
from modules.ring.field import CyclotomicField, CyclotomicNumber, evaluate_polynomial
from modules.ring.polynomial import A_NAME
from modules.ring.potential import Variant, make_spec
from modules.utils.errors import InvalidInputError, VerificationError

logger = logging.getLogger(__name__)


class Same(NamedTuple):
    first: Hashable
    second: Hashable


class Wide(NamedTuple):
    out1: Hashable
    out2: Hashable
    in1: Hashable
    in2: Hashable


Constraint = Union[Same, Wide]


class GornikState(BaseModel):
    """Edge -> exponent k in Z/N, standing for zeta^k"""
    values: Dict[str, int] = Field(default_factory=dict)

    model_config = {"frozen": True}

    def __getitem__(self, edge: str) -> int:
        return self.values[edge]


def graph_constraints(graph: KnottedMOYGraph) -> Tuple[List[str], List[Constraint]]:
    """Strands keep their colour through crossings (a -> d, b -> c); wide edges permute two distinct colours"""
    graph.require_closed()
    constraints: List[Constraint] = []
    for v in graph.vertices:
        a, b, c, d = (edge_name(e) for e in v.edges)
        if v.kind == "W":
            constraints.append(Wide(c, d, a, b))
        else:
            constraints.extend([Same(a, d), Same(b, c)])
    return [edge_name(e) for e in graph.edges], constraints


def _resolution_kind(mf) -> str:
    if isinstance(mf, KoszulFactorization) and mf.length == 1:
        return "arc"
    return "wide" if mf.name.startswith("wide") else "arcs"


def resolution_constraints(network: ClosedNetwork, vertex: NetworkVertex) -> Tuple[List[str], List[Constraint]]:
    """The MOY graph of one resolution: arcs join x1 to x3 and x2 to x4, wide edges stay wide"""
    constraints: List[Constraint] = []
    for p, choice in enumerate(vertex):
        marks = network.pieces[p].marks
        kind = _resolution_kind(network.summand(p, choice).mf)
        if kind == "wide":
            constraints.append(Wide(marks["x1"], marks["x2"], marks["x3"], marks["x4"]))
        elif kind == "arcs":
            constraints.extend([Same(marks["x1"], marks["x3"]), Same(marks["x2"], marks["x4"])])
        else:
            constraints.append(Same(marks["x1"], marks["x3"]))
    return list(network.variables), constraints


def _classes(edges: Sequence[Hashable], constraints: Sequence[Constraint]) -> Dict[Hashable, Hashable]:
    parent = {e: e for e in edges}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for c in constraints:
        if isinstance(c, Same):
            parent[find(c.first)] = find(c.second)
    return {e: find(e) for e in edges}


def solve_constraints(edges: Sequence[Hashable], constraints: Sequence[Constraint], n: int) -> List[GornikState]:
    """All colourings by Z/N, by backtracking over equality classes, most constrained first"""
    root = _classes(edges, constraints)
    wides = [Wide(*(root[e] for e in c)) for c in constraints if isinstance(c, Wide)]
    classes = sorted(set(root.values()), key=str)
    weight = {k: sum(1 for w in wides for e in w if e == k) for k in classes}
    order = sorted(classes, key=lambda k: (-weight[k], str(k)))
    touching = {k: [w for w in wides if k in w] for k in classes}
    found: List[Dict[Hashable, int]] = []
    colour: Dict[Hashable, int] = {}

    def consistent(k) -> bool:
        for w in touching[k]:
            if all(e in colour for e in (w.out1, w.out2)) and colour[w.out1] == colour[w.out2]:
                return False
            if all(e in colour for e in (w.in1, w.in2)) and colour[w.in1] == colour[w.in2]:
                return False
            if all(e in colour for e in w):
                if sorted((colour[w.out1], colour[w.out2])) != sorted((colour[w.in1], colour[w.in2])):
                    return False
        return True

    def extend(position: int) -> None:
        if position == len(order):
            found.append(dict(colour))
            return
        k = order[position]
        for value in range(n):
            colour[k] = value
            if consistent(k):
                extend(position + 1)
            del colour[k]

    extend(0)
    return [GornikState(values={str(e): c[root[e]] for e in edges}) for c in found]


def enumerate_states(graph: KnottedMOYGraph, n: int) -> List[GornikState]:
    if n < 2:
        raise InvalidInputError(f"N must be at least 2, got {n}")
    edges, constraints = graph_constraints(graph)
    states = solve_constraints(edges, constraints, n)
    logger.debug(f"{graph.name or 'graph'}: {len(states)} Gornik states for N={n}")
    return states


def deformed_dimension(graph: KnottedMOYGraph, n: int) -> int:
    return len(enumerate_states(graph, n))


def multiplication_action(state: GornikState, edge: Union[int, str], n: int) -> CyclotomicNumber:
    """Eigenvalue zeta^phi(e) of multiplication by the mark on edge e"""
    key = edge_name(edge) if isinstance(edge, int) else edge
    return CyclotomicField(n).zeta(state[key])


def is_multiplication_invertible(graph: KnottedMOYGraph, n: int, edge: Union[int, str],
                                 other: Union[int, str]) -> bool:
    """m(x_e - x_e') is invertible iff phi(e) != phi(e') in every state"""
    first = edge_name(edge) if isinstance(edge, int) else edge
    second = edge_name(other) if isinstance(other, int) else other
    return all(s[first] != s[second] for s in enumerate_states(graph, n))


def cone_vanishing_certificate(graph: KnottedMOYGraph, n: int, wide_index: Optional[int] = None) -> bool:
    """True when m(x1 - x3) at the chosen wide edge is invertible, so the cone of it is acyclic"""
    wide = [i for i, v in enumerate(graph.vertices) if v.kind == "W"]
    if wide_index is None:
        if len(wide) != 1:
            raise InvalidInputError("Pick the wide edge: the graph has " + str(len(wide)) + " of them")
        wide_index = wide[0]
    elif wide_index not in wide:
        raise InvalidInputError(f"Vertex {wide_index} is not a wide edge")
    a, _, c, _ = graph.vertices[wide_index].edges
    certified = is_multiplication_invertible(graph, n, c, a)
    logger.info(f"Cone of x1 - x3 on {graph.name or 'graph'} for N={n}: "
                f"{'acyclic' if certified else 'not certified'}")
    return certified


class ResolutionCheck(BaseModel):
    vertex: str
    states: int
    rank: int
    zeros: bool


def eigenvalue_consistency(network: ClosedNetwork) -> List[ResolutionCheck]:
    """Every state of every resolution is a common zero of its quotient relations at a = N+1

    At a = N+1 the derivative of x^(N+1) - a x is (N+1)(x^N - 1), so the
    marks take values among the Nth roots of unity.
    """
    n = network.spec.n
    field = CyclotomicField(n)
    engine = NetworkHomology(network)
    ring = network.ring
    checks = []
    for vertex in network.vertices():
        vh = engine.vertex(vertex)
        edges, constraints = resolution_constraints(network, vertex)
        states = solve_constraints(edges, constraints, n)
        zeros = True
        for state in states:
            values = {ring.index(name): field.zeta(k) for name, k in state.values.items()}
            if ring.with_a:
                values[ring.index(A_NAME)] = field(n + 1)
            if any(not evaluate_polynomial(b, values, field).is_zero for b in vh.b):
                zeros = False
                break
        check = ResolutionCheck(vertex=str(vertex), states=len(states), rank=vh.rank, zeros=zeros)
        if not zeros or check.states != check.rank:
            raise VerificationError(f"Resolution {vertex} of {network.name}: {check.states} states, rank "
                                    f"{check.rank}, states are common zeros: {zeros}")
        checks.append(check)
    return checks


class OracleCheck(BaseModel):
    name: str
    n: int
    states: int
    engine: int

    @property
    def holds(self) -> bool:
        return self.states == self.engine


def compare_with_engine(word: int, n: int) -> OracleCheck:
    """Number of states of T(2, word) against the deformed homology the engine computes"""
    graph = torus_diagram(word)
    states = deformed_dimension(graph, n)
    network = close_braid(BraidDiagram(word=word), make_spec(n, Variant.EQUIVARIANT))
    engine = complex_homology(network, Variant.DEFORMED).dims.total
    check = OracleCheck(name=graph.name, n=n, states=states, engine=engine)
    if not check.holds:
        logger.warning(f"{graph.name}, N={n}: {states} Gornik states but deformed homology of rank {engine}")
    return check
