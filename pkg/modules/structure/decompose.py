"""Splitting a graded-free complex over F[a] into elementary pieces, and the free/torsion read-off"""
import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy import QQ

from modules.ring.linalg import determinant
from modules.structure.graded_complex import Block, GradedFreeComplexOverA
from modules.utils.errors import StructuralError, VerificationError

logger = logging.getLogger(__name__)


class ElementaryPiece(BaseModel):
    """0 -> F[a]{q} -> 0 (free) or 0 -> F[a]{q} --a^k--> F[a]{target_q} -> 0 (cancel, k >= 0)"""
    kind: Literal["free", "cancel"] = Field(..., description="Type (1) free piece or type (2) two-term piece")
    h: int = Field(..., description="Homological degree of the (first) generator")
    q: int = Field(..., description="q-degree of the (first) generator")
    target_q: Optional[int] = Field(None, description="q-degree of the second generator, in degree h+1")
    k: int = Field(0, ge=0, description="Power of a on the two-term piece")

    model_config = {"frozen": True}


class GradedModuleOverA(BaseModel):
    """Finitely generated graded F[a]-module: free part plus torsion F[a]/(a^k){q}"""
    free: List[int] = Field(default_factory=list, description="q-degrees of the free summands")
    torsion: List[Tuple[int, int]] = Field(default_factory=list, description="(q-degree, k) of each F[a]/(a^k)")

    @field_validator("torsion")
    @classmethod
    def _positive(cls, value: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        for q, k in value:
            if k < 1:
                raise ValueError(f"Torsion exponent must be at least 1, got {k} at q^{q}")
        return sorted(value)

    @field_validator("free")
    @classmethod
    def _sorted(cls, value: List[int]) -> List[int]:
        return sorted(value, reverse=True)

    @property
    def free_rank(self) -> int:
        return len(self.free)


def compose_blocks(first: Block, second: Block) -> Block:
    """second o first for maps stored as {(source, target): coefficient}"""
    by_source: Dict[int, List[Tuple[int, object]]] = {}
    for (j, k), c in second.items():
        by_source.setdefault(j, []).append((k, c))
    result: Block = {}
    for (i, j), c in first.items():
        for k, c2 in by_source.get(j, []):
            result[(i, k)] = result.get((i, k), QQ.zero) + c * c2
    return {key: value for key, value in result.items() if value}


class Decomposition:
    """Elementary pieces plus the change of basis that exhibits them

    basis[h][(new, old)] is the coefficient of old generator e_old in the new
    generator; its power of a is fixed by the q-degrees.
    """

    def __init__(self, source: GradedFreeComplexOverA, pieces: List[ElementaryPiece],
                 basis: Dict[int, Block], reduced: Dict[int, Block]):
        self.source = source
        self.pieces = pieces
        self.basis = basis
        self.reduced = reduced

    def of_kind(self, kind: str) -> List[ElementaryPiece]:
        return [p for p in self.pieces if p.kind == kind]

    def check(self) -> None:
        """Raise VerificationError unless d_old o B = B o d_new with every B graded and invertible"""
        src = self.source
        for h in src.degrees:
            basis = self.basis.get(h, {})
            for (new, old), _ in basis.items():
                gap = src.q(h, new) - src.q(h, old)
                if gap < 0 or gap % (2 * src.n):
                    raise VerificationError(f"Change of basis in degree {h} is not graded at {new}<-{old}")
            if not determinant(_rows(basis), src.rank(h)):
                raise VerificationError(f"Change of basis in degree {h} is singular")
            left = compose_blocks(basis, src.differential.get(h, {}))
            right = compose_blocks(self.reduced.get(h, {}), self.basis.get(h + 1, {}))
            if left != right:
                raise VerificationError(f"Change of basis does not intertwine the differentials in degree {h}")


def _rows(block: Block) -> Dict[int, Dict[int, object]]:
    rows: Dict[int, Dict[int, object]] = {}
    for (new, old), c in block.items():
        rows.setdefault(new, {})[old] = c
    return rows


class _Eliminator:
    """In-place graded Smith reduction; the complex keeps its generator list, only bases move"""

    def __init__(self, complex_: GradedFreeComplexOverA):
        self.complex = complex_
        self.d: Dict[int, Block] = {h: dict(block) for h, block in complex_.differential.items()}
        self.basis: Dict[int, Block] = {h: {(i, i): QQ.one for i in range(complex_.rank(h))}
                                        for h in complex_.degrees}
        self.done: Dict[int, set] = {h: set() for h in complex_.degrees}

    def pivot(self) -> Optional[Tuple[int, int, int, int]]:
        best = None
        for h, block in self.d.items():
            for (i, j), c in block.items():
                if not c:
                    continue
                key = (self.complex.exponent(h, i, j), h, i, j)
                if best is None or key < best:
                    best = key
        return best

    def _add_new(self, h: int, target: int, source: int, factor) -> None:
        """new_target += factor * new_source in the basis of degree h"""
        block = self.basis.setdefault(h, {})
        for (new, old), c in list(block.items()):
            if new == source:
                value = block.get((target, old), QQ.zero) + factor * c
                if value:
                    block[(target, old)] = value
                else:
                    block.pop((target, old), None)

    def _add(self, block: Block, key: Tuple[int, int], value) -> None:
        total = block.get(key, QQ.zero) + value
        if total:
            block[key] = total
        else:
            block.pop(key, None)

    def eliminate(self, h: int, i: int, j: int) -> int:
        d = self.d.setdefault(h, {})
        c = d[(i, j)]
        # f_j = e_j + sum lambda_j' e_j' absorbs the rest of d(e_i)
        lambdas = {j2: x / c for (i2, j2), x in d.items() if i2 == i and j2 != j}
        for j2, lam in lambdas.items():
            self._add_new(h + 1, j, j2, lam)
            for (i2, j3), x in list(d.items()):
                if j3 == j:
                    self._add(d, (i2, j2), -x * lam)
            after = self.d.setdefault(h + 1, {})
            for (j4, k), y in list(after.items()):
                if j4 == j2:
                    self._add(after, (j, k), lam * y)
        # g_i' = e_i' - mu e_i removes the j component of every other source
        mus = {i2: x / c for (i2, j2), x in d.items() if j2 == j and i2 != i}
        for i2, mu in mus.items():
            self._add_new(h, i2, i, -mu)
            for (i3, j3), x in list(d.items()):
                if i3 == i:
                    self._add(d, (i2, j3), -mu * x)
            before = self.d.setdefault(h - 1, {})
            for (s, k), y in list(before.items()):
                if k == i2:
                    self._add(before, (s, i), mu * y)
        # rescale f_j so the pivot becomes a^m
        block = self.basis.setdefault(h + 1, {})
        for key in [key for key in block if key[0] == j]:
            block[key] = block[key] * c
        for (i2, j2) in list(d):
            if j2 == j:
                d[(i2, j2)] = d[(i2, j2)] / c
        after = self.d.get(h + 1, {})
        for (j4, k) in list(after):
            if j4 == j:
                after[(j4, k)] = after[(j4, k)] * c
        stray = [key for key in d if (key[0] == i) != (key[1] == j)]
        stray += [key for key in self.d.get(h - 1, {}) if key[1] == i]
        stray += [key for key in self.d.get(h + 1, {}) if key[0] == j]
        if stray:
            raise StructuralError(f"Pivot {h}:{i}->{j} of {self.complex.name} did not split off: {stray[:4]}")
        del d[(i, j)]
        self.done.setdefault(h, set()).add(i)
        self.done.setdefault(h + 1, set()).add(j)
        return self.complex.exponent(h, i, j)


def decompose(complex_: GradedFreeComplexOverA, verify: bool = True) -> Decomposition:
    """Elementary pieces of a graded-free complex, minimal powers of a first; a^0 pieces are contractible"""
    complex_.check()
    work = _Eliminator(complex_)
    pieces: List[ElementaryPiece] = []
    reduced: Dict[int, Block] = {}
    while True:
        found = work.pivot()
        if found is None:
            break
        m, h, i, j = found
        k = work.eliminate(h, i, j)
        pieces.append(ElementaryPiece(kind="cancel", h=h, q=complex_.q(h, i), target_q=complex_.q(h + 1, j), k=k))
        reduced.setdefault(h, {})[(i, j)] = QQ.one
        logger.debug(f"Split off {complex_.q(h, i)}@{h} --a^{k}--> {complex_.q(h + 1, j)}@{h + 1}")
    for h in complex_.degrees:
        for i in range(complex_.rank(h)):
            if i not in work.done.get(h, set()):
                pieces.append(ElementaryPiece(kind="free", h=h, q=complex_.q(h, i)))
    result = Decomposition(complex_, pieces, work.basis, reduced)
    if verify:
        result.check()
    logger.info(f"Decomposed {complex_.name or 'complex'}: {len(result.of_kind('free'))} free, "
                f"{len(result.of_kind('cancel'))} two-term pieces")
    return result


def homology_over_A(complex_: GradedFreeComplexOverA,
                    decomposition: Optional[Decomposition] = None) -> Dict[int, GradedModuleOverA]:
    """Free pieces give free summands, a^k pieces give F[a]/(a^k) at their second generator"""
    decomposition = decomposition or decompose(complex_)
    free: Dict[int, List[int]] = {}
    torsion: Dict[int, List[Tuple[int, int]]] = {}
    for p in decomposition.pieces:
        if p.kind == "free":
            free.setdefault(p.h, []).append(p.q)
        elif p.k > 0:
            torsion.setdefault(p.h + 1, []).append((p.target_q, p.k))
    return {h: GradedModuleOverA(free=free.get(h, []), torsion=torsion.get(h, []))
            for h in sorted(set(free) | set(torsion))}


def extract_s_N(module: GradedModuleOverA, n: int) -> int:
    """s with free q-degrees exactly {N + 1 - 2l + s : l = 1..N}"""
    degrees = sorted(module.free, reverse=True)
    if len(degrees) != n:
        raise StructuralError(f"Free part of degree-0 homology has rank {len(degrees)}, expected N={n}")
    s = degrees[0] - (n - 1)
    expected = [n + 1 - 2 * l + s for l in range(1, n + 1)]
    if degrees != expected:
        raise StructuralError(f"Free q-degrees {degrees} are not a ladder of step 2 around s={s}")
    return s
