"""Complexes of graded-free F[a]-modules whose differential entries are single monomials c * a^m"""
import logging
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from sympy import QQ

from modules.ring.linalg import rank
from modules.utils.errors import InvalidInputError, StructuralError, VerificationError

logger = logging.getLogger(__name__)

Block = Dict[Tuple[int, int], object]


class FreeGenerator(NamedTuple):
    q: int
    label: str


class GradedFreeComplexOverA:
    """Generators per homological degree with q-degrees; d[h][(i, j)] = c means d(e_i) has c * a^m on e_j

    The exponent m is never stored: it is (q_i - q_j) / (2N), forced by the grading.
    """

    def __init__(self, n: int, name: str = ""):
        self.n = n
        self.name = name
        self.generators: Dict[int, List[FreeGenerator]] = {}
        self.differential: Dict[int, Block] = {}

    def __repr__(self) -> str:
        sizes = {h: len(g) for h, g in sorted(self.generators.items())}
        return f"GradedFreeComplexOverA({self.name or 'unnamed'}, N={self.n}, ranks={sizes})"

    @property
    def degrees(self) -> List[int]:
        return sorted(h for h, g in self.generators.items() if g)

    def add_generator(self, h: int, q: int, label: str = "") -> int:
        gens = self.generators.setdefault(h, [])
        gens.append(FreeGenerator(q, label or f"g{h}.{len(gens)}"))
        return len(gens) - 1

    def q(self, h: int, i: int) -> int:
        return self.generators[h][i].q

    def rank(self, h: int) -> int:
        return len(self.generators.get(h, []))

    def total_rank(self) -> int:
        return sum(len(g) for g in self.generators.values())

    def exponent(self, h: int, i: int, j: int) -> Optional[int]:
        """Power of a carried by an entry from generator i in degree h to generator j in degree h+1"""
        gap = self.q(h, i) - self.q(h + 1, j)
        if gap < 0 or gap % (2 * self.n):
            return None
        return gap // (2 * self.n)

    def set_entry(self, h: int, i: int, j: int, coeff, a_power: Optional[int] = None) -> None:
        coeff = QQ.convert(coeff)
        if not coeff:
            self.differential.get(h, {}).pop((i, j), None)
            return
        m = self.exponent(h, i, j)
        if m is None:
            raise StructuralError(f"Entry {h}:{i}->{j} of {self.name} joins q-degrees {self.q(h, i)} and "
                                  f"{self.q(h + 1, j)}, which no power of a connects")
        if a_power is not None and a_power != m:
            raise StructuralError(f"Entry {h}:{i}->{j} of {self.name} carries a^{a_power}, grading forces a^{m}")
        self.differential.setdefault(h, {})[(i, j)] = coeff

    def entries(self) -> Iterator[Tuple[int, int, int, object]]:
        for h in sorted(self.differential):
            for (i, j), c in sorted(self.differential[h].items()):
                yield h, i, j, c

    def check(self) -> None:
        """Raise unless every entry is graded and d o d = 0"""
        for h, i, j, _ in self.entries():
            if self.exponent(h, i, j) is None:
                raise StructuralError(f"Entry {h}:{i}->{j} of {self.name} is not homogeneous")
        for h in self.differential:
            later = self.differential.get(h + 1, {})
            if not later:
                continue
            square: Dict[Tuple[int, int], object] = {}
            for (i, j), c in self.differential[h].items():
                for (j2, k), c2 in later.items():
                    if j2 == j:
                        square[(i, k)] = square.get((i, k), QQ.zero) + c * c2
            bad = [key for key, value in square.items() if value]
            if bad:
                raise VerificationError(f"d o d != 0 in {self.name} at degree {h}, entries {bad[:4]}")

    def shifted(self, q: int = 0, h: int = 0, name: str = "") -> "GradedFreeComplexOverA":
        result = GradedFreeComplexOverA(self.n, name or self.name)
        result.generators = {d + h: [FreeGenerator(g.q + q, g.label) for g in gens]
                             for d, gens in self.generators.items()}
        result.differential = {d + h: dict(block) for d, block in self.differential.items()}
        return result

    def specialize(self, value: int) -> Dict[int, Block]:
        """Differential over F at a = value; at a = 0 only the a-free entries survive"""
        blocks: Dict[int, Block] = {}
        for h, i, j, c in self.entries():
            m = self.exponent(h, i, j)
            if value == 0 and m:
                continue
            blocks.setdefault(h, {})[(i, j)] = c * QQ.convert(value) ** m if m else c
        return blocks

    def _rank(self, block: Block, rows: List[int], cols: List[int]) -> int:
        """Rank of the part of a block with sources in rows and targets in cols"""
        if not rows or not cols:
            return 0
        row_index = {i: r for r, i in enumerate(rows)}
        col_index = {j: c for c, j in enumerate(cols)}
        entries: Dict[int, Dict[int, object]] = {}
        for (i, j), c in block.items():
            if i in row_index and j in col_index:
                entries.setdefault(row_index[i], {})[col_index[j]] = c
        return rank(entries, (len(rows), len(cols)))

    def dims_at_zero(self) -> Dict[Tuple[int, int], int]:
        """Graded dimensions over F of the homology at a = 0, computed one q-degree at a time"""
        blocks = self.specialize(0)
        dims: Dict[Tuple[int, int], int] = {}
        for h in self.degrees:
            by_q: Dict[int, List[int]] = {}
            for i, g in enumerate(self.generators[h]):
                by_q.setdefault(g.q, []).append(i)
            for q, here in by_q.items():
                after = [j for j, g in enumerate(self.generators.get(h + 1, [])) if g.q == q]
                before = [j for j, g in enumerate(self.generators.get(h - 1, [])) if g.q == q]
                dim = (len(here) - self._rank(blocks.get(h, {}), here, after)
                       - self._rank(blocks.get(h - 1, {}), before, here))
                if dim:
                    dims[(h, q)] = dim
        return dims

    def dims_at_one(self) -> Dict[int, int]:
        """Dimensions over F of the ungraded homology at a = 1"""
        blocks = self.specialize(1)
        dims = {}
        for h in self.degrees:
            here = list(range(self.rank(h)))
            dim = (len(here) - self._rank(blocks.get(h, {}), here, list(range(self.rank(h + 1))))
                   - self._rank(blocks.get(h - 1, {}), list(range(self.rank(h - 1))), here))
            if dim:
                dims[h] = dim
        return dims

    def euler_characteristic(self) -> Dict[int, int]:
        """q-degree -> sum over h of (-1)^h times the number of generators"""
        chi: Dict[int, int] = {}
        for h, gens in self.generators.items():
            for g in gens:
                chi[g.q] = chi.get(g.q, 0) + (-1 if h % 2 else 1)
        return {q: c for q, c in chi.items() if c}

    def copy(self) -> "GradedFreeComplexOverA":
        return self.shifted()


def from_blocks(n: int, generators: Dict[int, List[int]], blocks: Dict[int, Block],
                name: str = "") -> GradedFreeComplexOverA:
    """Build and validate a complex from q-degree lists and coefficient blocks"""
    if n < 1:
        raise InvalidInputError(f"N must be positive, got {n}")
    result = GradedFreeComplexOverA(n, name)
    for h, qs in sorted(generators.items()):
        for q in qs:
            result.add_generator(h, q)
    for h, block in blocks.items():
        for (i, j), c in block.items():
            result.set_entry(h, i, j, c)
    result.check()
    return result
