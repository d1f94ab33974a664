"""Sparse exact linear algebra over Q on top of sympy's DomainMatrix"""
import logging
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

SparseRows = Dict[int, Dict[int, object]]


def sparse_matrix(entries: SparseRows, shape: Tuple[int, int]) -> DomainMatrix:
    """Build a sparse DomainMatrix over QQ, dropping zero entries"""
    rows = {}
    for i, row in entries.items():
        clean = {j: QQ.convert(c) for j, c in row.items() if c}
        if clean:
            rows[i] = clean
    return DomainMatrix(rows, shape, QQ)


def rank(entries: SparseRows, shape: Tuple[int, int]) -> int:
    if shape[0] == 0 or shape[1] == 0:
        return 0
    return sparse_matrix(entries, shape).rank()


def determinant(entries: SparseRows, size: int):
    if size == 0:
        return QQ.one
    return sparse_matrix(entries, (size, size)).to_dense().det()


def rref(entries: SparseRows, shape: Tuple[int, int]) -> Tuple[SparseRows, Tuple[int, ...]]:
    reduced, pivots = sparse_matrix(entries, shape).rref()
    return reduced.to_sparse().to_dod(), tuple(pivots)


def nullspace(entries: SparseRows, shape: Tuple[int, int]) -> List[Dict[int, object]]:
    """Basis of {x : A x = 0} as sparse vectors, one per free column"""
    n_rows, n_cols = shape
    if n_rows == 0:
        return [{j: QQ.one} for j in range(n_cols)]
    reduced, pivots = rref(entries, shape)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vector = {free: QQ.one}
        for row_index, pivot in enumerate(pivots):
            c = reduced.get(row_index, {}).get(free)
            if c:
                vector[pivot] = -c
        basis.append(vector)
    return basis


def solve(entries: SparseRows, rhs: Dict[int, object], shape: Tuple[int, int]) -> Optional[Dict[int, object]]:
    """One solution of A x = rhs with free variables set to zero, or None"""
    n_rows, n_cols = shape
    augmented = {i: dict(row) for i, row in entries.items()}
    for i, c in rhs.items():
        if c:
            augmented.setdefault(i, {})[n_cols] = c
    if n_rows == 0:
        return {} if not any(rhs.values()) else None
    reduced, pivots = rref(augmented, (n_rows, n_cols + 1))
    if n_cols in pivots:
        return None
    solution = {}
    for row_index, pivot in enumerate(pivots):
        c = reduced.get(row_index, {}).get(n_cols)
        if c:
            solution[pivot] = c
    return solution


class LinearSystem:
    """Accumulates equations sum_k coeff_k * unknown_k = rhs keyed by hashable labels"""

    def __init__(self):
        self.unknowns: Dict[Hashable, int] = {}
        self.equations: Dict[Hashable, int] = {}
        self.rows: SparseRows = {}
        self.rhs: Dict[int, object] = {}

    def unknown(self, label: Hashable) -> int:
        if label not in self.unknowns:
            self.unknowns[label] = len(self.unknowns)
        return self.unknowns[label]

    def _equation(self, label: Hashable) -> int:
        if label not in self.equations:
            self.equations[label] = len(self.equations)
        return self.equations[label]

    def add(self, equation: Hashable, unknown: Hashable, coeff) -> None:
        if not coeff:
            return
        i, j = self._equation(equation), self.unknown(unknown)
        row = self.rows.setdefault(i, {})
        value = row.get(j, QQ.zero) + QQ.convert(coeff)
        if value:
            row[j] = value
        else:
            row.pop(j, None)

    def add_rhs(self, equation: Hashable, coeff) -> None:
        if not coeff:
            return
        i = self._equation(equation)
        self.rhs[i] = self.rhs.get(i, QQ.zero) + QQ.convert(coeff)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.equations), len(self.unknowns)

    def solve(self) -> Optional[Dict[Hashable, object]]:
        solution = solve(self.rows, self.rhs, self.shape)
        if solution is None:
            return None
        labels = {index: label for label, index in self.unknowns.items()}
        return {labels[j]: c for j, c in solution.items()}

    def nullspace(self) -> List[Dict[Hashable, object]]:
        labels = {index: label for label, index in self.unknowns.items()}
        return [{labels[j]: c for j, c in vector.items()} for vector in nullspace(self.rows, self.shape)]


def matmul(left: SparseRows, right: SparseRows) -> SparseRows:
    """Product of sparse dict-of-dict matrices (row -> col -> value)"""
    product: SparseRows = {}
    for i, row in left.items():
        acc: Dict[int, object] = {}
        for k, a in row.items():
            for j, b in right.get(k, {}).items():
                acc[j] = acc.get(j, QQ.zero) + a * b
        acc = {j: c for j, c in acc.items() if c}
        if acc:
            product[i] = acc
    return product
