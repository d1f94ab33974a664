"""Seeded random graded-free complexes over F[a] with a known elementary decomposition"""
import logging
from typing import Dict, List, Tuple

import numpy as np
from sympy import QQ

from modules.structure.decompose import ElementaryPiece, compose_blocks
from modules.structure.graded_complex import Block, GradedFreeComplexOverA

logger = logging.getLogger(__name__)


def _unipotent(qs: List[int], n: int, rng: np.random.Generator, density: float) -> Block:
    """Identity plus random graded entries i -> j with (q_i, i) > (q_j, j)"""
    block: Block = {(i, i): QQ.one for i in range(len(qs))}
    for i, qi in enumerate(qs):
        for j, qj in enumerate(qs):
            gap = qi - qj
            if (qi, i) <= (qj, j) or gap % (2 * n):
                continue
            if rng.random() < density:
                c = int(rng.integers(-3, 4))
                if c:
                    block[(i, j)] = QQ(c)
    return block


def _inverse_unipotent(block: Block, size: int) -> Block:
    """(1 + X)^-1 = 1 - X + X^2 - ... for nilpotent X"""
    nil = {key: c for key, c in block.items() if key[0] != key[1]}
    result: Block = {(i, i): QQ.one for i in range(size)}
    term: Block = {(i, i): QQ.one for i in range(size)}
    sign = -1
    while True:
        term = compose_blocks(term, nil)
        if not term:
            break
        for key, c in term.items():
            value = result.get(key, QQ.zero) + sign * c
            if value:
                result[key] = value
            else:
                result.pop(key, None)
        sign = -sign
    return result


def random_elementary_pieces(rng: np.random.Generator, n: int, degrees: Tuple[int, int] = (-1, 1),
                             count: int = 6, max_k: int = 2) -> List[ElementaryPiece]:
    low, high = degrees
    pieces = []
    for _ in range(count):
        h = int(rng.integers(low, high + 1))
        q = 2 * int(rng.integers(-4, 5))
        if h < high and rng.random() < 0.6:
            k = int(rng.integers(0, max_k + 1))
            pieces.append(ElementaryPiece(kind="cancel", h=h, q=q, target_q=q - 2 * n * k, k=k))
        else:
            pieces.append(ElementaryPiece(kind="free", h=h, q=q))
    return pieces


def assemble(pieces: List[ElementaryPiece], n: int, rng: np.random.Generator, density: float = 0.5,
             name: str = "random") -> GradedFreeComplexOverA:
    """Direct sum of the pieces, generators shuffled, conjugated by graded unipotent changes of basis"""
    slots: Dict[int, List[Tuple[int, int, int]]] = {}
    for index, p in enumerate(pieces):
        slots.setdefault(p.h, []).append((p.q, index, 0))
        if p.kind == "cancel":
            slots.setdefault(p.h + 1, []).append((p.target_q, index, 1))
    position: Dict[Tuple[int, int], int] = {}
    qs: Dict[int, List[int]] = {}
    for h, entries in slots.items():
        qs[h] = []
        for shuffled in rng.permutation(len(entries)):
            q, piece, end = entries[int(shuffled)]
            position[(piece, end)] = len(qs[h])
            qs[h].append(q)
    base: Dict[int, Block] = {}
    for piece, p in enumerate(pieces):
        if p.kind == "cancel":
            base.setdefault(p.h, {})[(position[(piece, 0)], position[(piece, 1)])] = QQ.one
    changes = {h: _unipotent(q_list, n, rng, density) for h, q_list in qs.items()}
    result = GradedFreeComplexOverA(n, name)
    for h in sorted(qs):
        for q in qs[h]:
            result.add_generator(h, q)
    for h, block in base.items():
        inverse = _inverse_unipotent(changes[h], len(qs[h]))
        conjugated = compose_blocks(compose_blocks(inverse, block), changes.get(h + 1, {}))
        for (i, j), c in conjugated.items():
            result.set_entry(h, i, j, c)
    result.check()
    logger.debug(f"Assembled {name}: {result!r}")
    return result


def random_complex(seed: int, n: int = 2, count: int = 6) -> Tuple[GradedFreeComplexOverA, List[ElementaryPiece]]:
    rng = np.random.default_rng(seed)
    pieces = random_elementary_pieces(rng, n, count=count)
    return assemble(pieces, n, rng, name=f"random[{seed}]"), pieces
