"""One check per `verify` subcommand; each returns whether it held and what it certified"""
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

from modules.complex.closure import close_braid
from modules.complex.diagram import BraidDiagram
from modules.gornik.states import compare_with_engine, eigenvalue_consistency
from modules.homology.closed_graphs import verify_stated_basis
from modules.homology.twists import compare_twist_closures
from modules.mf.moy import verify_moy_package, verify_saddle_compositions
from modules.rasmussen.invariants import s_N_torus
from modules.rasmussen.les import verify_les
from modules.rasmussen.recursion import s_N_torus_recursion
from modules.ring.potential import Variant, make_spec
from modules.structure.decompose import decompose
from modules.structure.random_complex import random_complex

logger = logging.getLogger(__name__)


class Outcome(NamedTuple):
    holds: bool
    certificates: List[str]


def _pick(value: Optional[int], default: Sequence[int]) -> List[int]:
    return [value] if value is not None else list(default)


def verify_saddles(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    certificates = []
    for rank in _pick(n, (2, 3, 4)):
        for variant in (Variant.GENERIC, Variant.EQUIVARIANT):
            checked = verify_saddle_compositions(make_spec(rank, variant))
            certificates.extend(f"N={rank} {variant.value}: {c}" for c in checked)
    return Outcome(True, certificates)


def verify_homotopy(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    certificates = []
    for rank in _pick(n, (2, 3)):
        report = verify_moy_package(make_spec(rank, Variant.GENERIC))
        certificates.extend(f"N={rank}: {c}" for c in report.certified)
        certificates.extend(f"N={rank}: {name} = {value}" for name, value in report.scalars.items())
    return Outcome(True, certificates)


def verify_twists(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    holds = True
    certificates = []
    for rank in _pick(n, (2, 3)):
        for twists in _pick(k, (1, 2, 3)):
            for signed in (twists, -twists):
                report = compare_twist_closures(signed, rank)
                holds = holds and report.holds
                certificates.append(f"k={signed}, N={rank}: {report.theories}, euler "
                                    f"{report.euler_match}, elimination {report.elimination_invariant}")
                certificates.extend(f"k={signed}, N={rank}: {c}" for c in report.open_level)
    return Outcome(holds, certificates)


def verify_closed_bases(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    certificates = []
    for rank in _pick(n, (2, 3, 4)):
        for shape in ("theta", "double"):
            report = verify_stated_basis(shape, rank)
            certificates.append(f"{shape}, N={rank}: rank {report.rank}, lowest degree {report.shift}")
    return Outcome(True, certificates)


def verify_gornik(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    holds = True
    certificates = []
    for rank in _pick(n, (2, 3)):
        for word in range(1, 5):
            check = compare_with_engine(word, rank)
            expected = rank if word % 2 else rank ** 2
            ok = check.holds and check.states == expected
            holds = holds and ok
            certificates.append(f"T(2,{word}), N={rank}: {check.states} states, engine {check.engine}")
            if word <= 2:
                resolutions = eigenvalue_consistency(close_braid(BraidDiagram(word=word),
                                                                 make_spec(rank, Variant.EQUIVARIANT)))
                certificates.append(f"T(2,{word}), N={rank}: {len(resolutions)} resolutions eigenvalue-consistent")
    return Outcome(holds, certificates)


def verify_decomposition(k: Optional[int] = None, n: Optional[int] = None, count: int = 100, **_) -> Outcome:
    holds = True
    for seed in range(count):
        complex_, pieces = random_complex(seed, n or 2)
        found = decompose(complex_)
        free: Dict[int, int] = {}
        for p in found.of_kind("free"):
            free[p.h] = free.get(p.h, 0) + 1
        same = sorted(p.model_dump_json() for p in found.pieces) == sorted(p.model_dump_json() for p in pieces)
        if complex_.dims_at_one() != free or not same:
            logger.warning(f"Random complex {seed}: a=1 dims {complex_.dims_at_one()}, free ranks {free}, "
                           f"pieces recovered: {same}")
            holds = False
    return Outcome(holds, [f"{count} random complexes decomposed with verified change of basis"])


def verify_les_command(k: Optional[int] = None, n: Optional[int] = None, tail: int = 1, **_) -> Outcome:
    holds = True
    certificates = []
    for twists in _pick(k, (1, 2)):
        for variant in (Variant.GENERIC, Variant.DEFORMED):
            report = verify_les(twists, n or 2, variant, tail)
            holds = holds and report.holds
            certificates.append(f"k={twists}, N={n or 2}, {variant.value}: alternating sum "
                                f"{report.alternating_sum_zero}, exact {report.exact}, "
                                f"cone certificate {report.certificate}")
    return Outcome(holds, certificates)


def verify_invariants(k: Optional[int] = None, n: Optional[int] = None, **_) -> Outcome:
    holds = True
    certificates = []
    cases = [(2 * j + 1, 2) for j in _pick(k, (1, 2, 3))] + ([(3, 3)] if k is None else [])
    if n is not None:
        cases = [(word, n) for word, _ in cases]
    for word, rank in cases:
        pipeline = s_N_torus(word, rank)
        mirror = s_N_torus(-word, rank)
        recursion = s_N_torus_recursion(word, rank)
        ok = pipeline.s == recursion.s and mirror.s == -pipeline.s
        if rank == 2:
            ok = ok and pipeline.s == word - 1
        holds = holds and ok
        certificates.append(f"s_{rank}(T(2,{word})) = {pipeline.s}, mirror {mirror.s}, recursion {recursion.s}")
    return Outcome(holds, certificates)


CHECKS: Dict[str, Callable[..., Outcome]] = {
    "eq2": verify_saddles,
    "homotopy": verify_homotopy,
    "theorem1": verify_twists,
    "appendix-basis": verify_closed_bases,
    "gornik": verify_gornik,
    "decomposition": verify_decomposition,
    "les": verify_les_command,
    "invariants": verify_invariants,
}
