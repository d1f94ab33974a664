"""Decomposition of the doubled wide edge: finite models, the maps J and P, and the identities around them"""
import logging
from functools import cached_property, lru_cache
from typing import Dict, List

from pydantic import BaseModel, Field
from sympy import QQ

from modules.mf.factorization import KoszulFactorization, MatrixFactorization, resolution_mf, tensor, wide_edge_mf
from modules.mf.homotopy import chain_map_space, null_homotopy, require_scalar
from modules.mf.morphisms import (MFMorphism, chi0, chi1, identity, multiplication, reinterpret, tensor_morphism,
                                  xi0, xi1)
from modules.mf.reduction import Exclusion, ReductionChain, exclude_all, exclude_variable, row_operation_step, transport
from modules.ring.potential import PotentialSpec
from modules.utils.errors import InvalidInputError, StructuralError, VerificationError

logger = logging.getLogger(__name__)

MARKS = ("x1", "x2", "x3", "x4", "x5", "x6")
RIGHT = ("x1", "x2", "x5", "x6")
LEFT = ("x5", "x6", "x3", "x4")
STANDARD = ("x1", "x2", "x3", "x4")


class MoyReport(BaseModel):
    n: int = Field(..., description="Rank N")
    variant: str = Field(..., description="Potential variant")
    finite_rank: int = Field(..., description="Rank of the finite model of C(Gamma)")
    scalars: Dict[str, str] = Field(default_factory=dict, description="Non-zero scalars c with f ~ c g")
    certified: List[str] = Field(default_factory=list, description="Identities certified by the solver")


class MoyModels:
    """C(Gamma) for two stacked wide edges x3,x4 -> x5,x6 -> x1,x2 and its resolutions

    Every factorization lives over Q[(a,) x1..x6]. Gamma', Gamma'', Gamma_10 and
    Gamma_01 are reduced to the single wide edge on x1..x4; Gamma to a rank 8
    model over Q[(a,) x1..x4] in which x5 survives only through the basis 1, x5.
    """

    def __init__(self, spec: PotentialSpec):
        if not spec.graded:
            raise InvalidInputError("The decomposition package is computed for graded potentials")
        self.spec = spec
        ring = spec.ring(MARKS)
        self.ring = ring
        self.left = wide_edge_mf(spec, *LEFT, ring=ring)
        self.right = wide_edge_mf(spec, *RIGHT, ring=ring)
        self.left_arcs = resolution_mf(spec, "arcs", LEFT, ring)
        self.right_arcs = resolution_mf(spec, "arcs", RIGHT, ring)
        self.right_crossed = resolution_mf(spec, "crossed", RIGHT, ring)
        self.gamma = tensor(self.left, self.right, "Gamma")
        self.gamma10 = tensor(self.left, self.right_arcs, "Gamma10")
        self.gamma2 = tensor(self.left, self.right_crossed, "Gamma''")
        self.gamma01 = tensor(self.left_arcs, self.right, "Gamma01")
        self.gamma00 = tensor(self.left_arcs, self.right_arcs, "Gamma00")
        self.prime = wide_edge_mf(spec, *STANDARD, ring=ring)
        self.arcs = resolution_mf(spec, "arcs", STANDARD, ring)

    def _chain_to(self, mf: KoszulFactorization, model: KoszulFactorization) -> ReductionChain:
        chain = exclude_all(mf, ["x5", "x6"])
        if not chain.target.same_rows(model) or chain.target.shift != model.shift:
            raise VerificationError(f"{mf.name} does not reduce to {model.name}")
        return chain

    @cached_property
    def chain10(self) -> ReductionChain:
        return self._chain_to(self.gamma10, self.prime)

    @cached_property
    def chain2(self) -> ReductionChain:
        return self._chain_to(self.gamma2, self.prime)

    @cached_property
    def chain01(self) -> ReductionChain:
        return self._chain_to(self.gamma01, self.prime)

    @cached_property
    def chain00(self) -> ReductionChain:
        return self._chain_to(self.gamma00, self.arcs)

    @cached_property
    def chain_fin(self) -> ReductionChain:
        """x6 by the left sum row, then x5 by (x5 - x3)(x5 - x4) after folding the left product row into the right one"""
        first = exclude_variable(self.gamma, "x6", row=0).step
        folded = row_operation_step(first.target, 2, 0, 1)
        last = Exclusion(folded.target, 0, "x5")
        chain = ReductionChain(self.gamma).then(first).then(folded).then(last)
        if chain.target.rank != 8:
            raise StructuralError(f"Finite model of Gamma has rank {chain.target.rank}, expected 8")
        chain.target.check()
        return chain

    @property
    def fin(self) -> MatrixFactorization:
        return self.chain_fin.target

    def reduce(self, f: MFMorphism, source: ReductionChain, target: ReductionChain, name: str = "") -> MFMorphism:
        """f transported to the finite models, read on Gamma' (or Gamma_0) where the model is one"""
        reduced = transport(f, source, target, name)
        src = self._model(source)
        tgt = self._model(target)
        return reinterpret(reduced, src, tgt, name or f.name)

    def _model(self, chain: ReductionChain) -> MatrixFactorization:
        if chain is self.chain00:
            return self.arcs
        if chain is self.chain_fin:
            return self.fin
        return self.prime

    @cached_property
    def chi_r0(self) -> MFMorphism:
        return tensor_morphism(identity(self.left), chi0(self.spec, RIGHT, self.ring), self.gamma10, self.gamma)

    @cached_property
    def chi_r1(self) -> MFMorphism:
        return tensor_morphism(identity(self.left), chi1(self.spec, RIGHT, self.ring), self.gamma, self.gamma10)

    @cached_property
    def xi_r0(self) -> MFMorphism:
        return tensor_morphism(identity(self.left), xi0(self.spec, RIGHT, self.ring), self.gamma2, self.gamma)

    @cached_property
    def xi_r1(self) -> MFMorphism:
        return tensor_morphism(identity(self.left), xi1(self.spec, RIGHT, self.ring), self.gamma, self.gamma2)

    @cached_property
    def chi_l1(self) -> MFMorphism:
        return tensor_morphism(chi1(self.spec, LEFT, self.ring), identity(self.right), self.gamma, self.gamma01)

    def m(self, factor, on: MatrixFactorization = None) -> MFMorphism:
        on = on if on is not None else self.gamma
        return multiplication(on, self.ring.convert(factor))


@lru_cache(maxsize=None)
def moy_models(spec: PotentialSpec) -> MoyModels:
    return MoyModels(spec)


def _unique_class(source: MatrixFactorization, target: MatrixFactorization, name: str) -> MFMorphism:
    classes = chain_map_space(source, target, -1)
    if len(classes) != 1:
        raise VerificationError(f"Expected a unique class of degree -1 maps for {name}, found {len(classes)}")
    return classes[0]


@lru_cache(maxsize=None)
def _j_and_p(spec: PotentialSpec):
    models = moy_models(spec)
    j = _unique_class(models.prime, models.fin, "J")
    p = _unique_class(models.fin, models.prime, "P")
    x5 = models.reduce(models.m(models.ring["x5"]), models.chain_fin, models.chain_fin, "m(x5)")
    scale = require_scalar(p @ x5 @ j, identity(models.prime))
    p = p.scaled(QQ.one / scale)
    logger.info(f"Normalized J and P for N={spec.n} ({spec.variant.value}) by 1/{scale}")
    return MFMorphism(j.source, j.target, j.matrix, 0, "J"), MFMorphism(p.source, p.target, p.matrix, 0, "P")


def j_map(spec: PotentialSpec) -> MFMorphism:
    """J: C(Gamma') -> C(Gamma)_fin of q-degree -1, normalized with P so that P m(x5) J ~ id"""
    return _j_and_p(spec)[0]


def p_map(spec: PotentialSpec) -> MFMorphism:
    """P: C(Gamma)_fin -> C(Gamma') of q-degree -1"""
    return _j_and_p(spec)[1]


class _Certifier:
    def __init__(self, report: MoyReport):
        self.report = report

    def null(self, f: MFMorphism, label: str) -> None:
        if null_homotopy(f) is None:
            raise VerificationError(f"{label}: no null-homotopy found")
        self.report.certified.append(label)

    def scalar(self, f: MFMorphism, g: MFMorphism, label: str, expected=None):
        c = require_scalar(f, g)
        if expected is not None and c != expected:
            raise VerificationError(f"{label}: scalar {c}, expected {expected}")
        self.report.scalars[label] = str(c)
        self.report.certified.append(label)
        return c


def _sum_inverse(first: MFMorphism, first_back: MFMorphism, second: MFMorphism,
                 second_back: MFMorphism, c1, c2) -> MFMorphism:
    """first . first_back / c1 + second . second_back / c2 on the finite model"""
    return (first @ first_back).scaled(QQ.one / c1) + (second @ second_back).scaled(QQ.one / c2)


def verify_saddle_compositions(spec: PotentialSpec) -> List[str]:
    """chi1 chi0 = (x1 - x4) id and xi1 xi0 = (x1 - x3) id in both orders, exactly"""
    ring = spec.ring(STANDARD)
    checked = []
    for name, (into, out), factor in (("chi", (chi0(spec, ring=ring), chi1(spec, ring=ring)), "x4"),
                                      ("xi", (xi0(spec, ring=ring), xi1(spec, ring=ring)), "x3")):
        diff = ring["x1"] - ring[factor]
        for label, composite, on in ((f"{name}1.{name}0", out @ into, into.source),
                                     (f"{name}0.{name}1", into @ out, into.target)):
            if composite != multiplication(on, diff):
                raise VerificationError(f"{label} != (x1 - {factor}) id for N={spec.n}")
            if composite.degree() != 2:
                raise VerificationError(f"{label} is not homogeneous of degree 2")
            checked.append(f"{label} = m(x1-{factor})")
        for f in (into, out):
            if not f.is_chain_map():
                raise VerificationError(f"{f.name} does not commute with the differentials")
            if spec.graded and f.degree() != 1:
                raise VerificationError(f"{f.name} does not have q-degree 1")
    return checked


def verify_moy_package(spec: PotentialSpec) -> MoyReport:
    """Certify the homotopy identities around C(Gamma) = C(Gamma'){q} + C(Gamma'){q^-1}"""
    models = moy_models(spec)
    ring = models.ring
    report = MoyReport(n=spec.n, variant=spec.variant.value, finite_rank=models.fin.rank)
    cert = _Certifier(report)
    local = spec.ring(STANDARD)
    cert.null(xi1(spec, ring=local) @ chi0(spec, ring=local), "xi1.chi0 ~ 0")
    cert.null(chi1(spec, ring=local) @ xi0(spec, ring=local), "chi1.xi0 ~ 0")

    j, p = j_map(spec), p_map(spec)
    fin = models.chain_fin
    reduce = models.reduce
    m5 = reduce(models.m(ring["x5"]), fin, fin, "m(x5)")
    m6 = reduce(models.m(ring["x6"]), fin, fin, "m(x6)")
    ident = identity(models.prime)
    cert.scalar(p @ m5 @ j, ident, "P.m(x5).J ~ id", QQ.one)
    cert.scalar(p @ m6 @ j, ident, "P.m(x6).J ~ -id", -QQ.one)
    cert.null(p @ j, "P.J ~ 0")

    chi_r0 = reduce(models.chi_r0, models.chain10, fin, "chi_r0")
    chi_r1 = reduce(models.chi_r1, fin, models.chain10, "chi_r1")
    xi_r0 = reduce(models.xi_r0, models.chain2, fin, "xi_r0")
    xi_r1 = reduce(models.xi_r1, fin, models.chain2, "xi_r1")
    c1 = cert.scalar(p @ chi_r0, ident, "P.chi_r0 ~ c id")
    c4 = cert.scalar(chi_r1 @ j, ident, "chi_r1.J ~ c id")
    c3 = cert.scalar(p @ xi_r0, ident, "P.xi_r0 ~ c id")
    c2 = cert.scalar(xi_r1 @ j, ident, "xi_r1.J ~ c id")
    cert.null(xi_r1 @ chi_r0, "xi_r1.chi_r0 ~ 0")
    cert.null(chi_r1 @ xi_r0, "chi_r1.xi_r0 ~ 0")

    fin_id = identity(models.fin)
    cert.scalar(_sum_inverse(chi_r0, p, j, xi_r1, c1, c2), fin_id, "chi_r0.P/c + J.xi_r1/c ~ id", QQ.one)
    cert.scalar(_sum_inverse(xi_r0, p, j, chi_r1, c3, c4), fin_id, "xi_r0.P/c + J.chi_r1/c ~ id", QQ.one)

    for mark in ("x3", "x4"):
        shifted = reduce(models.m(ring["x5"] - ring[mark]), fin, fin, f"m(x5-{mark})")
        cert.scalar(p @ shifted @ chi_r0, multiplication(models.prime, ring["x1"] - ring[mark]),
                    f"P.m(x5-{mark}).chi_r0 ~ c m(x1-{mark})", c1)

    chi_r0_low = tensor_morphism(identity(models.left_arcs), chi0(spec, RIGHT, ring), models.gamma00, models.gamma01)
    chi_l1_low = tensor_morphism(chi1(spec, LEFT, ring), identity(models.right_arcs), models.gamma10, models.gamma00)
    high = models.chi_l1 @ models.chi_r0
    if high != chi_r0_low @ chi_l1_low:
        raise VerificationError("chi_l1.chi_r0 and chi_r0.chi_l1 differ")
    report.certified.append("chi_l1.chi_r0 = chi_r0.chi_l1")
    cert.scalar(reduce(high, models.chain10, models.chain01, "chi_l1.chi_r0"),
                multiplication(models.prime, ring["x1"] - ring["x4"]), "chi_l1.chi_r0 ~ c m(x1-x4)")
    logger.info(f"Decomposition package certified for N={spec.n} ({spec.variant.value}): "
                f"{len(report.certified)} identities")
    return report


def verify_two_crossing_reduction(spec: PotentialSpec) -> MoyReport:
    """C(b^2) reduced by (J, xi_r0) and one elimination matches B_1 up to non-zero rescaling of its maps"""
    models = moy_models(spec)
    ring = models.ring
    report = MoyReport(n=spec.n, variant=spec.variant.value, finite_rank=models.fin.rank)
    cert = _Certifier(report)
    j = j_map(spec)
    fin = models.chain_fin
    chi_r1 = models.reduce(models.chi_r1, fin, models.chain10, "chi_r1")
    xi_r0 = models.reduce(models.xi_r0, models.chain2, fin, "xi_r0")
    chi_l1 = models.reduce(models.chi_l1, fin, models.chain01, "chi_l1")
    phi = cert.scalar(chi_r1 @ j, identity(models.prime), "chi_r1.J ~ c id")
    cert.null(chi_r1 @ xi_r0, "chi_r1.xi_r0 ~ 0")
    gamma, delta, epsilon = chi_l1 @ j, chi_r1 @ xi_r0, chi_l1 @ xi_r0
    corrected = epsilon - (gamma @ delta).scaled(QQ.one / phi)
    cert.scalar(corrected, multiplication(models.prime, ring["x1"] - ring["x3"]),
                "chi_l1.xi_r0 - chi_l1.J.chi_r1.xi_r0/c ~ c m(x1-x3)")
    last = models.reduce(tensor_morphism(identity(models.left_arcs), chi1(spec, RIGHT, ring), models.gamma01,
                                         models.gamma00), models.chain01, models.chain00, "chi_r1")
    cert.scalar(last, chi1(spec, STANDARD, ring), "chi_r1 on Gamma01 ~ c chi1")
    return report
