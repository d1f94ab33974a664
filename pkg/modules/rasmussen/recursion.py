"""Linearity of s_N in the number of full twists, for twisted diagrams and for 2-cables"""
import logging
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from modules.rasmussen.invariants import RasmussenResult
from modules.utils.errors import InvalidInputError, StructuralError

logger = logging.getLogger(__name__)


class CableSpec(BaseModel):
    """K_{2,2k+1} for a companion K with c_plus positive and c_minus negative crossings

    base_plus and base_minus are s_N of K_{2,1} and K_{2,-1}; for the unknot both are 0.
    """
    companion: Literal["unknot", "abstract"] = "unknot"
    c_plus: int = Field(0, ge=0)
    c_minus: int = Field(0, ge=0)
    base_plus: Optional[int] = None
    base_minus: Optional[int] = None
    k: int
    n: int = Field(2, ge=2)

    @model_validator(mode="after")
    def _bases(self) -> "CableSpec":
        if self.companion == "unknot":
            if self.c_plus or self.c_minus:
                raise ValueError("The unknot companion has a crossingless diagram")
            self.base_plus = 0 if self.base_plus is None else self.base_plus
            self.base_minus = 0 if self.base_minus is None else self.base_minus
        elif self.base_plus is None or self.base_minus is None:
            raise ValueError("An abstract companion needs s_N of K_{2,1} and K_{2,-1}")
        return self

    @property
    def name(self) -> str:
        companion = "U" if self.companion == "unknot" else "K"
        return f"{companion}_(2,{2 * self.k + 1})"


def linearity_step_general(s_prev: int, k: int, c_plus: int, c_minus: int, n: int) -> Optional[int]:
    """s_N(D_k) from s_N(D_(k-1)) when k <= (-c_plus-2)/2 or k >= (c_minus+2)/2"""
    if 2 * k <= -c_plus - 2 or 2 * k >= c_minus + 2:
        return s_prev + 2 * (n - 1)
    return None


def linearity_step_cable(s_prev: int, k: int, c_plus: int, c_minus: int, n: int) -> Optional[int]:
    """s_N(K_{2,2k+1}) from s_N(K_{2,2k-1}); for N = 2 every k != 0 works"""
    if k <= -c_plus - 1 or k >= c_minus + 1:
        return s_prev + 2 * (n - 1)
    if n == 2 and k != 0:
        return s_prev + 2
    return None


def cable_s_N(spec: CableSpec) -> RasmussenResult:
    """Walk from K_{2,1} (k >= 0) or K_{2,-1} (k < 0) to K_{2,2k+1}, one twist at a time"""
    steps: List[str] = []
    if spec.k >= 0:
        s = spec.base_plus
        for j in range(1, spec.k + 1):
            s_next = linearity_step_cable(s, j, spec.c_plus, spec.c_minus, spec.n)
            if s_next is None:
                raise InvalidInputError(f"Linearity does not reach k={j} for c+={spec.c_plus}, "
                                        f"c-={spec.c_minus}, N={spec.n}")
            s = s_next
            steps.append(f"step k={j}: {s}")
    else:
        s = spec.base_minus
        for j in range(-1, spec.k, -1):
            if linearity_step_cable(0, j, spec.c_plus, spec.c_minus, spec.n) is None:
                raise InvalidInputError(f"Linearity does not reach k={j - 1} for c+={spec.c_plus}, "
                                        f"c-={spec.c_minus}, N={spec.n}")
            s -= linearity_step_cable(0, j, spec.c_plus, spec.c_minus, spec.n)
            steps.append(f"step k={j}: {s}")
    logger.info(f"s_{spec.n}({spec.name}) = {s} after {len(steps)} linearity steps")
    return RasmussenResult(name=spec.name, n=spec.n, s=s, method="recursion", certificates=steps)


def s_N_torus_recursion(word: int, n: int) -> RasmussenResult:
    """T(2, 2k+1) as the 2-cable of the unknot"""
    if word % 2 == 0:
        raise InvalidInputError(f"T(2,{word}) is a two-component link; s_N needs a knot")
    result = cable_s_N(CableSpec(k=(word - 1) // 2, n=n))
    return result.model_copy(update={"name": f"T(2,{word})"})


def s2_cable_formula(base: Literal["slice", "amphicheiral"], k: int) -> int:
    """s_2(K_{2,2k+1}) for a slice or amphicheiral companion, where s_2(K_{2,1}) = s_2(K_{2,-1}) = 0"""
    if base not in ("slice", "amphicheiral"):
        raise InvalidInputError(f"Unknown companion class {base!r}")
    return cable_s_N(CableSpec(companion="abstract", base_plus=0, base_minus=0, k=k, n=2)).s


def vanishing_bound(k: int, c_plus: int, c_minus: int, n: int, cable: bool = True) -> bool:
    """Whether the support bound alone kills H^(2k) of the wide-edge replacement"""
    if c_plus < 0 or c_minus < 0:
        raise InvalidInputError("Crossing counts must be non-negative")
    if cable:
        if n == 2 and k >= 1:
            return True
        return k >= c_minus + 1 or k <= -c_plus - 1
    return 2 * k >= c_minus + 2 or 2 * k <= -c_plus - 2


def check_ladder(values: List[int], n: int) -> None:
    """Consecutive pipeline values must differ by 2(N-1)"""
    for first, second in zip(values, values[1:]):
        if second - first != 2 * (n - 1):
            raise StructuralError(f"s_{n} values {values} do not step by {2 * (n - 1)}")
