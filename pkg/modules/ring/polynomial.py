"""Graded polynomial rings over Q with deg x_i = 2 and deg a = 2N"""
import logging
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing

from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

X_DEGREE = 2
A_NAME = "a"
SUPPORTED_ORDERS = ("grlex", "grevlex", "lex")

Monomial = Tuple[int, ...]


@lru_cache(maxsize=None)
def _weighted_monomials(weights: Tuple[int, ...], degree: int) -> Tuple[Monomial, ...]:
    if degree < 0:
        return ()
    if not weights:
        return ((),) if degree == 0 else ()
    head, rest = weights[0], weights[1:]
    found = []
    for power in range(degree // head + 1):
        for tail in _weighted_monomials(rest, degree - power * head):
            found.append((power,) + tail)
    return tuple(found)


class GradedRing:
    """Polynomial ring Q[a, x_1, ..., x_m] carrying the weighted q-grading"""

    def __init__(self, n: int, x_names: Sequence[str], with_a: bool = True, order: str = "grlex"):
        if order not in SUPPORTED_ORDERS:
            raise InvalidInputError(f"Unsupported monomial order: {order}")
        names = ((A_NAME,) if with_a else ()) + tuple(x_names)
        if len(set(names)) != len(names):
            raise InvalidInputError(f"Duplicate variable names: {names}")
        self.n = n
        self.with_a = with_a
        self.order = order
        self.x_names = tuple(x_names)
        self.names = names
        self.ring = PolyRing(names, QQ, order)
        self.weights = tuple(2 * n if name == A_NAME else X_DEGREE for name in names)
        self._index = {name: i for i, name in enumerate(names)}

    def __repr__(self) -> str:
        return f"GradedRing(N={self.n}, vars={self.names}, order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedRing) and (self.n, self.names, self.order) == (other.n, other.names, other.order)

    def __hash__(self) -> int:
        return hash((self.n, self.names, self.order))

    def __getitem__(self, name: str) -> PolyElement:
        try:
            return self.ring.gens[self._index[name]]
        except KeyError:
            raise InvalidInputError(f"Variable {name} not in {self.names}")

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        return self._index[name]

    @property
    def a(self) -> PolyElement:
        if not self.with_a:
            raise InvalidInputError("Ring has no deformation parameter a")
        return self[A_NAME]

    @property
    def zero(self) -> PolyElement:
        return self.ring.zero

    @property
    def one(self) -> PolyElement:
        return self.ring.one

    def __call__(self, value) -> PolyElement:
        return self.convert(value)

    def convert(self, value) -> PolyElement:
        """Bring a scalar or an element of another polynomial ring into this ring"""
        if isinstance(value, PolyElement):
            if value.ring == self.ring:
                return value
            return value.set_ring(self.ring)
        return self.ring(value)

    def with_order(self, order: str) -> "GradedRing":
        return GradedRing(self.n, self.x_names, self.with_a, order)

    def extended(self, extra_x_names: Sequence[str]) -> "GradedRing":
        names = list(self.x_names) + [x for x in extra_x_names if x not in self._index]
        return GradedRing(self.n, names, self.with_a, self.order)

    def restricted(self, x_names: Sequence[str]) -> "GradedRing":
        return GradedRing(self.n, x_names, self.with_a, self.order)

    def monomial_degree(self, monom: Monomial) -> int:
        return sum(w * e for w, e in zip(self.weights, monom))

    def homogeneous_degree(self, p: PolyElement) -> Optional[int]:
        """Weighted degree of p, or None when p is zero or not homogeneous"""
        degrees = {self.monomial_degree(m) for m in p.itermonoms()}
        if len(degrees) != 1:
            return None
        return degrees.pop()

    def is_homogeneous(self, p: PolyElement) -> bool:
        return not p or self.homogeneous_degree(p) is not None

    def max_degree(self, p: PolyElement) -> Optional[int]:
        if not p:
            return None
        return max(self.monomial_degree(m) for m in p.itermonoms())

    def monomials_of_degree(self, degree: int) -> Tuple[Monomial, ...]:
        return _weighted_monomials(self.weights, degree)

    def monomials_up_to(self, degree: int) -> List[Monomial]:
        found = []
        for d in range(0, degree + 1, 2):
            found.extend(self.monomials_of_degree(d))
        return found

    def monomial(self, monom: Monomial) -> PolyElement:
        return self.ring({tuple(monom): QQ.one})

    def substitute(self, p: PolyElement, mapping: Dict[str, PolyElement]) -> PolyElement:
        """Simultaneous substitution of variables by ring elements"""
        if not mapping:
            return p
        replacements = [(self[name], self.convert(image)) for name, image in mapping.items()]
        return self.convert(p).compose(replacements)

    def specialize_a(self, p: PolyElement, value) -> PolyElement:
        return self.substitute(p, {A_NAME: self.ring(value)})

    def variables_of(self, p: PolyElement) -> List[str]:
        used = set()
        for monom in p.itermonoms():
            used.update(i for i, e in enumerate(monom) if e)
        return [self.names[i] for i in sorted(used)]

    def divmod_in(self, p: PolyElement, f: PolyElement, name: str) -> Tuple[PolyElement, PolyElement]:
        """Division with remainder by f, viewed as a polynomial in one variable

        The leading coefficient of f in that variable must be a nonzero constant.
        """
        x = self[name]
        i = self.index(name)
        df = f.degree(x)
        if df < 0:
            raise InvalidInputError("Division by zero polynomial")
        lead = f.coeff_wrt(x, df)
        if not lead.is_ground:
            raise InvalidInputError(f"Leading coefficient of divisor in {name} is not a constant")
        lead_inv = QQ.one / lead.LC
        quotient, remainder = self.zero, self.convert(p)
        while remainder and remainder.degree(x) >= df:
            dr = remainder.degree(x)
            shift = [0] * len(self.names)
            shift[i] = dr - df
            term = remainder.coeff_wrt(x, dr).mul_monom(tuple(shift)) * lead_inv
            quotient += term
            remainder -= term * f
        return quotient, remainder

    def coefficients_in(self, p: PolyElement, name: str) -> Dict[int, PolyElement]:
        """Expand p as a polynomial in one variable with coefficients free of it"""
        if not p:
            return {}
        x = self[name]
        return {d: p.coeff_wrt(x, d) for d in range(p.degree(x) + 1) if p.coeff_wrt(x, d)}

    def pull_back(self, p: PolyElement, images: Dict[str, PolyElement]) -> PolyElement:
        """Image of p from any polynomial ring, sending each variable to images[name] or its namesake here"""
        symbols = [str(s) for s in p.ring.symbols]
        targets = [self.convert(images[name]) if name in images else self[name] for name in symbols]
        result = self.zero
        for monom, coeff in p.iterterms():
            term = self.ring.ground_new(coeff)
            for image, power in zip(targets, monom):
                if power:
                    term *= image ** power
            result += term
        return result
