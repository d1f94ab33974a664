"""Exact arithmetic over the rationals and over cyclotomic fields Q(zeta_N)"""
import logging
from typing import Dict, List, Union

from sympy import Poly, QQ, Rational, Symbol, cyclotomic_poly

from modules.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

ZETA = Symbol("zeta")

Scalar = Union[int, Rational, "CyclotomicNumber"]


class CyclotomicField:
    """The field Q(zeta_N), elements stored as residues modulo the Nth cyclotomic polynomial"""

    def __init__(self, n: int):
        if n < 2:
            raise InvalidInputError(f"Cyclotomic field needs N >= 2, got {n}")
        self.n = n
        self.modulus = Poly(cyclotomic_poly(n, ZETA), ZETA, domain=QQ)
        self.degree = self.modulus.degree()

    def __call__(self, value) -> "CyclotomicNumber":
        if isinstance(value, CyclotomicNumber):
            if value.field != self:
                raise InvalidInputError("Cannot mix elements of different cyclotomic fields")
            return value
        if isinstance(value, Poly):
            return CyclotomicNumber(self, value)
        return CyclotomicNumber(self, Poly(QQ.to_sympy(QQ.convert(value)), ZETA, domain=QQ))

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclotomicField) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("cyclotomic", self.n))

    def __repr__(self) -> str:
        return f"CyclotomicField({self.n})"

    @property
    def zero(self) -> "CyclotomicNumber":
        return self(0)

    @property
    def one(self) -> "CyclotomicNumber":
        return self(1)

    def zeta(self, k: int = 1) -> "CyclotomicNumber":
        """Return zeta^k; exponents are taken modulo N"""
        return CyclotomicNumber(self, Poly(ZETA ** (k % self.n), ZETA, domain=QQ))

    def roots_of_unity(self) -> List["CyclotomicNumber"]:
        return [self.zeta(k) for k in range(self.n)]


class CyclotomicNumber:
    __slots__ = ("field", "poly")

    def __init__(self, field: CyclotomicField, poly: Poly):
        self.field = field
        self.poly = poly.rem(field.modulus)

    def _coerce(self, other) -> "CyclotomicNumber":
        return self.field(other)

    def __add__(self, other):
        return CyclotomicNumber(self.field, self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.field, -self.poly)

    def __sub__(self, other):
        return CyclotomicNumber(self.field, self.poly - self._coerce(other).poly)

    def __rsub__(self, other):
        return CyclotomicNumber(self.field, self._coerce(other).poly - self.poly)

    def __mul__(self, other):
        return CyclotomicNumber(self.field, self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse in Q(zeta_N)")
        return CyclotomicNumber(self.field, self.poly.invert(self.field.modulus))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def coefficients(self) -> List[Rational]:
        """Dense coefficient vector in the power basis 1, zeta, ..., zeta^(d-1)"""
        coeffs = [Rational(0)] * self.field.degree
        for (power,), c in self.poly.terms():
            coeffs[power] = Rational(c)
        return coeffs

    def __eq__(self, other) -> bool:
        try:
            return (self - other).is_zero
        except InvalidInputError:
            return False

    def __hash__(self) -> int:
        return hash((self.field.n, tuple(self.coefficients())))

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.poly.as_expr()}, N={self.field.n})"


def base_field(kind: str, n: int = None):
    """Return QQ for 'rationals' or Q(zeta_N) for 'cyclotomic'"""
    if kind == "rationals":
        return QQ
    if kind == "cyclotomic":
        if n is None:
            raise InvalidInputError("cyclotomic base field needs N")
        return CyclotomicField(n)
    raise InvalidInputError(f"Unknown base field kind: {kind}")


def evaluate_polynomial(p, values: Dict[int, Scalar], field: CyclotomicField):
    """Evaluate a ring element at a point; values maps generator index to a field element"""
    total = field.zero
    for monom, coeff in p.terms():
        term = field(QQ.to_sympy(coeff))
        for index, power in enumerate(monom):
            if power:
                term = term * field(values[index]) ** power
        total = total + term
    return total
