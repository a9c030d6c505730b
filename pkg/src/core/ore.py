"""Laurent skew polynomials sum a_i(v) E^i over Q(v) with E·a(v) = a(v+1)·E."""

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import PoleError, VariableMismatchError, ZeroDivisorError
from .exact_arith import Poly, RatFun, wrap_sum
from ..utils.logger import logger


def _power_text(exponent: int) -> str:
    if exponent == 1:
        return "E"
    if exponent > 0:
        return f"E^{exponent}"
    return f"E^({exponent})"


def _term_text(coefficient: str, exponent: int) -> str:
    if exponent == 0:
        return coefficient
    if coefficient == "1":
        return _power_text(exponent)
    return f"{wrap_sum(coefficient)}*{_power_text(exponent)}"


class OreOp:
    __slots__ = ("terms", "var")

    def __init__(self, terms: Optional[Mapping[int, object]] = None, var: str = "k"):
        cleaned: Dict[int, RatFun] = {}
        for exponent, coefficient in (terms or {}).items():
            value = RatFun.coerce(coefficient, var)
            if value.is_zero:
                continue
            if value.var != var and not value.is_constant:
                raise VariableMismatchError(var, value.var)
            cleaned[int(exponent)] = value.with_var(var)
        self.terms: Dict[int, RatFun] = dict(sorted(cleaned.items()))
        self.var = var

    @classmethod
    def zero(cls, var: str = "k") -> "OreOp":
        return cls({}, var)

    @classmethod
    def one(cls, var: str = "k") -> "OreOp":
        return cls({0: 1}, var)

    @classmethod
    def shift_op(cls, exponent: int = 1, var: str = "k") -> "OreOp":
        return cls({exponent: 1}, var)

    @classmethod
    def scalar(cls, value, var: str = "k") -> "OreOp":
        return cls({0: value}, var)

    @classmethod
    def from_coefficients(cls, coefficients: Iterable, var: str = "k", low: int = 0) -> "OreOp":
        return cls({low + i: c for i, c in enumerate(coefficients)}, var)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> Optional[int]:
        return max(self.terms) if self.terms else None

    @property
    def low(self) -> Optional[int]:
        return min(self.terms) if self.terms else None

    @property
    def leading_coefficient(self) -> RatFun:
        if not self.terms:
            return RatFun.zero(self.var)
        return self.terms[max(self.terms)]

    def coefficient(self, exponent: int) -> RatFun:
        return self.terms.get(exponent, RatFun.zero(self.var))

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial for c in self.terms.values())

    def is_monic(self) -> bool:
        return not self.is_zero and self.leading_coefficient == 1

    def with_var(self, var: str) -> "OreOp":
        if var == self.var:
            return self
        return OreOp({i: c.with_var(var) for i, c in self.terms.items()}, var)

    def _coerce(self, other) -> Optional["OreOp"]:
        if isinstance(other, OreOp):
            if other.var != self.var and not (other._constant_only() or self._constant_only()):
                raise VariableMismatchError(self.var, other.var)
            return other
        if isinstance(other, (int, Fraction, Poly, RatFun)):
            return OreOp.scalar(other, self.var)
        return None

    def _constant_only(self) -> bool:
        return all(c.is_constant for c in self.terms.values())

    def __add__(self, other) -> "OreOp":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for exponent, coefficient in other.terms.items():
            out[exponent] = out[exponent] + coefficient if exponent in out else coefficient
        return OreOp(out, self.var)

    __radd__ = __add__

    def __neg__(self) -> "OreOp":
        return OreOp({i: -c for i, c in self.terms.items()}, self.var)

    def __sub__(self, other) -> "OreOp":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "OreOp":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, factor) -> "OreOp":
        """Left multiplication factor·A; the factor is not shifted."""
        factor = RatFun.coerce(factor, self.var)
        return OreOp({i: factor * c for i, c in self.terms.items()}, self.var)

    def __mul__(self, other) -> "OreOp":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: Dict[int, RatFun] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                product = a * b.shift(i)
                out[i + j] = out[i + j] + product if i + j in out else product
        return OreOp(out, self.var)

    def __rmul__(self, other) -> "OreOp":
        if isinstance(other, (int, Fraction, Poly, RatFun)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "OreOp":
        if exponent < 0:
            raise ValueError("Negative powers of a general operator are not defined")
        result = OreOp.one(self.var)
        for _ in range(exponent):
            result = result * self
        return result

    def apply(self, sequence, at: int) -> Fraction:
        """Evaluate (A·c)_at = sum a_i(at) c_{at+i}; entries at negative indices read as 0."""
        total = Fraction(0)
        for exponent, coefficient in self.terms.items():
            index = at + exponent
            if index < 0:
                continue
            try:
                value = coefficient.evaluate(at)
            except PoleError:
                raise PoleError(at, exponent) from None
            total += value * sequence[index]
        return total

    def clearing_power(self) -> int:
        return max(0, -self.low) if self.terms else 0

    def clear_negative(self) -> "OreOp":
        power = self.clearing_power()
        if power == 0:
            return self
        return OreOp.shift_op(power, self.var) * self

    def monic(self) -> "OreOp":
        if self.is_zero:
            return self
        return self.scale(self.leading_coefficient.inverse())

    def rdivrem(self, divisor: "OreOp") -> Tuple["OreOp", "OreOp"]:
        """Right division: self = Q·divisor + R with order(R) < order(divisor)."""
        divisor = self._coerce(divisor)
        if divisor.is_zero:
            raise ZeroDivisorError("Right division by the zero operator")
        if (self.low or 0) < 0 or divisor.low < 0:
            raise ValueError("Right division needs operators without negative powers of E")
        quotient: Dict[int, RatFun] = {}
        remainder = self
        lead = divisor.leading_coefficient
        while not remainder.is_zero and remainder.order >= divisor.order:
            d = remainder.order - divisor.order
            factor = remainder.leading_coefficient / lead.shift(d)
            quotient[d] = factor
            remainder = remainder - OreOp({d: factor}, self.var) * divisor
        return OreOp(quotient, self.var), remainder

    def right_divides(self, other: "OreOp") -> bool:
        return other.clear_negative().rdivrem(self.clear_negative())[1].is_zero

    def render(self) -> str:
        if self.is_zero:
            return "0"
        text = ""
        for position, exponent in enumerate(sorted(self.terms, reverse=True)):
            coefficient = self.terms[exponent]
            negative = coefficient.is_negative()
            body = _term_text((-coefficient if negative else coefficient).render(), exponent)
            if position == 0:
                text = f"-{wrap_sum(body)}" if negative else body
            else:
                text += f" - {wrap_sum(body)}" if negative else f" + {body}"
        return text

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"OreOp({self.render()!r}, var={self.var!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, OreOp):
            if self.terms != other.terms:
                return False
            return self.var == other.var or self._constant_only()
        if isinstance(other, (int, Fraction, Poly, RatFun)):
            return self == OreOp.scalar(other, self.var)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))


def ore_add(a: OreOp, b) -> OreOp:
    return a + b


def ore_neg(a: OreOp) -> OreOp:
    return -a


def ore_scale(a: OreOp, factor) -> OreOp:
    if isinstance(factor, OreOp):
        return factor * a
    return a.scale(factor)


def ore_mul(a: OreOp, b: OreOp) -> OreOp:
    return a * b


def ore_apply(a: OreOp, sequence, at: int) -> Fraction:
    return a.apply(sequence, at)


def clear_negative(a: OreOp) -> OreOp:
    return a.clear_negative()


def ore_rdivrem(a: OreOp, b: OreOp) -> Tuple[OreOp, OreOp]:
    return a.rdivrem(b)


def _gcrd_pair(a: OreOp, b: OreOp) -> OreOp:
    if b.order > a.order:
        a, b = b, a
    a, b = a.monic(), b.monic()
    step = 0
    while not b.is_zero:
        _, remainder = a.rdivrem(b)
        a, b = b, remainder.monic()
        step += 1
        logger.debug(f"gcrd step {step}: orders {a.order} / {b.order}")
    return a.monic()


def ore_gcrd(operators: Iterable[OreOp]) -> OreOp:
    """Monic greatest common right divisor; zero inputs are skipped."""
    operators = list(operators)
    nonzero = [op.clear_negative() for op in operators if not op.is_zero]
    if not nonzero:
        var = operators[0].var if operators else "k"
        return OreOp.zero(var)

    current = nonzero[0].monic()
    for op in nonzero[1:]:
        if current.order == 0:
            break
        current = _gcrd_pair(current, op)

    if current.order == 0:
        return OreOp.one(current.var)
    return current


def _dot(row: Sequence[OreOp], column: Sequence[OreOp], var: str) -> OreOp:
    """sum_i row[i]·column[i], collected per exponent before building the operator."""
    terms: Dict[int, RatFun] = {}
    for left, right in zip(row, column):
        for i, a in left.terms.items():
            for j, b in right.terms.items():
                product = a * b.shift(i)
                terms[i + j] = terms[i + j] + product if i + j in terms else product
    return OreOp(terms, var)


class OpMatrix:
    """Square matrix of operators over Q(k)[E, E^-1]; the product is matrix composition."""

    __slots__ = ("entries", "var")

    def __init__(self, entries: Sequence[Sequence[OreOp]], var: str = "k"):
        rows = tuple(tuple(entry for entry in row) for row in entries)
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("Operator matrix must be square")
        self.entries = rows
        self.var = var

    @classmethod
    def zero(cls, m: int, var: str = "k") -> "OpMatrix":
        return cls([[OreOp.zero(var)] * m for _ in range(m)], var)

    @classmethod
    def identity(cls, m: int, var: str = "k") -> "OpMatrix":
        return cls([[OreOp.one(var) if r == c else OreOp.zero(var) for c in range(m)]
                    for r in range(m)], var)

    @property
    def m(self) -> int:
        return len(self.entries)

    def __getitem__(self, index) -> OreOp:
        r, c = index
        return self.entries[r][c]

    def column(self, j: int) -> List[OreOp]:
        return [row[j] for row in self.entries]

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        return OpMatrix([[a + b for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.entries, other.entries)], self.var)

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return self + other.scale(-1)

    def scale(self, factor) -> "OpMatrix":
        return OpMatrix([[entry.scale(factor) for entry in row] for row in self.entries], self.var)

    def __mul__(self, other) -> "OpMatrix":
        if not isinstance(other, OpMatrix):
            return self.scale(other)
        m = self.m
        out = [[None] * m for _ in range(m)]
        for r in range(m):
            for c in range(m):
                out[r][c] = _dot(self.entries[r], [row[c] for row in other.entries], self.var)
        return OpMatrix(out, self.var)

    def __rmul__(self, factor) -> "OpMatrix":
        return self.scale(factor)

    def apply(self, vector: Sequence[OreOp]) -> List[OreOp]:
        return [_dot(row, vector, self.var) for row in self.entries]

    def with_var(self, var: str) -> "OpMatrix":
        return OpMatrix([[entry.with_var(var) for entry in row] for row in self.entries], var)

    def render_rows(self) -> List[List[str]]:
        return [[entry.render() for entry in row] for row in self.entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"OpMatrix({self.render_rows()!r})"


def common_denominator(op: OreOp) -> Poly:
    result = Poly([1], op.var)
    for coefficient in op.terms.values():
        result = result.lcm(coefficient.den)
    return result


def primitive_form(op: OreOp) -> OreOp:
    """Clear denominators and remove the polynomial and rational content."""
    if op.is_zero:
        return op
    denominator = common_denominator(op)
    numerators = {i: (c * denominator).num for i, c in op.terms.items()}
    content = Poly([], op.var)
    for poly in numerators.values():
        content = poly if content.is_zero() else content.gcd(poly)
    numerators = {i: p // content for i, p in numerators.items()}

    # common rational factor, sign fixed by the leading term
    values = [c for poly in numerators.values() for c in poly.coeffs if c != 0]
    denominator_lcm = 1
    for value in values:
        denominator_lcm = denominator_lcm * value.denominator // gcd(denominator_lcm, value.denominator)
    common = 0
    for value in values:
        common = gcd(common, int(value * denominator_lcm))
    scale = Fraction(common, denominator_lcm)
    if numerators[max(numerators)].leading < 0:
        scale = -scale
    return OreOp({i: p.scale(1 / scale) for i, p in numerators.items()}, op.var)
