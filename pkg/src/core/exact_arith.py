"""Exact arithmetic over Q: dense univariate polynomials, reduced rational
functions and Gauss-Jordan elimination over Q(k).

Rationals are ``fractions.Fraction``. Every value is immutable after
construction; all operations return new objects. Polynomial gcds go
through sympy over QQ; everything else stays on plain coefficient tuples.
"""

from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Poly as SymPoly
from sympy import Symbol
from sympy.polys.domains import QQ

from .errors import PoleError, SingularSystemError, VariableMismatchError, ZeroDivisorError

Scalar = Union[int, Fraction]


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise ValueError(f"Zero denominator in rational {value.strip()!r}") from None
    raise TypeError(f"Cannot interpret {value!r} as an exact rational")


def rational_text(value: Fraction) -> str:
    """Serialize a rational as a "p/q" string (q = 1 included)."""
    value = to_rational(value)
    return f"{value.numerator}/{value.denominator}"


def _scalar_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _top_level(text: str, operators: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and i > 0 and ch in operators:
            return True
    return False


def wrap_sum(text: str) -> str:
    return f"({text})" if _top_level(text, "+-") else text


def wrap_compound(text: str) -> str:
    return f"({text})" if _top_level(text, "+-*/") else text


class Poly:
    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        values = [to_rational(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(values)
        self.var = var

    @classmethod
    def constant(cls, value, var: str = "x") -> "Poly":
        return cls([value], var)

    @classmethod
    def gen(cls, var: str = "x") -> "Poly":
        return cls([0, 1], var)

    @classmethod
    def monomial(cls, degree: int, value=1, var: str = "x") -> "Poly":
        return cls([0] * degree + [value], var)

    @classmethod
    def linear(cls, slope, intercept, var: str = "x") -> "Poly":
        return cls([intercept, slope], var)

    @property
    def degree(self) -> int:
        # the zero polynomial has degree -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def with_var(self, var: str) -> "Poly":
        return self if var == self.var else Poly(self.coeffs, var)

    def _coerce(self, other) -> Optional["Poly"]:
        if isinstance(other, Poly):
            if other.var != self.var and not (other.is_constant() or self.is_constant()):
                raise VariableMismatchError(self.var, other.var)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly([other], self.var)
        return None

    def _common_var(self, other: "Poly") -> str:
        if self.is_constant() and not other.is_constant():
            return other.var
        return self.var

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        size = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] + other[i] for i in range(size)], self._common_var(other))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly([], self._common_var(other))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self._common_var(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("Negative exponent on a polynomial")
        result = Poly([1], self.var)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor) -> "Poly":
        factor = to_rational(factor)
        return Poly([c * factor for c in self.coeffs], self.var)

    def divrem(self, other) -> Tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other is None:
            raise TypeError(f"Cannot divide a polynomial by {other!r}")
        if other.is_zero():
            raise ZeroDivisorError("Division by the zero polynomial")
        var = self._common_var(other)
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading
        shift_max = other.degree
        while len(rem) - 1 >= shift_max and rem:
            d = len(rem) - 1 - shift_max
            factor = rem[-1] / lead
            quot[d] = factor
            for i, c in enumerate(other.coeffs):
                rem[i + d] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(quot, var), Poly(rem, var)

    def __floordiv__(self, other) -> "Poly":
        return self.divrem(other)[0]

    def __mod__(self, other) -> "Poly":
        return self.divrem(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading)

    def gcd(self, other) -> "Poly":
        """Monic gcd; gcd(0, 0) = 0."""
        other = self._coerce(other)
        var = self._common_var(other)
        if other.is_zero():
            return self.monic().with_var(var)
        if self.is_zero():
            return other.monic().with_var(var)
        if self.is_constant() or other.is_constant():
            return Poly([1], var)
        return _from_sympy(_to_sympy(self).gcd(_to_sympy(other)), var).monic()

    def lcm(self, other) -> "Poly":
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self._common_var(other))
        return ((self * other) // self.gcd(other)).monic()

    def evaluate(self, at):
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * at + c
        return result

    __call__ = evaluate

    def compose(self, inner: "Poly") -> "Poly":
        result = Poly([], inner.var)
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def shift(self, j: int) -> "Poly":
        """p(v) -> p(v + j)."""
        if j == 0 or self.is_constant():
            return self
        return self.compose(Poly([j, 1], self.var))

    def content_and_primitive(self) -> Tuple[Fraction, "Poly"]:
        """Split p = c * N with N integral, primitive, positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        denominator = 1
        for c in self.coeffs:
            denominator = denominator * c.denominator // gcd(denominator, c.denominator)
        numerators = [int(c * denominator) for c in self.coeffs]
        common = 0
        for value in numerators:
            common = gcd(common, value)
        if numerators[-1] < 0:
            common = -common
        return Fraction(common, denominator), Poly([Fraction(v, common) for v in numerators], self.var)

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            magnitude = -c if c < 0 else c
            if d == 0:
                body = _scalar_text(magnitude)
            else:
                power = self.var if d == 1 else f"{self.var}^{d}"
                body = power if magnitude == 1 else f"{_scalar_text(magnitude)}*{power}"
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            text += sign + body
        return text

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()!r}, var={self.var!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            if self.coeffs != other.coeffs:
                return False
            return self.var == other.var or self.is_constant()
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_constant():
            return hash(self[0])
        return hash(self.coeffs)


_GCD_SYMBOL = Symbol("v")


def _to_sympy(p: Poly) -> SymPoly:
    coeffs = [QQ(c.numerator, c.denominator) for c in reversed(p.coeffs)]
    return SymPoly.from_list(coeffs, _GCD_SYMBOL, domain=QQ)


def _from_sympy(p: SymPoly, var: str) -> Poly:
    return Poly([Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())], var)


def _as_poly(value, var: str) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly([value], var)


class RatFun:
    """A reduced quotient num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, var: Optional[str] = None):
        num_poly = _as_poly(num, var or "x")
        den_poly = _as_poly(den, var or "x")
        if var is None:
            var = den_poly.var if num_poly.is_constant() and not den_poly.is_constant() else num_poly.var
        if num_poly.var != den_poly.var and not (num_poly.is_constant() or den_poly.is_constant()):
            raise VariableMismatchError(num_poly.var, den_poly.var)
        num_poly, den_poly = num_poly.with_var(var), den_poly.with_var(var)
        if den_poly.is_zero():
            raise ZeroDivisorError("Rational function with zero denominator")
        if num_poly.is_zero():
            self.num, self.den = num_poly, Poly([1], var)
            return
        if not den_poly.is_constant():
            common = num_poly.gcd(den_poly)
            if not common.is_constant():
                num_poly, den_poly = num_poly // common, den_poly // common
        lead = den_poly.leading
        if lead != 1:
            num_poly, den_poly = num_poly.scale(1 / lead), den_poly.scale(1 / lead)
        self.num, self.den = num_poly, den_poly

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFun":
        # caller guarantees reduced form with monic den
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den.with_var(num.var)
        return obj

    @classmethod
    def coerce(cls, value, var: str = "x") -> "RatFun":
        if isinstance(value, RatFun):
            return value
        if isinstance(value, Poly):
            return cls._raw(value, Poly([1], value.var))
        return cls._raw(Poly([value], var), Poly([1], var))

    @classmethod
    def zero(cls, var: str = "x") -> "RatFun":
        return cls._raw(Poly([], var), Poly([1], var))

    @classmethod
    def one(cls, var: str = "x") -> "RatFun":
        return cls._raw(Poly([1], var), Poly([1], var))

    @classmethod
    def gen(cls, var: str = "x") -> "RatFun":
        return cls._raw(Poly.gen(var), Poly([1], var))

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    @property
    def weight(self) -> int:
        return max(self.num.degree, 0) + self.den.degree

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self.render()} is not a constant")
        return self.num[0]

    def with_var(self, var: str) -> "RatFun":
        if var == self.var:
            return self
        return RatFun._raw(self.num.with_var(var), self.den.with_var(var))

    def _coerce(self, other) -> Optional["RatFun"]:
        if isinstance(other, RatFun):
            if other.var != self.var and not (other.is_constant or self.is_constant):
                raise VariableMismatchError(self.var, other.var)
            return other
        if isinstance(other, (int, Fraction, Poly)):
            return RatFun.coerce(other, self.var)
        return None

    def _common_var(self, other: "RatFun") -> str:
        if self.is_constant and not other.is_constant:
            return other.var
        return self.var

    def __add__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        var = self._common_var(other)
        if self.is_zero:
            return other.with_var(var)
        if other.is_zero:
            return self.with_var(var)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den, var)
        common = self.den.gcd(other.den)
        left = other.den // common
        right = self.den // common
        return RatFun(self.num * left + other.num * right, self.den * left, var)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun._raw(-self.num, self.den)

    def __sub__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        var = self._common_var(other)
        if self.is_zero or other.is_zero:
            return RatFun.zero(var)
        if self.is_polynomial and other.is_polynomial:
            return RatFun._raw((self.num * other.num).with_var(var), Poly([1], var))
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = (self.num // g1) * (other.num // g2)
        den = (self.den // g2) * (other.den // g1)
        lead = den.leading
        if lead != 1:
            num, den = num.scale(1 / lead), den.scale(1 / lead)
        return RatFun._raw(num.with_var(var), den.with_var(var))

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero:
            raise ZeroDivisorError("Division by the zero rational function")
        lead = self.num.leading
        return RatFun._raw(self.den.scale(1 / lead), self.num.scale(1 / lead))

    def __truediv__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFun":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "RatFun":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return RatFun._raw(self.num ** exponent, self.den ** exponent)

    def shift(self, j: int) -> "RatFun":
        """f(v) -> f(v + j); shifting preserves coprimality and monicity."""
        if j == 0 or self.is_constant:
            return self
        return RatFun._raw(self.num.shift(j), self.den.shift(j))

    def evaluate(self, at):
        if isinstance(at, RatFun):
            bottom = self.den.evaluate(at)
            if bottom == 0:
                raise PoleError(at.render())
            return RatFun.coerce(self.num.evaluate(at), at.var) / bottom
        at = to_rational(at)
        bottom = self.den.evaluate(at)
        if bottom == 0:
            raise PoleError(at)
        return self.num.evaluate(at) / bottom

    __call__ = evaluate

    def is_negative(self) -> bool:
        return self.num.leading < 0

    def render(self) -> str:
        if self.is_zero:
            return "0"
        num_content, top_poly = self.num.content_and_primitive()
        den_content, bottom_poly = self.den.content_and_primitive()
        content = num_content / den_content
        sign = "-" if content < 0 else ""
        p, q = abs(content.numerator), content.denominator
        if top_poly.is_constant():
            top = str(p)
        elif p == 1:
            top = top_poly.render()
        else:
            top = f"{p}*{wrap_sum(top_poly.render())}"
        if bottom_poly.is_constant():
            if q == 1:
                return sign + (wrap_sum(top) if sign else top)
            bottom = str(q)
        elif q == 1:
            bottom = bottom_poly.render()
        else:
            bottom = f"{q}*{wrap_sum(bottom_poly.render())}"
        return f"{sign}{wrap_sum(top)}/{wrap_compound(bottom)}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"RatFun({self.render()!r}, var={self.var!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Poly):
            return self.is_polynomial and self.num == other
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.num[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_constant:
            return hash(self.num[0])
        return hash((self.num.coeffs, self.den.coeffs))


def poly_arith(p: Poly, q: Poly, op: str):
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divrem":
        return p.divrem(q)
    if op == "gcd":
        return p.gcd(q)
    raise ValueError(f"Unknown polynomial operation: {op}")


def ratfun_arith(f: RatFun, g, op: str) -> RatFun:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "shift_by":
        return f.shift(int(g))
    raise ValueError(f"Unknown rational function operation: {op}")


def eval_poly(p: Union[Poly, RatFun], at):
    return p.evaluate(at)


def generalized_binomial(top, k: int) -> Fraction:
    """C(t, k) = t(t-1)...(t-k+1)/k! for any rational t; zero for k < 0."""
    if k < 0:
        return Fraction(0)
    top = to_rational(top)
    result = Fraction(1)
    for i in range(k):
        result = result * (top - i) / (i + 1)
    return result


def solve_linear_system(matrix: Sequence[Sequence], rhs: Sequence, var: str = "k") -> List[RatFun]:
    """Solve A·u = rhs over Q(var) by Gauss-Jordan elimination.

    The pivot in each column is the nonzero entry of smallest total degree.
    """
    size = len(matrix)
    if len(rhs) != size or any(len(row) != size for row in matrix):
        raise ValueError(f"Expected a square system, got {size} rows and {len(rhs)} right-hand sides")

    rows = [[RatFun.coerce(v, var) for v in row] + [RatFun.coerce(b, var)]
            for row, b in zip(matrix, rhs)]

    for col in range(size):
        candidates = [r for r in range(col, size) if not rows[r][col].is_zero]
        if not candidates:
            raise SingularSystemError(col, size)
        pivot = min(candidates, key=lambda r: rows[r][col].weight)
        rows[col], rows[pivot] = rows[pivot], rows[col]

        inverse = rows[col][col].inverse()
        rows[col] = [v if v.is_zero else v * inverse for v in rows[col]]
        for r in range(size):
            factor = rows[r][col]
            if r == col or factor.is_zero:
                continue
            rows[r] = [a if b.is_zero else a - factor * b for a, b in zip(rows[r], rows[col])]

    return [rows[i][size] for i in range(size)]
