from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import List, Optional, Tuple

from ..core.errors import NonPolynomialOperatorError, PoleError
from ..core.exact_arith import Poly, RatFun, solve_linear_system
from ..core.models import (BasisSpec, CompatibilityCheck, CompatibilityReport,
                           ExpansionTable)
from ..core.ore import OreOp
from ..utils.logger import logger

XPoly = List[RatFun]  # polynomial in x over Q(k), index = degree


def binomial_poly(a: int, b: Fraction, e: int, var: str = "x") -> Poly:
    """C(a·x + b, e) as an explicit polynomial in x."""
    result = Poly([1], var)
    for t in range(e):
        result = result * Poly.linear(a, b - t, var)
    return result.scale(Fraction(1, factorial(e)))


def _k_linear(constant, slope) -> RatFun:
    return RatFun(Poly([constant, slope], "k"), 1, "k")


def _times_linear(poly: XPoly, slope: RatFun, intercept: RatFun) -> XPoly:
    out = [RatFun.zero("k") for _ in range(len(poly) + 1)]
    for d, c in enumerate(poly):
        if c.is_zero:
            continue
        out[d] = out[d] + c * intercept
        out[d + 1] = out[d + 1] + c * slope
    return out


def _scaled(poly: XPoly, factor: RatFun) -> XPoly:
    return [c * factor for c in poly]


def _offset_exponents(m: int, j: int, offset: int) -> List[int]:
    """Exponent offsets of each factor at index mk + j - offset, relative to k."""
    q, r = divmod(j - offset, m)
    return [q + 1 if i < r else q for i in range(m)]


class BasisExpander:
    """Builds the basis polynomials of C_{a,b} and the symbolic action of E and x on them."""

    def __init__(self, spec: BasisSpec):
        self.spec = spec
        self._polys: List[Poly] = [Poly([1], "x")]
        self._table: Optional[ExpansionTable] = None

    def exponents(self, n: int) -> List[int]:
        k, j = divmod(n, self.spec.m)
        return [k + 1 if i < j else k for i in range(self.spec.m)]

    def basis_poly(self, n: int) -> Poly:
        if n < 0:
            raise ValueError(f"Basis index must be nonnegative, got {n}")
        m = self.spec.m
        # P_{mk+j+1} = P_{mk+j} · (a_{j+1} x + b_{j+1} - k)/(k+1)
        while len(self._polys) <= n:
            k, j = divmod(len(self._polys) - 1, m)
            factor = Poly.linear(self.spec.a[j], self.spec.b[j] - k, "x").scale(Fraction(1, k + 1))
            self._polys.append(self._polys[-1] * factor)
        return self._polys[n]

    def expand_in_basis(self, p: Poly) -> List[Fraction]:
        """Coefficients c_0..c_d with p = sum c_n P_n."""
        rem = p.with_var("x")
        if rem.is_zero():
            return []
        coeffs = [Fraction(0)] * (rem.degree + 1)
        for d in range(rem.degree, -1, -1):
            if rem.degree != d:
                continue
            basis = self.basis_poly(d)
            c = rem.leading / basis.leading
            coeffs[d] = c
            rem = rem - basis.scale(c)
        return coeffs

    def _ratio_to_base(self, j: int, offset: int, base: List[int]) -> XPoly:
        # P_{mk+j-offset}(x) / P_{mk+j-mA}(x): each factor telescopes to
        # prod_{s=gamma}^{delta-1} (a x + b - k - s)/(k + s + 1)
        poly: XPoly = [RatFun.one("k")]
        for (a, b), gamma, delta in zip(zip(self.spec.a, self.spec.b),
                                        base, _offset_exponents(self.spec.m, j, offset)):
            for s in range(gamma, delta):
                denominator = _k_linear(s + 1, 1)
                poly = _times_linear(poly, RatFun(a, 1, "k") / denominator,
                                     _k_linear(b - s, -1) / denominator)
        return poly

    def _shifted_to_base(self, j: int, base: List[int]) -> XPoly:
        # P_{mk+j}(x+1) / P_{mk+j-mA}(x); every exponent drops by A
        poly: XPoly = [RatFun.one("k")]
        top = _offset_exponents(self.spec.m, j, 0)
        for (a, b), gamma, delta in zip(zip(self.spec.a, self.spec.b), base, top):
            for t in range(-a, 0):
                poly = _times_linear(poly, RatFun(a, 1, "k"), RatFun(b - t, 1, "k"))
            for s in range(gamma, delta - a):
                poly = _times_linear(poly, RatFun(a, 1, "k"), _k_linear(b - s, -1))
            denominator = RatFun.one("k")
            for u in range(gamma + 1, delta + 1):
                denominator = denominator * _k_linear(u, 1)
            poly = _scaled(poly, denominator.inverse())
        return poly

    def shift_expansion(self) -> List[Tuple[RatFun, ...]]:
        """alpha_{k,j,-i} for j < m and i = 0..mA, by comparing x-coefficients."""
        m, size = self.spec.m, self.spec.mA + 1
        rows = []
        for j in range(m):
            base = _offset_exponents(m, j, self.spec.mA)
            columns = [self._ratio_to_base(j, i, base) for i in range(size)]
            target = self._shifted_to_base(j, base)
            matrix = [[columns[i][d] if d < len(columns[i]) else RatFun.zero("k")
                       for i in range(size)] for d in range(size)]
            rhs = [target[d] if d < len(target) else RatFun.zero("k") for d in range(size)]
            rows.append(tuple(solve_linear_system(matrix, rhs, "k")))
            logger.debug(f"{self.spec.label()}: shift row j={j} solved ({size}x{size})")
        return rows

    def x_expansion(self) -> List[Tuple[RatFun, RatFun]]:
        rows = []
        for a, b in zip(self.spec.a, self.spec.b):
            stay = _k_linear(-b, 1) / a
            up = _k_linear(1, 1) / a
            rows.append((stay, up))
        return rows

    def expansion_table(self) -> ExpansionTable:
        if self._table is None:
            self._table = ExpansionTable(spec=self.spec, shift=tuple(self.shift_expansion()),
                                         x=tuple(self.x_expansion()))
        return self._table

    def check_compatibility(self, kmax: int,
                            table: Optional[ExpansionTable] = None) -> CompatibilityReport:
        """Check deg P_n = n, P_{n-mA} | P_n(x+1), and the table identity for mA <= n <= kmax."""
        mA = self.spec.mA
        if kmax < mA:
            raise ValueError(f"kmax must be at least mA = {mA}, got {kmax}")
        if table is None:
            table = self.expansion_table()
        checks = []
        for n in range(mA, kmax + 1):
            shifted = self.basis_poly(n).shift(1)
            degree_ok = self.basis_poly(n).degree == n
            divides_ok = (shifted % self.basis_poly(n - mA)).is_zero()
            identity_ok, detail = True, None
            k, j = divmod(n, self.spec.m)
            try:
                total = Poly([], "x")
                for i, alpha in enumerate(table.shift[j]):
                    total = total + self.basis_poly(n - i).scale(alpha.evaluate(k))
                identity_ok = total == shifted
                if not identity_ok:
                    detail = f"shift identity fails at n={n}"
            except PoleError as e:
                identity_ok, detail = False, str(e)
            check = CompatibilityCheck(n=n, degree_ok=degree_ok, divides_ok=divides_ok,
                                       identity_ok=identity_ok, detail=detail)
            if not check.passed:
                logger.warning(f"{self.spec.label()}: compatibility check failed at n={n}")
            checks.append(check)
        return CompatibilityReport(spec=self.spec, kmax=kmax, checks=checks)


@lru_cache(maxsize=32)
def expander_for(spec: BasisSpec) -> BasisExpander:
    return BasisExpander(spec)


def basis_poly(spec: BasisSpec, n: int) -> Poly:
    return expander_for(spec).basis_poly(n)


def expand_in_basis(spec: BasisSpec, p: Poly) -> List[Fraction]:
    return expander_for(spec).expand_in_basis(p)


def shift_expansion(spec: BasisSpec) -> List[Tuple[RatFun, ...]]:
    return list(expander_for(spec).expansion_table().shift)


def x_expansion(spec: BasisSpec) -> List[Tuple[RatFun, RatFun]]:
    return expander_for(spec).x_expansion()


def expansion_table(spec: BasisSpec) -> ExpansionTable:
    return expander_for(spec).expansion_table()


def check_compatibility(spec: BasisSpec, kmax: int,
                        table: Optional[ExpansionTable] = None) -> CompatibilityReport:
    return expander_for(spec).check_compatibility(kmax, table)


def apply_polynomial_operator(operator: OreOp, p: Poly) -> Poly:
    """(L·p)(x) = sum_j p_j(x) p(x + j) for L with polynomial coefficients."""
    if not operator.is_zero and operator.low < 0:
        raise ValueError("Operator must not contain negative powers of E")
    if not operator.is_polynomial():
        raise NonPolynomialOperatorError("Operator coefficients must be polynomials")
    p = p.with_var("x")
    total = Poly([], "x")
    for j, coefficient in operator.terms.items():
        total = total + coefficient.num.with_var("x") * p.shift(j)
    return total
