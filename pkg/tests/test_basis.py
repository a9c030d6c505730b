import random
from fractions import Fraction
from math import comb

import pytest
from pydantic import ValidationError

from src.core.exact_arith import Poly, RatFun
from src.core.models import BasisSpec, ExpansionTable, KernelSpec
from src.core.ore import OreOp
from src.engines.basis_expander import (BasisExpander, apply_polynomial_operator,
                                        binomial_poly, expander_for)
from src.interfaces.operator_syntax import parse_operator


def _k(coeffs):
    return Poly(coeffs, "k")


class TestBasisSpec:

    def test_parses_comma_separated_values(self):
        spec = BasisSpec(a="1,1", b="0, -1/2")
        assert spec.a == (1, 1)
        assert spec.b == (Fraction(0), Fraction(-1, 2))
        assert spec.m == 2
        assert spec.mA == 2
        assert spec.label() == "((1,1),(0,-1/2))"

    def test_dimensions(self):
        spec = BasisSpec(a=[2, 3], b=[0, 0])
        assert spec.A == 3
        assert spec.mA == 6

    def test_rejects_nonpositive_a(self):
        with pytest.raises(ValidationError):
            BasisSpec(a="0,1", b="0,0")
        with pytest.raises(ValidationError):
            BasisSpec(a="", b="")

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValidationError):
            BasisSpec(a="1,1", b="0")

    def test_specs_are_hashable(self):
        assert hash(BasisSpec(a="1,1", b="0,0")) == hash(BasisSpec(a=[1, 1], b=[0, 0]))
        assert expander_for(BasisSpec(a="1,1", b="0,0")) is expander_for(BasisSpec(a=[1, 1], b=[0, 0]))


class TestKernelSpec:

    def test_termination(self):
        assert KernelSpec(spec=BasisSpec(a="1", b="0")).is_terminating
        kernel = KernelSpec(spec=BasisSpec(a="1", b="1/2"))
        assert not kernel.is_terminating
        assert kernel.termination_bound(4) is None

    def test_bound_uses_smallest_nonnegative_integer_top(self):
        kernel = KernelSpec(spec=BasisSpec(a="1,2", b="0,-1"))
        assert kernel.termination_bound(3) == 3
        assert kernel.termination_bound(0) == 0

    def test_value(self):
        kernel = KernelSpec(spec=BasisSpec(a="1,2", b="0,-1"))
        assert kernel.value(3, 2) == 30
        assert kernel.value(3, 4) == 0


class TestBasisPolynomials:

    def setup_method(self):
        self.rng = random.Random(42)
        self.x = Poly.gen("x")

    def test_binomial_poly(self):
        assert binomial_poly(1, Fraction(0), 2) == (self.x * self.x - self.x).scale(Fraction(1, 2))
        assert binomial_poly(3, Fraction(1), 0) == 1

    def test_product_basis(self):
        square = BasisExpander(BasisSpec(a="1,1", b="0,0"))
        assert square.basis_poly(2) == self.x * self.x
        assert square.exponents(3) == [2, 1]
        mixed = BasisExpander(BasisSpec(a="2,3", b="0,0"))
        assert mixed.basis_poly(3) == Poly([0, 0, -3, 6], "x")

    def test_degrees(self):
        expander = BasisExpander(BasisSpec(a="2,3", b="-1,4"))
        for n in range(12):
            assert expander.basis_poly(n).degree == n

    def test_negative_index(self):
        with pytest.raises(ValueError):
            BasisExpander(BasisSpec(a="1", b="0")).basis_poly(-1)

    def test_expand_in_basis(self):
        expander = BasisExpander(BasisSpec(a="1,1", b="0,0"))
        assert expander.expand_in_basis(self.x ** 3) == [0, 0, 1, 2]
        assert expander.expand_in_basis(Poly([], "x")) == []

    def test_expansion_reconstructs_random_polynomials(self):
        expander = BasisExpander(BasisSpec(a="2,1", b="1/2,-3"))
        for _ in range(10):
            p = Poly([Fraction(self.rng.randint(-6, 6), self.rng.randint(1, 3))
                      for _ in range(self.rng.randint(1, 6))], "x")
            total = Poly([], "x")
            for n, c in enumerate(expander.expand_in_basis(p)):
                total = total + expander.basis_poly(n).scale(c)
            assert total == p


MIXED_ROWS = [
    ["1", "6", "3*(7*k-3)/(2*k)", "(131*k-64)/(12*k)",
     "(211*k^2-374*k+120)/(36*(k-1)*k)", "2*(2*k-3)/(9*(k-1))", "0"],
    ["1", "2*(2*k+1)/(k+1)", "(17*k+7)/(2*(k+1))", "(131*k^2-6*k-17)/(18*k*(k+1))",
     "2*(10*k^2-6*k-1)/(9*k*(k+1))", "4*(k-2)*(2*k-3)/(27*(k-1)*(k+1))",
     "-2*k*(2*k-3)/(27*(k-1)*(k+1))"],
]

SHIFTED_ROWS = [
    ["1", "6", "(21*k+13)/(2*k)", "(131*k-97)/(12*k)",
     "(211*k^2+330*k+791)/(36*(k-1)*k)", "2*(k-7)*(2*k-11)/(9*(k-1)*k)", "0"],
    ["1", "2*(2*k+1)/(k+1)", "(17*k-15)/(2*(k+1))", "(131*k^2-39*k+214)/(18*k*(k+1))",
     "4*(5*k^2-47*k+104)/(9*k*(k+1))", "4*(k-7)*(k-2)*(2*k-11)/(27*(k-1)*k*(k+1))",
     "-2*(k-7)*(k+11)*(2*k-11)/(27*(k-1)*k*(k+1))"],
]

EQUAL_ROWS = [
    ["1", "8", "4*(7*k-3)/k", "28*(2*k-1)/k", "2*(35*k^2-63*k+22)/((k-1)*k)",
     "8*(7*k^2-14*k+5)/((k-1)*k)", "4*(7*k^3-28*k^2+32*k-9)/((k-2)*(k-1)*k)",
     "4*(2*k-3)*(k^2-3*k+1)/((k-2)*(k-1)*k)", "1"],
    ["1", "4*(2*k+1)/(k+1)", "4*(7*k+3)/(k+1)", "8*(7*k^2-1)/(k*(k+1))",
     "2*(35*k^2-7*k-6)/(k*(k+1))", "4*(2*k-1)*(7*k^2-7*k-2)/((k-1)*k*(k+1))",
     "4*(7*k^3-14*k^2+4*k+1)/((k-1)*k*(k+1))", "8*(k-1)/(k+1)", "(k-3)/(k+1)"],
]

SQUARE_ROWS = [
    ["1", "2", "1"],
    ["1", "(2*k+1)/(k+1)", "k/(k+1)"],
]

TABLE_SPECS = [("1,1", "0,0"), ("2,3", "0,0"), ("2,3", "-1,4"), ("4,4", "0,0")]


def _rf(text: str) -> RatFun:
    return parse_operator(text, variable="k", allow_rational=True).coefficient(0)


class TestExpansionTable:

    @pytest.mark.parametrize("a,b,rows", [
        ("1,1", "0,0", SQUARE_ROWS),
        ("2,3", "0,0", MIXED_ROWS),
        ("2,3", "-1,4", SHIFTED_ROWS),
        ("4,4", "0,0", EQUAL_ROWS),
    ])
    def test_rows_match_known_expansions(self, a, b, rows):
        table = BasisExpander(BasisSpec(a=a, b=b)).expansion_table()
        for j, expected in enumerate(rows):
            assert len(table.shift[j]) == len(expected)
            for i, text in enumerate(expected):
                assert table.shift[j][i] == _rf(text), f"j={j}, i={i}"

    def test_squared_binomials_x_row(self):
        table = BasisExpander(BasisSpec(a="1,1", b="0,0")).expansion_table()
        k = _k([0, 1])
        assert table.x[0] == (RatFun(k, 1), RatFun(_k([1, 1]), 1))

    def test_mixed_factors_value(self):
        table = BasisExpander(BasisSpec(a="2,3", b="0,0")).expansion_table()
        assert table.shift[0][3].evaluate(2) == Fraction(33, 4)

    def test_shifted_factors(self):
        table = BasisExpander(BasisSpec(a="2,3", b="-1,4")).expansion_table()
        # P_{2k-1} and P_{2k-2} in the expansion of P_{2k+1}(x+1)
        assert table.shift[1][2] == RatFun(_k([-15, 17]), _k([2, 2]))
        assert table.shift[1][3] == RatFun(_k([214, -39, 131]), _k([0, 18, 18]))
        assert table.x[1] == (RatFun(_k([-4, 1]), 3), RatFun(_k([1, 1]), 3))

    @pytest.mark.parametrize("a,b", TABLE_SPECS)
    def test_leading_coefficients_are_one(self, a, b):
        table = BasisExpander(BasisSpec(a=a, b=b)).expansion_table()
        assert all(row[0] == 1 for row in table.shift)

    @pytest.mark.parametrize("a,b", TABLE_SPECS)
    def test_expansion_identity_at_small_k(self, a, b):
        spec = BasisSpec(a=a, b=b)
        expander = BasisExpander(spec)
        table = expander.expansion_table()
        m, mA = spec.m, spec.mA
        for k0 in range(mA, mA + 6):
            for j in range(m):
                n = m * k0 + j
                total = Poly([], "x")
                for i, alpha in enumerate(table.shift[j]):
                    total = total + expander.basis_poly(n - i).scale(alpha.evaluate(k0))
                assert total == expander.basis_poly(n).shift(1)

    @pytest.mark.parametrize("a,b", [(1, 0), (2, 0), (3, 1), (2, "1/2")])
    def test_single_factor_rows_are_binomials(self, a, b):
        table = BasisExpander(BasisSpec(a=[a], b=[b])).expansion_table()
        assert list(table.shift[0]) == [comb(a, i) for i in range(a + 1)]

    def test_table_accessors(self):
        table = BasisExpander(BasisSpec(a="1,1", b="0,0")).expansion_table()
        assert table.alpha(0, -1) == 2
        assert table.alpha(0, -5).is_zero
        assert table.shift_rows()[0][-2] == 1
        assert set(table.x_rows()[1]) == {0, 1}


class TestCompatibility:

    @pytest.mark.parametrize("a,b", TABLE_SPECS)
    def test_known_bases_pass(self, a, b):
        spec = BasisSpec(a=a, b=b)
        report = BasisExpander(spec).check_compatibility(24)
        assert report.passed
        assert report.checks[0].n == spec.mA
        assert report.checks[-1].n == 24
    def test_corrupted_table_fails(self):
        spec = BasisSpec(a="2,3", b="-1,4")
        expander = BasisExpander(spec)
        table = expander.expansion_table()
        row = list(table.shift[0])
        row[1] = row[1] + 1
        corrupted = ExpansionTable(spec=spec, shift=(tuple(row), table.shift[1]), x=table.x)
        report = expander.check_compatibility(12, corrupted)
        assert not report.passed
        assert all(check.n % 2 == 0 for check in report.failures())
        assert all(check.degree_ok and check.divides_ok for check in report.failures())

    def test_kmax_below_band(self):
        with pytest.raises(ValueError):
            BasisExpander(BasisSpec(a="2,3", b="0,0")).check_compatibility(5)


class TestPolynomialOperator:

    def test_shift_difference(self):
        op = OreOp({1: 1, 0: -1}, "n")
        assert apply_polynomial_operator(op, Poly([0, 0, 1], "x")) == Poly([1, 2], "x")

    def test_rejects_laurent_operator(self):
        with pytest.raises(ValueError):
            apply_polynomial_operator(OreOp({-1: 1}, "n"), Poly([1], "x"))


if __name__ == "__main__":
    pytest.main([__file__])
