from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exact_arith import RatFun, generalized_binomial, to_rational
from .ore import OpMatrix, OreOp, primitive_form


def _split(value):
    if isinstance(value, str):
        return [part for part in value.replace(" ", "").split(",") if part]
    return value


class BasisSpec(BaseModel):
    """Product binomial-coefficient basis C_{a,b}: P_{mk+j} = prod_{i<=j} C(a_i x+b_i, k+1) prod_{i>j} C(a_i x+b_i, k)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Tuple[int, ...]
    b: Tuple[Fraction, ...]

    @field_validator("a", mode="before")
    @classmethod
    def _parse_a(cls, value):
        return tuple(int(v) for v in _split(value))

    @field_validator("a")
    @classmethod
    def _positive_a(cls, value):
        if not value:
            raise ValueError("at least one binomial factor is required")
        if any(v < 1 for v in value):
            raise ValueError("every a_i must be a positive integer")
        return value

    @field_validator("b", mode="before")
    @classmethod
    def _parse_b(cls, value):
        return tuple(to_rational(v) for v in _split(value))

    @model_validator(mode="after")
    def _same_length(self):
        if len(self.a) != len(self.b):
            raise ValueError(f"a has {len(self.a)} entries but b has {len(self.b)}")
        return self

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def A(self) -> int:
        return max(self.a)

    @property
    def mA(self) -> int:
        return self.m * self.A

    def label(self) -> str:
        a = ",".join(str(v) for v in self.a)
        b = ",".join(str(v) for v in self.b)
        return f"(({a}),({b}))"


class ExpansionTable(BaseModel):
    """Action of E and X on the basis.

    shift[j][i] is alpha_{k,j,-i} for i = 0..mA, the coefficient of P_{mk+j-i}
    in P_{mk+j}(x+1). x[j] holds the coefficients of P_{mk+j} and P_{mk+j+1}
    in x·P_{mk+j}.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: BasisSpec
    shift: Tuple[Tuple[RatFun, ...], ...]
    x: Tuple[Tuple[RatFun, RatFun], ...]

    def alpha(self, j: int, i: int) -> RatFun:
        if i > 0 or -i >= len(self.shift[j]):
            return RatFun.zero("k")
        return self.shift[j][-i]

    def shift_rows(self) -> List[Dict[int, RatFun]]:
        return [{-i: alpha for i, alpha in enumerate(row)} for row in self.shift]

    def x_rows(self) -> List[Dict[int, RatFun]]:
        return [{0: stay, 1: up} for stay, up in self.x]


class KernelSpec(BaseModel):
    """The summation kernel F(n,k) = prod_i C(a_i n + b_i, k)."""

    model_config = ConfigDict(frozen=True)

    spec: BasisSpec

    @property
    def is_terminating(self) -> bool:
        return any(b.denominator == 1 and b >= 0 for b in self.spec.b)

    def termination_bound(self, n: int) -> Optional[int]:
        # C(t, k) = 0 for integers t >= 0 and k > t
        bounds = [a * n + b for a, b in zip(self.spec.a, self.spec.b)
                  if b.denominator == 1 and a * n + b >= 0]
        return int(min(bounds)) if bounds else None

    def tops(self, n: int) -> List[Fraction]:
        return [a * n + b for a, b in zip(self.spec.a, self.spec.b)]

    def value(self, n: int, k: int) -> Fraction:
        result = Fraction(1)
        for top in self.tops(n):
            result *= generalized_binomial(top, k)
        return result


class ReductionResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: BasisSpec
    operator: OreOp
    lprime: OreOp
    column: List[OreOp]
    table: ExpansionTable
    normalization: List[int]
    matrix: Optional[OpMatrix] = None
    diagnostics: List[str] = Field(default_factory=list)

    def primitive_lprime(self) -> OreOp:
        return primitive_form(self.lprime)

    @property
    def is_unit(self) -> bool:
        return self.lprime == OreOp.one(self.lprime.var)

    def column_divisible(self) -> List[bool]:
        if self.lprime.is_zero:
            return [entry.is_zero for entry in self.column]
        return [entry.is_zero or self.lprime.right_divides(entry) for entry in self.column]


class CompatibilityCheck(BaseModel):
    n: int
    degree_ok: bool
    divides_ok: bool
    identity_ok: Optional[bool] = None
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.degree_ok and self.divides_ok and self.identity_ok is not False


class CompatibilityReport(BaseModel):
    spec: BasisSpec
    kmax: int
    checks: List[CompatibilityCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CompatibilityCheck]:
        return [check for check in self.checks if not check.passed]


class VerificationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    passed: bool
    nmax: int
    checked: int
    first_failure: Optional[int] = None
    residual: Optional[Fraction] = None
    values: List[Fraction] = Field(default_factory=list)
    truncated: bool = False
