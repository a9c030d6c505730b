from typing import Dict, List, Mapping, Optional, Sequence

from ..core.errors import NonPolynomialOperatorError
from ..core.exact_arith import Poly, RatFun
from ..core.models import BasisSpec, ExpansionTable, ReductionResult
from ..core.ore import OpMatrix, OreOp, ore_gcrd
from ..utils.logger import logger
from .basis_expander import BasisExpander, expander_for


def section_operators(rows: Sequence[Mapping[int, RatFun]], m: int, var: str = "k") -> OpMatrix:
    """Matrix of section operators for x_n -> sum_i beta_{n,i} x_{n+i}.

    rows[j] maps the band offset i to beta_{k,j,i} (n = mk + j). Entry (r, j) is
    sum over i = r - j (mod m) of beta_{k+d,j,i} E^d with d = (r - i - j)/m.
    """
    entries = [[OreOp.zero(var) for _ in range(m)] for _ in range(m)]
    for j, row in enumerate(rows):
        for i, beta in row.items():
            if beta.is_zero:
                continue
            r = (i + j) % m
            d = (r - i - j) // m
            entries[r][j] = entries[r][j] + OreOp({d: beta.shift(d)}, var)
    return OpMatrix(entries, var)


def build_RE(spec: BasisSpec, table: Optional[ExpansionTable] = None) -> OpMatrix:
    table = table if table is not None else expander_for(spec).expansion_table()
    return section_operators(table.shift_rows(), spec.m)


def build_RX(spec: BasisSpec) -> OpMatrix:
    m = spec.m
    k = RatFun.gen("k")
    entries = [[OreOp.zero() for _ in range(m)] for _ in range(m)]
    for r in range(m):
        for j in range(m):
            a, b = spec.a[j], spec.b[j]
            entry = OreOp.zero()
            if r == j:
                entry = entry + OreOp.scalar((k - b) / a)
            if r == 0 and j == m - 1:
                entry = entry + OreOp({-1: k / a})
            if r == j + 1:
                entry = entry + OreOp.scalar((k + 1) / a)
            entries[r][j] = entry
    return OpMatrix(entries)


def _coefficient_polys(operator: OreOp) -> Dict[int, Poly]:
    if operator.is_zero:
        raise ValueError("Cannot reduce the zero operator")
    if operator.low < 0:
        raise ValueError("Input operator must not contain negative powers of E")
    if not operator.is_polynomial():
        raise NonPolynomialOperatorError(
            f"Input operator must have polynomial coefficients: {operator.render()}")
    return {j: c.num for j, c in operator.terms.items()}


class SectionReducer:
    """Computes the first column of [RL] = sum_j p_j([RX]) [RE]^j and its greatest common right divisor."""

    def __init__(self, expander: BasisExpander, variable: str = "k"):
        self.expander = expander
        self.spec = expander.spec
        self.variable = variable
        self._re: Optional[OpMatrix] = None
        self._rx: Optional[OpMatrix] = None

    @property
    def table(self) -> ExpansionTable:
        return self.expander.expansion_table()

    def build_RE(self) -> OpMatrix:
        if self._re is None:
            self._re = build_RE(self.spec, self.table)
        return self._re

    def build_RX(self) -> OpMatrix:
        if self._rx is None:
            self._rx = build_RX(self.spec)
        return self._rx

    def _horner(self, poly: Poly, vector: List[OreOp]) -> List[OreOp]:
        rx = self.build_RX()
        result = [OreOp.zero() for _ in range(self.spec.m)]
        for c in reversed(poly.coeffs):
            result = [acc + v.scale(c) for acc, v in zip(rx.apply(result), vector)]
        return result

    def first_column(self, operator: OreOp) -> List[OreOp]:
        polys = _coefficient_polys(operator)
        m = self.spec.m
        re = self.build_RE()
        vector = [OreOp.one() if r == 0 else OreOp.zero() for r in range(m)]
        column = [OreOp.zero() for _ in range(m)]
        for j in range(operator.order + 1):
            if j in polys:
                column = [a + b for a, b in zip(column, self._horner(polys[j], vector))]
            if j < operator.order:
                vector = re.apply(vector)
            logger.debug(f"fold step {j}: column orders {[entry.order for entry in column]}")
        return column

    def reduce_first_column(self, operator: OreOp, full_matrix: bool = False) -> ReductionResult:
        logger.info(f"Reducing {operator.render()} over {self.spec.label()}")
        column = self.first_column(operator)
        normalization = [entry.clearing_power() for entry in column]
        nonzero = [entry for entry in column if not entry.is_zero]
        if len(nonzero) == 1 and nonzero[0].clear_negative().order > 0:
            # a single entry keeps its E^-1 terms: they carry the boundary equations at small k
            lprime = nonzero[0].monic()
        else:
            lprime = ore_gcrd(column)
        diagnostics = []
        if lprime.is_zero:
            diagnostics.append("first column vanishes: every sequence h yields a solution")
            logger.warning(f"{self.spec.label()}: first column of the reduced operator is zero")
        elif lprime.order == 0:
            diagnostics.append("reduced operator is 1: only h = 0 yields a solution")
            logger.warning(f"{self.spec.label()}: reduced operator is the unit")
        else:
            logger.info(f"Reduced operator of order {lprime.order}: {lprime.render()}")
        matrix = self.reduce_full_matrix(operator) if full_matrix else None
        var = self.variable
        return ReductionResult(
            spec=self.spec,
            operator=operator,
            lprime=lprime.with_var(var),
            column=[entry.with_var(var) for entry in column],
            table=self.table,
            normalization=normalization,
            matrix=matrix.with_var(var) if matrix is not None else None,
            diagnostics=diagnostics,
        )

    def reduce_full_matrix(self, operator: OreOp) -> OpMatrix:
        polys = _coefficient_polys(operator)
        m = self.spec.m
        rx, re = self.build_RX(), self.build_RE()
        power = OpMatrix.identity(m)
        result = OpMatrix.zero(m)
        for j in range(operator.order + 1):
            if j in polys:
                term = OpMatrix.zero(m)
                for c in reversed(polys[j].coeffs):
                    term = rx * term + power.scale(c)
                result = result + term
            if j < operator.order:
                power = re * power
        return result


def reduce_first_column(operator: OreOp, spec: BasisSpec, variable: str = "k") -> ReductionResult:
    return SectionReducer(expander_for(spec), variable).reduce_first_column(operator)


def reduce_full_matrix(operator: OreOp, spec: BasisSpec) -> OpMatrix:
    return SectionReducer(expander_for(spec)).reduce_full_matrix(operator)
