import os
from typing import Iterable, Optional, Tuple

from dotenv import load_dotenv

from ..core.models import (BasisSpec, CompatibilityReport, ExpansionTable, KernelSpec,
                           ReductionResult, VerificationReport)
from ..core.ore import OreOp
from ..engines.basis_expander import BasisExpander
from ..engines.section_reducer import SectionReducer
from ..engines.solution_oracle import Sequence, SolutionOracle
from ..utils.logger import logger

load_dotenv()


class DefiniteSumSolver:
    """Finds sequences h such that sum_k prod_i C(a_i n + b_i, k) h_k solves L y = 0."""

    def __init__(self, spec: BasisSpec, variable: Optional[str] = None,
                 default_nmax: Optional[int] = None):
        self.spec = spec
        self.variable = variable or os.getenv("DEFINITE_SUMS_OUTPUT_VARIABLE", "k")
        self.default_nmax = default_nmax if default_nmax is not None else int(
            os.getenv("DEFINITE_SUMS_NMAX", "15"))

        self.expander = BasisExpander(spec)
        self.reducer = SectionReducer(self.expander, self.variable)
        self.oracle = SolutionOracle(KernelSpec(spec=spec), self.default_nmax)

    def expansion_table(self) -> ExpansionTable:
        return self.expander.expansion_table()

    def check_compatibility(self, kmax: int) -> CompatibilityReport:
        return self.expander.check_compatibility(kmax)

    def reduce(self, operator: OreOp, full_matrix: bool = False) -> ReductionResult:
        return self.reducer.reduce_first_column(operator, full_matrix=full_matrix)

    def unroll(self, lprime: OreOp, initial: Iterable, upto: int) -> Sequence:
        return self.oracle.unroll(lprime, initial, upto)

    def verify(self, operator: OreOp, h, nmax: Optional[int] = None,
               truncation: Optional[int] = None) -> VerificationReport:
        return self.oracle.verify(operator, h, nmax, truncation)

    def solve_and_verify(self, operator: OreOp, initial: Iterable, nmax: Optional[int] = None,
                         truncation: Optional[int] = None
                         ) -> Tuple[ReductionResult, Sequence, VerificationReport]:
        """Reduce L, unroll L' from the initial data and check the resulting sums against L."""
        nmax = self.default_nmax if nmax is None else nmax
        result = self.reduce(operator)
        if result.lprime.is_zero:
            raise ValueError("Reduced operator is zero; any sequence h is a solution")
        upto = self.oracle.required_terms(operator, nmax, truncation) - 1
        h = self.unroll(result.lprime, initial, upto)
        report = self.verify(operator, h, nmax, truncation)
        logger.info(f"solve_and_verify over {self.spec.label()}: "
                    f"{'passed' if report.passed else 'failed'}")
        return result, h, report
