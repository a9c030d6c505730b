from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Union

from ..core.errors import (InconsistentInitialDataError, InsufficientInitialDataError,
                           InsufficientTermsError, MissingTruncationError,
                           NonPolynomialOperatorError, SectionIndexError)
from ..core.exact_arith import to_rational
from ..core.models import KernelSpec, VerificationReport
from ..core.ore import OreOp
from ..utils.logger import logger


class Sequence:
    """A finite prefix c_0..c_{N-1} of a rational sequence; c_i = 0 for i < 0."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable = ()):
        self._values: List[Fraction] = [to_rational(v) for v in values]

    @classmethod
    def from_function(cls, f: Callable[[int], object], length: int) -> "Sequence":
        return cls(f(i) for i in range(length))

    def __getitem__(self, index: int) -> Fraction:
        if index < 0:
            return Fraction(0)
        if index >= len(self._values):
            raise InsufficientTermsError(index + 1, len(self._values))
        return self._values[index]

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self._values)

    def append(self, value) -> None:
        self._values.append(to_rational(value))

    @property
    def values(self) -> tuple:
        return tuple(self._values)

    def prefix(self, length: int) -> "Sequence":
        return Sequence(self._values[:length])

    def perturbed(self, index: int, delta=1) -> "Sequence":
        values = list(self._values)
        values[index] += to_rational(delta)
        return Sequence(values)

    def __eq__(self, other) -> bool:
        if isinstance(other, Sequence):
            return self._values == other._values
        if isinstance(other, (list, tuple)):
            return self._values == [to_rational(v) for v in other]
        return NotImplemented

    def __repr__(self) -> str:
        return f"Sequence({[str(v) for v in self._values]})"


SequenceLike = Union[Sequence, List, tuple]


def _as_sequence(values: SequenceLike) -> Sequence:
    return values if isinstance(values, Sequence) else Sequence(values)


def msection(c: SequenceLike, m: int, j: int) -> Sequence:
    """The j-th m-section k -> c_{mk+j}."""
    if m < 1 or not 0 <= j < m:
        raise SectionIndexError(f"Section index j={j} outside 0..{m - 1}")
    c = _as_sequence(c)
    return Sequence(c.values[j::m])


def sections_of(c: SequenceLike, m: int) -> List[Sequence]:
    return [msection(c, m, j) for j in range(m)]


def interlace(sections: Iterable[SequenceLike]) -> Sequence:
    """Inverse of taking all m-sections: c_{mk+j} = sections[j][k]."""
    parts = [_as_sequence(s) for s in sections]
    if not parts:
        raise SectionIndexError("Cannot interlace an empty list of sections")
    m = len(parts)
    out = []
    n = 0
    while n // m < len(parts[n % m]):
        out.append(parts[n % m][n // m])
        n += 1
    return Sequence(out)


def unroll(lprime: OreOp, initial: Iterable, upto: int) -> Sequence:
    """Extend initial data h_0.. through the recurrence (L'h)_k = 0 for all k >= 0.

    Negative exponents in L' read entries with negative index as 0. When the
    leading coefficient vanishes at k the equation becomes a consistency
    check and h_{k+order} must come from the initial data.
    """
    if lprime.is_zero:
        raise ValueError("Cannot unroll the zero operator")
    initial = [to_rational(v) for v in initial]
    order = lprime.order
    lead = lprime.leading_coefficient
    rest = OreOp({i: c for i, c in lprime.terms.items() if i != order}, lprime.var)
    h = Sequence(initial)
    k = 0
    while len(h) < upto + 1 or k + order < len(h):
        index = k + order
        if index > len(h):
            raise InsufficientTermsError(index, len(h))
        lead_value = lead.evaluate(k)
        residual_part = rest.apply(h, k)
        if index < len(h):
            residual = residual_part + lead_value * h[index]
            if residual != 0:
                raise InconsistentInitialDataError(k, residual)
        elif lead_value == 0:
            if residual_part != 0:
                raise InconsistentInitialDataError(k, residual_part)
            raise InsufficientInitialDataError(index, k)
        else:
            h.append(-residual_part / lead_value)
        k += 1
    return h.prefix(upto + 1)


def eval_sum(kernel: KernelSpec, h: SequenceLike, n: int, truncation: Optional[int] = None) -> Fraction:
    """y_n = sum_k prod_i C(a_i n + b_i, k) h_k."""
    h = _as_sequence(h)
    bound = kernel.termination_bound(n)
    if bound is None:
        if truncation is None:
            raise MissingTruncationError(
                f"Sum for n={n} does not terminate; a truncation bound is required")
        upper = truncation
    else:
        upper = bound if truncation is None else min(bound, truncation)
    tops = kernel.tops(n)
    total = Fraction(0)
    weights = [Fraction(1)] * len(tops)
    for k in range(upper + 1):
        if k > 0:
            weights = [w * (t - (k - 1)) / k for w, t in zip(weights, tops)]
        term = Fraction(1)
        for w in weights:
            term *= w
        if term != 0:
            total += term * h[k]
    return total


def required_terms(kernel: KernelSpec, nmax: int, order: int = 0,
                   truncation: Optional[int] = None) -> int:
    """Length of the h prefix needed to evaluate y_0..y_{nmax+order}."""
    longest = 0
    for n in range(nmax + order + 1):
        bound = kernel.termination_bound(n)
        if bound is None:
            bound = truncation if truncation is not None else 0
        elif truncation is not None:
            bound = min(bound, truncation)
        longest = max(longest, bound)
    return longest + 1


def verify_solution(operator: OreOp, kernel: KernelSpec, h: SequenceLike, nmax: int,
                    truncation: Optional[int] = None) -> VerificationReport:
    """Check (L y)_n = 0 for 0 <= n <= nmax with y_n the definite sum over h."""
    if operator.is_zero or operator.low < 0:
        raise ValueError("Verification needs a nonzero operator without negative powers of E")
    if not operator.is_polynomial():
        raise NonPolynomialOperatorError("Operator coefficients must be polynomials")
    h = _as_sequence(h)
    order = operator.order
    truncated = any(kernel.termination_bound(n) is None for n in range(nmax + order + 1))
    if truncated and truncation is None:
        raise MissingTruncationError("Verification over a non-terminating kernel needs a truncation bound")
    if truncated:
        logger.warning(f"Sums are truncated at k={truncation}; the kernel does not terminate")
    needed = required_terms(kernel, nmax, order, truncation)
    if len(h) < needed:
        raise InsufficientTermsError(needed, len(h))

    ys = Sequence(eval_sum(kernel, h, n, truncation) for n in range(nmax + order + 1))
    for n in range(nmax + 1):
        residual = operator.apply(ys, n)
        if residual != 0:
            logger.warning(f"Verification failed at n={n} (residual {residual})")
            return VerificationReport(passed=False, nmax=nmax, checked=n + 1, first_failure=n,
                                      residual=residual, values=list(ys), truncated=truncated)
    logger.info(f"Verified {operator.render()} for n=0..{nmax}")
    return VerificationReport(passed=True, nmax=nmax, checked=nmax + 1,
                              values=list(ys), truncated=truncated)


class SolutionOracle:
    """Numeric side of the pipeline: unrolls L' and checks the resulting definite sums against L."""

    def __init__(self, kernel: KernelSpec, default_nmax: int = 15):
        self.kernel = kernel
        self.default_nmax = default_nmax

    def required_terms(self, operator: OreOp, nmax: Optional[int] = None,
                       truncation: Optional[int] = None) -> int:
        nmax = self.default_nmax if nmax is None else nmax
        return required_terms(self.kernel, nmax, operator.order or 0, truncation)

    def unroll(self, lprime: OreOp, initial: Iterable, upto: int) -> Sequence:
        return unroll(lprime, initial, upto)

    def eval_sum(self, h: SequenceLike, n: int, truncation: Optional[int] = None) -> Fraction:
        return eval_sum(self.kernel, h, n, truncation)

    def verify(self, operator: OreOp, h: SequenceLike, nmax: Optional[int] = None,
               truncation: Optional[int] = None) -> VerificationReport:
        nmax = self.default_nmax if nmax is None else nmax
        return verify_solution(operator, self.kernel, h, nmax, truncation)
