"""Concrete syntax for recurrence operators sum p_j(n) E^j.

Grammar (whitespace insignificant, no implicit multiplication)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' exponent)?
    exponent := uint | '(' '-'? uint ')' | '-' uint
    base     := 'E' | symbol | uint | '(' expr ')' | '-' factor

``^`` binds tighter than ``*`` and ``/``, which bind tighter than ``+``/``-``.
Unary minus applies to a whole factor.
"""

import json
import re
from dataclasses import dataclass
from typing import List, Optional, Union

from ..core.errors import OperatorSyntaxError
from ..core.exact_arith import Poly, RatFun, rational_text
from ..core.ore import OreOp

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])|(?P<bad>\S))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


@dataclass(frozen=True)
class Number:
    value: int
    position: int


@dataclass(frozen=True)
class Symbol:
    name: str
    position: int


@dataclass(frozen=True)
class Shift:
    position: int


@dataclass(frozen=True)
class Negate:
    operand: "Node"
    position: int


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Node"
    right: "Node"
    position: int


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int
    position: int


Node = Union[Number, Symbol, Shift, Negate, BinaryOp, Power]


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        kind = match.lastgroup
        start = match.start(kind)
        if kind == "bad":
            raise OperatorSyntaxError(f"Unexpected character '{match.group(kind)}'", start, text)
        tokens.append(Token(kind, match.group(kind), start))
        position = match.end()
    tokens.append(Token("end", "", len(stripped)))
    return tokens


class OperatorParser:
    """Recursive-descent parser producing an AST; symbols are checked against the variable."""

    def __init__(self, text: str, variable: str = "n"):
        self.text = text
        self.variable = variable
        self.symbols = {variable, "x"} if variable == "n" else {variable}
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None):
        token = token or self.current
        raise OperatorSyntaxError(message, token.position, self.text)

    def _expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind != "op":
            found = self.current.text or "end of input"
            self._error(f"Expected '{text}' but found '{found}'")
        return self._advance()

    def parse(self) -> Node:
        if self.current.kind == "end":
            self._error("Empty operator expression")
        node = self.expr()
        if self.current.kind != "end":
            self._error(f"Unexpected token '{self.current.text}'")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            token = self._advance()
            node = BinaryOp(token.text, node, self.term(), token.position)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            token = self._advance()
            node = BinaryOp(token.text, node, self.factor(), token.position)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.current.kind == "op" and self.current.text == "^":
            token = self._advance()
            node = Power(node, self.exponent(), token.position)
        return node

    def exponent(self) -> int:
        if self.current.kind == "op" and self.current.text == "(":
            self._advance()
            sign = 1
            if self.current.kind == "op" and self.current.text == "-":
                self._advance()
                sign = -1
            value = self._exponent_digits()
            self._expect(")")
            return sign * value
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return -self._exponent_digits()
        return self._exponent_digits()

    def _exponent_digits(self) -> int:
        token = self.current
        if token.kind != "number":
            found = token.text or "end of input"
            self._error(f"Exponent must be an integer, found '{found}'")
        self._advance()
        return int(token.text)

    def base(self) -> Node:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Number(int(token.text), token.position)
        if token.kind == "name":
            self._advance()
            if token.text == "E":
                return Shift(token.position)
            if token.text in self.symbols:
                return Symbol(token.text, token.position)
            self._error(f"Unknown symbol '{token.text}'", token)
        if token.kind == "op" and token.text == "(":
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        if token.kind == "op" and token.text == "-":
            self._advance()
            return Negate(self.factor(), token.position)
        found = token.text or "end of input"
        self._error(f"Unexpected token '{found}'")


def _normalize(node: Node, parser: OperatorParser, var: str,
               allow_rational: bool, allow_negative: bool) -> OreOp:
    def walk(n: Node) -> OreOp:
        if isinstance(n, Number):
            return OreOp.scalar(n.value, var)
        if isinstance(n, Symbol):
            return OreOp.scalar(Poly.gen(var), var)
        if isinstance(n, Shift):
            return OreOp.shift_op(1, var)
        if isinstance(n, Negate):
            return -walk(n.operand)
        if isinstance(n, Power):
            if n.exponent >= 0:
                return walk(n.base) ** n.exponent
            if not isinstance(n.base, Shift):
                raise OperatorSyntaxError("Negative exponents are only allowed on E",
                                          n.position, parser.text)
            if not allow_negative:
                raise OperatorSyntaxError("Negative exponent on E", n.position, parser.text)
            return OreOp.shift_op(n.exponent, var)
        left, right = walk(n.left), walk(n.right)
        if n.op == "+":
            return left + right
        if n.op == "-":
            return left - right
        if n.op == "*":
            return left * right
        if right.is_zero:
            raise OperatorSyntaxError("Division by zero", n.position, parser.text)
        if set(right.terms) != {0}:
            raise OperatorSyntaxError("Divisor must not contain E", n.position, parser.text)
        divisor = right.coefficient(0)
        if not divisor.is_constant and not allow_rational:
            raise OperatorSyntaxError("Division by a non-constant expression", n.position, parser.text)
        return left * OreOp.scalar(divisor.inverse(), var)

    return walk(node)


def parse_operator(text: str, variable: str = "n", allow_rational: bool = False,
                   allow_negative: bool = False) -> OreOp:
    """Parse text into a normalized operator sum p_j(variable) E^j."""
    parser = OperatorParser(text, variable)
    return _normalize(parser.parse(), parser, variable, allow_rational, allow_negative)


def _poly_latex(poly: Poly) -> str:
    return poly.render().replace("*", "")


def _coefficient_latex(value: RatFun) -> str:
    num_content, top = value.num.content_and_primitive()
    den_content, bottom = value.den.content_and_primitive()
    content = abs(num_content / den_content)
    p, q = content.numerator, content.denominator
    top_text = str(p) if top.is_constant() else (
        _poly_latex(top) if p == 1 else f"{p}({_poly_latex(top)})")
    if bottom.is_constant() and q == 1:
        return top_text
    bottom_text = str(q) if bottom.is_constant() else (
        _poly_latex(bottom) if q == 1 else f"{q}({_poly_latex(bottom)})")
    return f"\\frac{{{top_text}}}{{{bottom_text}}}"


def _latexish(op: OreOp) -> str:
    if op.is_zero:
        return "0"
    parts = []
    for exponent in sorted(op.terms, reverse=True):
        coefficient = op.terms[exponent]
        negative = coefficient.is_negative()
        body = _coefficient_latex(coefficient)
        shift = "" if exponent == 0 else (f"E_{op.var}" if exponent == 1 else f"E_{op.var}^{{{exponent}}}")
        if shift:
            if body == "1":
                body = shift
            elif not body.startswith("\\frac") and ("+" in body or "-" in body):
                body = f"({body}){shift}"
            else:
                body = f"{body}{shift}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts)


def operator_document(op: OreOp) -> dict:
    """JSON-ready description of an operator; rationals as "p/q" strings."""
    terms = []
    for exponent in sorted(op.terms, reverse=True):
        coefficient = op.terms[exponent]
        terms.append({
            "shift": exponent,
            "coefficient": coefficient.render(),
            "numerator": [rational_text(c) for c in coefficient.num.coeffs],
            "denominator": [rational_text(c) for c in coefficient.den.coeffs],
        })
    return {
        "variable": op.var,
        "text": op.render(),
        "order": op.order,
        "low": op.low,
        "terms": terms,
    }


def print_operator(op: OreOp, style: str = "text") -> str:
    if style == "text":
        return op.render()
    if style == "json":
        return json.dumps(operator_document(op))
    if style == "latexish":
        return _latexish(op)
    raise ValueError(f"Unknown operator style: {style}")
