from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import Element, LeavittAlgebra
from .errors import ExpressionSyntaxError, FieldSpecError, UnknownIdentifier
from .validation import IDENTIFIER_MAX_LENGTH

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<ghost>\^\*)|(?P<op>[-+*/.()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            column = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ExpressionSyntaxError(f"unexpected character {text[column - 1]!r}", column=column)
        kind = match.lastgroup or "op"
        value = match.group(kind)
        tokens.append(Token(kind, value, match.start(kind) + 1))
        pos = match.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, algebra: LeavittAlgebra, text: str) -> None:
        self.algebra = algebra
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.text == text and self.current.kind in ("op", "ghost"):
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.fail(f"expected '{text}'")

    def fail(self, message: str) -> None:
        token = self.current
        found = "end of input" if token.kind == "end" else f"'{token.text}'"
        raise ExpressionSyntaxError(f"{message}, found {found}", column=token.column)

    def parse(self) -> Element:
        total = self.term()
        while self.current.kind != "end":
            if self.accept("+"):
                total = total + self.term()
            elif self.accept("-"):
                total = total - self.term()
            else:
                self.fail("expected '+' or '-'")
        return total

    def term(self) -> Element:
        negative = False
        while self.current.text in ("+", "-") and self.current.kind == "op":
            negative ^= self.advance().text == "-"
        if self.current.kind == "int":
            coefficient = self.coefficient()
            if self.accept("*"):
                value = self.algebra.scalar_mul(coefficient, self.monomial())
            else:
                value = self.algebra.scalar_mul(coefficient, self.algebra.unit())
        else:
            value = self.monomial()
        return -value if negative else value

    def coefficient(self) -> object:
        numerator = self.advance()
        text = numerator.text
        if self.accept("/"):
            if self.current.kind != "int":
                self.fail("expected a denominator")
            text = f"{text}/{self.advance().text}"
        field = self.algebra.field
        try:
            if field.is_rational:
                return field.parse(text)
            num, _, den = text.partition("/")
            return field(int(num), int(den or 1))
        except (FieldSpecError, ZeroDivisionError) as exc:
            raise ExpressionSyntaxError(str(exc), column=numerator.column) from exc

    def monomial(self) -> Element:
        value = self.factor()
        while self.accept("."):
            value = self.algebra.mul(value, self.factor())
        return value

    def factor(self) -> Element:
        if self.accept("("):
            value = self.generator(self.identifier())
            while self.accept("."):
                value = self.algebra.mul(value, self.generator(self.identifier()))
            self.expect(")")
            self.expect("^*")
            return self.algebra.star(value)
        value = self.generator(self.identifier())
        if self.accept("^*"):
            value = self.algebra.star(value)
        return value

    def identifier(self) -> Token:
        if self.current.kind != "ident":
            self.fail("expected an identifier")
        token = self.advance()
        if len(token.text) > IDENTIFIER_MAX_LENGTH:
            raise ExpressionSyntaxError(
                f"identifier longer than {IDENTIFIER_MAX_LENGTH} characters", column=token.column
            )
        return token

    def generator(self, token: Token) -> Element:
        graph = self.algebra.graph
        if graph.has_vertex(token.text):
            return self.algebra.vertex(token.text)
        if graph.has_edge(token.text):
            return self.algebra.edge(token.text)
        raise UnknownIdentifier(f"column {token.column}: unknown identifier '{token.text}'")


def parse_element(algebra: LeavittAlgebra, text: str) -> Element:
    if not text.strip():
        raise ExpressionSyntaxError("empty expression", column=1)
    if text.strip() == "0":
        return algebra.zero()
    return _Parser(algebra, text).parse()
