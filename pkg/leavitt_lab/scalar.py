from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Any

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain

from .errors import DivisionByZero, FieldSpecError

FieldElement = Any

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_MODULAR_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:mod\s+(\d+))?\s*$")
MAX_MODULUS = 2**31


@dataclass(frozen=True)
class Field:
    characteristic: int
    domain: Domain = field(compare=False, hash=False, repr=False)

    @classmethod
    def rational(cls) -> "Field":
        return cls(0, QQ)

    @classmethod
    def modular(cls, p: int) -> "Field":
        if p >= MAX_MODULUS or not isprime(p):
            raise FieldSpecError(f"fp modulus must be a prime below 2^31, got {p}")
        return cls(p, GF(p, symmetric=False))

    @classmethod
    def from_spec(cls, spec: str) -> "Field":
        text = spec.strip().lower()
        if text == "q":
            return cls.rational()
        if text.startswith("fp:") and text[3:].isdigit():
            return cls.modular(int(text[3:]))
        raise FieldSpecError(f"unknown field '{spec}'; use 'q' or 'fp:<prime>'")

    @property
    def spec(self) -> str:
        return "q" if self.characteristic == 0 else f"fp:{self.characteristic}"

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def zero(self) -> FieldElement:
        return self.domain.zero

    @property
    def one(self) -> FieldElement:
        return self.domain.one

    def __call__(self, numerator: int, denominator: int = 1) -> FieldElement:
        if denominator == 0:
            raise DivisionByZero("zero denominator")
        if self.is_rational:
            return QQ(numerator, denominator)
        return self.div(self.domain(numerator), self.domain(denominator))

    def is_zero(self, x: FieldElement) -> bool:
        return not x

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return x + y

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return x * y

    def neg(self, x: FieldElement) -> FieldElement:
        return -x

    def inv(self, x: FieldElement) -> FieldElement:
        if not x:
            raise DivisionByZero(f"0 has no inverse in {self.spec}")
        return self.domain.revert(x)

    def div(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.mul(x, self.inv(y))

    def to_int(self, x: FieldElement) -> int:
        return int(x) % self.characteristic

    def format(self, x: FieldElement) -> str:
        if self.is_rational:
            num, den = int(QQ.numer(x)), int(QQ.denom(x))
            return str(num) if den == 1 else f"{num}/{den}"
        return f"{self.to_int(x)} mod {self.characteristic}"

    def format_coefficient(self, x: FieldElement) -> str:
        """Coefficient text inside element expressions (the field is implied)."""
        if self.is_rational:
            return self.format(x)
        return str(self.to_int(x))

    def parse(self, text: str) -> FieldElement:
        if self.is_rational:
            match = _RATIONAL_RE.fullmatch(text)
            if not match:
                raise FieldSpecError(f"'{text}' is not a rational number")
            return self(int(match.group(1)), int(match.group(2) or 1))
        match = _MODULAR_RE.fullmatch(text)
        if not match:
            raise FieldSpecError(f"'{text}' is not an element of {self.spec}")
        if match.group(2) is not None and int(match.group(2)) != self.characteristic:
            raise FieldSpecError(
                f"'{text}' belongs to fp:{match.group(2)}, not {self.spec}"
            )
        return self(int(match.group(1)))

    def random_nonzero(self, rng: random.Random) -> FieldElement:
        if self.is_rational:
            return self(rng.choice((-2, -1, 1, 2)))
        return self(rng.randrange(1, self.characteristic))

    def random_element(self, rng: random.Random) -> FieldElement:
        if self.is_rational:
            return self(rng.randint(-3, 3), rng.randint(1, 3))
        return self(rng.randrange(self.characteristic))


def field_add(f: Field, x: FieldElement, y: FieldElement) -> FieldElement:
    return f.add(x, y)


def field_mul(f: Field, x: FieldElement, y: FieldElement) -> FieldElement:
    return f.mul(x, y)


def field_neg(f: Field, x: FieldElement) -> FieldElement:
    return f.neg(x)


def field_inv(f: Field, x: FieldElement) -> FieldElement:
    return f.inv(x)
