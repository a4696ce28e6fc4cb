from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from cumulanttools.common import InvalidInput, format_rational, parse_rational

Word = tuple[str, ...]
Scalar = Union[Fraction, int]


@dataclass(frozen=True)
class NCPolynomial:
    """
    Noncommutative polynomial: a finite sum of coefficient * word.

    The empty word is the scalar unit. Zero coefficients are dropped, so two
    equal polynomials have equal term maps.
    """

    terms: Mapping[Word, Fraction]

    def __post_init__(self) -> None:
        cleaned = {}
        for word, coefficient in self.terms.items():
            coefficient = Fraction(coefficient)
            if coefficient:
                cleaned[tuple(word)] = coefficient
        object.__setattr__(self, "terms", cleaned)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @classmethod
    def generator(cls, label: str) -> NCPolynomial:
        return cls({(label,): Fraction(1)})

    @classmethod
    def scalar(cls, value: Scalar) -> NCPolynomial:
        return cls({(): Fraction(value)})

    @classmethod
    def word(cls, letters: Sequence[str], coefficient: Scalar = 1) -> NCPolynomial:
        return cls({tuple(letters): Fraction(coefficient)})

    @classmethod
    def linear(cls, coefficients: Sequence[Scalar], labels: Sequence[str]) -> NCPolynomial:
        """sum_i c_i X_i."""
        if len(coefficients) != len(labels):
            raise InvalidInput("coefficient and label counts differ.")
        return cls.total(
            cls.generator(label) * c for c, label in zip(coefficients, labels)
        )

    @classmethod
    def total(cls, parts: Iterable[NCPolynomial]) -> NCPolynomial:
        out: dict[Word, Fraction] = {}
        for part in parts:
            for word, coefficient in part.terms.items():
                out[word] = out.get(word, Fraction(0)) + coefficient
        return cls(out)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((len(word) for word in self.terms), default=0)

    @property
    def generators(self) -> frozenset[str]:
        return frozenset(label for word in self.terms for label in word)

    def _coerce(self, other: NCPolynomial | Scalar) -> NCPolynomial:
        if isinstance(other, NCPolynomial):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return NCPolynomial.scalar(other)
        return NotImplemented

    def __add__(self, other: NCPolynomial | Scalar) -> NCPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return NCPolynomial.total((self, other))

    __radd__ = __add__

    def __neg__(self) -> NCPolynomial:
        return NCPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: NCPolynomial | Scalar) -> NCPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> NCPolynomial:
        return (-self) + other

    def __mul__(self, other: NCPolynomial | Scalar) -> NCPolynomial:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Word, Fraction] = {}
        for left, a in self.terms.items():
            for right, b in other.terms.items():
                word = left + right
                out[word] = out.get(word, Fraction(0)) + a * b
        return NCPolynomial(out)

    def __rmul__(self, other: Scalar) -> NCPolynomial:
        # scalars are central
        return self * other

    def __pow__(self, exponent: int) -> NCPolynomial:
        if exponent < 0:
            raise InvalidInput("polynomials have no negative powers.")
        result = NCPolynomial.scalar(1)
        for _ in range(exponent):
            result = result * self
        return result

    def substitute(self, images: Mapping[str, NCPolynomial]) -> NCPolynomial:
        """Replace generators by polynomials (unmapped generators stay)."""
        parts = []
        for word, coefficient in self.terms.items():
            term = NCPolynomial.scalar(coefficient)
            for label in word:
                term = term * images.get(label, NCPolynomial.generator(label))
            parts.append(term)
        return NCPolynomial.total(parts)

    def to_json(self) -> dict[str, Any]:
        return {
            "terms": [
                {"coef": format_rational(c), "word": list(w)}
                for w, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ]
        }

    @classmethod
    def from_json(cls, data: object) -> NCPolynomial:
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            raise InvalidInput('polynomial JSON must be an object with a "terms" array.')
        parts = []
        for item in data["terms"]:
            if not isinstance(item, dict) or not isinstance(item.get("word"), list):
                raise InvalidInput('each polynomial term needs "coef" and "word".')
            parts.append(
                cls.word(
                    [str(label) for label in item["word"]],
                    parse_rational(item.get("coef", "1"), origin="polynomial coef"),
                )
            )
        return cls.total(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for word, coefficient in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            monomial = "*".join(word)
            if not monomial:
                pieces.append(format_rational(coefficient))
            elif coefficient == 1:
                pieces.append(monomial)
            else:
                pieces.append(f"{format_rational(coefficient)}*{monomial}")
        return " + ".join(pieces)


def parse_polynomial(text: str) -> NCPolynomial:
    """
    Parse ``"2*X1*X2 + -1/2*X3 + 5"``.

    Terms are joined by ``+``; each term is ``*``-separated factors where
    rational factors multiply the coefficient and the rest form the word.
    """
    parts = []
    for raw_term in text.split("+"):
        raw_term = raw_term.strip()
        if not raw_term:
            raise InvalidInput(f"empty term in polynomial {text!r}.")
        coefficient = Fraction(1)
        letters: list[str] = []
        for factor in raw_term.split("*"):
            factor = factor.strip()
            if not factor:
                raise InvalidInput(f"empty factor in polynomial {text!r}.")
            if factor[0].isdigit() or factor[0] == "-":
                coefficient *= parse_rational(factor, origin="polynomial coefficient")
            else:
                letters.append(factor)
        parts.append(NCPolynomial.word(letters, coefficient))
    return NCPolynomial.total(parts)
