from __future__ import annotations

from fractions import Fraction

import pytest

from cumulanttools.common import InvalidInput
from cumulanttools.polynomials import NCPolynomial, parse_polynomial

X1 = NCPolynomial.generator("X1")
X2 = NCPolynomial.generator("X2")


def test_square_of_sum_keeps_word_order() -> None:
    square = (X1 + X2) ** 2

    assert square.terms == {
        ("X1", "X1"): 1,
        ("X1", "X2"): 1,
        ("X2", "X1"): 1,
        ("X2", "X2"): 1,
    }
    assert square.degree == 2
    assert square.generators == frozenset({"X1", "X2"})


def test_cancellation_drops_terms() -> None:
    difference = X1 * X2 - X1 * X2

    assert difference.is_zero
    assert str(difference) == "0"


def test_scalars_are_central() -> None:
    assert Fraction(1, 2) * X1 == X1 * Fraction(1, 2)
    assert (3 + X1).terms == {(): 3, ("X1",): 1}
    assert (1 - X1).terms == {(): 1, ("X1",): -1}


def test_commutator_is_not_zero() -> None:
    assert not (X1 * X2 - X2 * X1).is_zero


def test_substitute() -> None:
    p = X1 * X1 + 2
    image = p.substitute({"X1": X1 + X2})

    assert image == (X1 + X2) ** 2 + 2


def test_linear_form() -> None:
    p = NCPolynomial.linear([2, Fraction(-1, 2)], ["X1", "X2"])

    assert p.terms == {("X1",): 2, ("X2",): Fraction(-1, 2)}
    with pytest.raises(InvalidInput):
        NCPolynomial.linear([1], ["X1", "X2"])


def test_parse_polynomial() -> None:
    p = parse_polynomial("2*X1*X2 + -1/2*X3 + 5")

    assert p.terms == {("X1", "X2"): 2, ("X3",): Fraction(-1, 2), (): 5}
    assert str(p) == "5/1 + -1/2*X3 + 2/1*X1*X2"


@pytest.mark.parametrize("text", ["X1 + ", "X1 * * X2", "0.5*X1"])
def test_parse_polynomial_rejects_malformed(text: str) -> None:
    with pytest.raises(InvalidInput):
        parse_polynomial(text)


def test_json_round_trip() -> None:
    p = parse_polynomial("X1*X2 + -3*X2*X1 + 1/3")

    assert NCPolynomial.from_json(p.to_json()) == p


def test_negative_power_rejected() -> None:
    with pytest.raises(InvalidInput):
        X1 ** -1
