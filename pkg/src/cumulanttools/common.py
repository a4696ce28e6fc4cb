from __future__ import annotations

import json
import re
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Any

import click

RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class InvalidInput(click.ClickException):
    """Malformed input or a violated precondition; exits with code 2."""

    exit_code = 2


def parse_rational(text: object, *, origin: str = "value") -> Fraction:
    """
    Parse an exact rational from ``"p/q"`` or ``"p"``.

    Integers and Fractions pass through; floats are refused everywhere.
    """
    if isinstance(text, bool):
        raise InvalidInput(f"{origin} must be a rational, got {text!r}.")
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(
            f"{origin} must be a rational string like '3/4', got {text!r}."
        )
    match = RATIONAL_RE.fullmatch(text.strip())
    if match is None:
        raise InvalidInput(
            f"{origin} must look like 'p/q' or 'p' (no floats), got {text!r}."
        )
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise InvalidInput(f"{origin} has a zero denominator: {text!r}.")
    return Fraction(int(numerator), int(denominator or 1))


def parse_rational_list(text: str | Sequence[object], *, origin: str) -> tuple[Fraction, ...]:
    """Parse ``"1,2/3,-1"`` (or an already split sequence) into rationals."""
    if isinstance(text, str):
        parts: Sequence[object] = [part for part in text.split(",") if part.strip()]
    else:
        parts = text
    return tuple(parse_rational(part, origin=origin) for part in parts)


def parse_labels(text: str, *, origin: str = "--word") -> tuple[str, ...]:
    labels = tuple(part.strip() for part in text.split(","))
    if any(not label for label in labels):
        raise InvalidInput(f"{origin} entries must be non-empty labels.")
    return labels


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_rationals(values: Iterable[Fraction | int]) -> list[str]:
    return [format_rational(value) for value in values]


def echo_json(payload: Any) -> None:
    """Write a JSON document to stdout, honouring the root ``--pretty`` flag."""
    ctx = click.get_current_context(silent=True)
    pretty = bool(ctx and ctx.find_root().params.get("pretty"))
    if pretty:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(json.dumps(payload, separators=(",", ":")))


def parse_inline_json(text: str, *, origin: str = "--json") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"Malformed JSON in {origin}: {exc}") from exc
