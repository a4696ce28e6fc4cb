"""Exact rational matrices and the structural predicates the form checks need."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import click
import networkx as nx
import sympy

from cumulanttools.common import (
    InvalidInput,
    echo_json,
    format_rational,
    parse_inline_json,
    parse_rational,
)
from cumulanttools.state import load_document


class MatrixError(InvalidInput):
    """Shape or structure problems with a matrix argument."""


def to_fraction(value: Any) -> Fraction:
    """Convert an exact sympy number back to a Fraction."""
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


@dataclass(frozen=True)
class RationalMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise MatrixError("matrices must have at least one row and one column.")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise MatrixError("matrix rows must all have the same length.")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[object]]) -> RationalMatrix:
        return cls(
            tuple(
                tuple(parse_rational(value, origin="matrix entry") for value in row)
                for row in rows
            )
        )

    @classmethod
    def identity(cls, size: int) -> RationalMatrix:
        return cls.diagonal([1] * size)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(0) for _ in range(cols or rows)) for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence[Fraction | int]) -> RationalMatrix:
        size = len(values)
        return cls(
            tuple(
                tuple(Fraction(values[i]) if i == j else Fraction(0) for j in range(size))
                for i in range(size)
            )
        )

    @classmethod
    def unit(cls, size: int, i: int, j: int) -> RationalMatrix:
        """Matrix unit e_ij (0-based)."""
        return cls(
            tuple(
                tuple(Fraction(int(r == i and c == j)) for c in range(size))
                for r in range(size)
            )
        )

    @classmethod
    def outer(cls, left: Sequence[Fraction], right: Sequence[Fraction]) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(a) * Fraction(b) for b in right) for a in left))

    @classmethod
    def from_json(cls, data: object) -> RationalMatrix:
        if not isinstance(data, dict) or "entries" not in data:
            raise MatrixError('matrix JSON must be an object with an "entries" array.')
        entries = data["entries"]
        if not isinstance(entries, list) or not all(isinstance(row, list) for row in entries):
            raise MatrixError('"entries" must be an array of rows.')
        matrix = cls.from_rows(entries)
        for key, expected in (("rows", matrix.rows), ("cols", matrix.cols)):
            if key in data and data[key] != expected:
                raise MatrixError(
                    f'matrix JSON declares {key}={data[key]!r} but has {expected}.'
                )
        return matrix

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[format_rational(v) for v in row] for row in self.entries],
        }

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    @property
    def T(self) -> RationalMatrix:
        return RationalMatrix(tuple(zip(*self.entries)))

    def _same_shape(self, other: RationalMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise MatrixError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}."
            )

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        self._same_shape(other)
        return RationalMatrix(
            tuple(
                tuple(a + b for a, b in zip(row, other_row))
                for row, other_row in zip(self.entries, other.entries)
            )
        )

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> RationalMatrix:
        return RationalMatrix(tuple(tuple(v * factor for v in row) for row in self.entries))

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if self.cols != other.rows:
            raise MatrixError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}."
            )
        columns = list(zip(*other.entries))
        return RationalMatrix(
            tuple(
                tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in columns)
                for row in self.entries
            )
        )

    def apply(self, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vector) != self.cols:
            raise MatrixError(f"vector of length {len(vector)} does not fit {self.cols} columns.")
        return tuple(
            sum((a * Fraction(b) for a, b in zip(row, vector)), Fraction(0))
            for row in self.entries
        )

    def power(self, exponent: int) -> RationalMatrix:
        if not self.is_square:
            raise MatrixError("only square matrices have powers.")
        result = RationalMatrix.identity(self.rows)
        for _ in range(exponent):
            result = result @ self
        return result

    def trace(self) -> Fraction:
        if not self.is_square:
            raise MatrixError("trace needs a square matrix.")
        return sum((self.entries[i][i] for i in range(self.rows)), Fraction(0))

    def frobenius_squared(self) -> Fraction:
        return sum((v * v for row in self.entries for v in row), Fraction(0))

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T

    def is_orthogonal(self) -> bool:
        return self.is_square and (self.T @ self) == RationalMatrix.identity(self.rows)

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix([[to_sympy(v) for v in row] for row in self.entries])

    def determinant(self) -> Fraction:
        if not self.is_square:
            raise MatrixError("determinant needs a square matrix.")
        return to_fraction(self.to_sympy().det())


def pythagorean_rotation(a: int, b: int) -> RationalMatrix:
    """(1/c)[[a, b], [-b, a]] for a Pythagorean triple a^2 + b^2 = c^2."""
    c_squared = a * a + b * b
    c = sympy.integer_nthroot(c_squared, 2)
    if not c[1]:
        raise MatrixError(f"({a}, {b}) is not part of a Pythagorean triple.")
    scale = Fraction(1, int(c[0]))
    return RationalMatrix.from_rows([[a, b], [-b, a]]).scale(scale)


def permutation_matrix(images: Sequence[int]) -> RationalMatrix:
    """Matrix sending e_j to e_images[j] (0-based)."""
    size = len(images)
    if sorted(images) != list(range(size)):
        raise MatrixError(f"{list(images)} is not a permutation of 0..{size - 1}.")
    return RationalMatrix(
        tuple(
            tuple(Fraction(int(images[c] == r)) for c in range(size)) for r in range(size)
        )
    )


def block_diagonal(*blocks: RationalMatrix) -> RationalMatrix:
    width = sum(block.cols for block in blocks)
    rows: list[tuple[Fraction, ...]] = []
    offset = 0
    for block in blocks:
        for row in block.entries:
            rows.append(
                (Fraction(0),) * offset + row + (Fraction(0),) * (width - offset - block.cols)
            )
        offset += block.cols
    return RationalMatrix(tuple(rows))


def is_irreducible(matrix: RationalMatrix) -> bool:
    """
    No permutation pair C1, C2 brings ``matrix`` to block-diagonal form.

    Equivalent to connectivity of the bipartite graph on rows and columns
    with an edge at every nonzero entry.
    """
    if not matrix.is_square:
        raise MatrixError("irreducibility is defined for square matrices only.")
    graph = nx.Graph()
    graph.add_nodes_from(("row", i) for i in range(matrix.rows))
    graph.add_nodes_from(("col", j) for j in range(matrix.cols))
    graph.add_edges_from(
        (("row", i), ("col", j))
        for i, row in enumerate(matrix.entries)
        for j, value in enumerate(row)
        if value != 0
    )
    return nx.is_connected(graph)


def projection_irreducible(matrix: RationalMatrix) -> bool:
    """
    ``matrix`` commutes with no coordinate projection sum_{i in I} e_ii, I proper.

    Disagrees with ``is_irreducible`` on permutation matrices.
    """
    if not matrix.is_square:
        raise MatrixError("irreducibility is defined for square matrices only.")
    graph = nx.Graph()
    graph.add_nodes_from(range(matrix.rows))
    graph.add_edges_from(
        (i, j)
        for i, row in enumerate(matrix.entries)
        for j, value in enumerate(row)
        if i != j and value != 0
    )
    return nx.is_connected(graph)


def load_matrix(path: Path | None = None, inline: str | None = None) -> RationalMatrix:
    """Read a matrix from ``--matrix PATH`` or ``--json INLINE``."""
    if (path is None) == (inline is None):
        raise MatrixError("provide exactly one of --matrix or --json.")
    if path is not None:
        return RationalMatrix.from_json(load_document(path))
    return RationalMatrix.from_json(parse_inline_json(inline or ""))


def parse_vector(text: str, *, origin: str) -> tuple[Fraction, ...]:
    """Vectors are JSON arrays of "p/q" strings, or comma-separated rationals."""
    stripped = text.strip()
    if stripped.startswith("["):
        data = parse_inline_json(stripped, origin=origin)
        if not isinstance(data, list) or not data:
            raise MatrixError(f"{origin} must be a non-empty array.")
        return tuple(parse_rational(v, origin=origin) for v in data)
    values = tuple(
        parse_rational(part, origin=origin) for part in stripped.split(",") if part.strip()
    )
    if not values:
        raise MatrixError(f"{origin} must not be empty.")
    return values


@click.group(help="Matrix predicates.")
def cli() -> None:
    """Root command group for matrix utilities."""


_matrix_path = click.option(
    "--matrix", "matrix_path", type=click.Path(path_type=Path), help="Matrix JSON/YAML file."
)
_matrix_json = click.option("--json", "inline", help="Inline matrix JSON.")


@cli.command("orthogonal")
@_matrix_path
@_matrix_json
def orthogonal_command(matrix_path: Path | None, inline: str | None) -> None:
    """Whether U^T U = I exactly."""
    matrix = load_matrix(matrix_path, inline)
    echo_json({"orthogonal": matrix.is_orthogonal(), "symmetric": matrix.is_symmetric()})


@cli.command("irreducible")
@_matrix_path
@_matrix_json
def irreducible_command(matrix_path: Path | None, inline: str | None) -> None:
    """Block-form irreducibility, with the projection criterion alongside."""
    matrix = load_matrix(matrix_path, inline)
    block_form = is_irreducible(matrix)
    projection = projection_irreducible(matrix)
    echo_json(
        {
            "irreducible": block_form,
            "projection_irreducible": projection,
            "criteria_agree": block_form == projection,
        }
    )
