"""
Linear and quadratic forms in i.i.d. generalized Gaussian variables.

Joint cumulants of quadratic forms Q_k = sum a_ij(k) X_i X_j are trace
contractions over the pairings that connect the consecutive-pairs grouping
1,2|3,4|...; the polynomial-expansion route through
``wick.joint_cumulant_of_polynomials`` serves as the independent oracle.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Any, Union

import click
import sympy

from cumulanttools.common import echo_json, format_rational, format_rationals, parse_rational_list
from cumulanttools.cumulants import CumulantSpec, SpecError, calculus_family, iid_spec, load_spec
from cumulanttools.matrices import (
    MatrixError,
    RationalMatrix,
    is_irreducible,
    load_matrix,
    parse_vector,
    projection_irreducible,
)
from cumulanttools.partitions import (
    LatticeFamily,
    Partition,
    connecting_partitions,
    consecutive_pairs,
    without_singletons,
)
from cumulanttools.polynomials import NCPolynomial
from cumulanttools.wick import (
    PairWeight,
    State,
    WeightError,
    WeightKind,
    joint_cumulant_of_polynomials,
    parse_weight,
)

__all__ = [
    "QuadraticForm",
    "is_irreducible",
    "projection_irreducible",
    "linear_form",
    "qform_cumulant",
    "square_cumulants",
    "qform_joint_cumulants",
    "qform_independence_check",
    "trace_identity",
    "trace_identity_symbolic",
    "lq_independence_data",
    "shifted_squares_cumulant",
    "shifted_squares_decomposition",
]


def variable_labels(size: int) -> tuple[str, ...]:
    return tuple(f"X{i}" for i in range(1, size + 1))


@dataclass(frozen=True)
class QuadraticForm:
    matrix: RationalMatrix
    symmetric: bool = False

    def __post_init__(self) -> None:
        if not self.matrix.is_square:
            raise MatrixError("quadratic forms need a square matrix.")
        if self.symmetric and not self.matrix.is_symmetric():
            raise MatrixError("matrix is declared symmetric but is not.")

    @property
    def size(self) -> int:
        return self.matrix.rows

    def polynomial(self, labels: Sequence[str] | None = None) -> NCPolynomial:
        """sum_ij a_ij X_i X_j over the given generators."""
        labels = tuple(labels or variable_labels(self.size))
        if len(labels) != self.size:
            raise MatrixError(f"{len(labels)} labels for a {self.size}x{self.size} form.")
        return NCPolynomial(
            {
                (labels[i], labels[j]): self.matrix[i, j]
                for i in range(self.size)
                for j in range(self.size)
            }
        )


def linear_form(b: Sequence[Fraction], labels: Sequence[str] | None = None) -> NCPolynomial:
    """L = sum_i b_i X_i."""
    return NCPolynomial.linear(list(b), list(labels or variable_labels(len(b))))


def _require_symmetric(*matrices: RationalMatrix) -> None:
    for matrix in matrices:
        if not matrix.is_symmetric():
            raise MatrixError("this operation requires symmetric matrices.")


def qform_cumulant(
    A: RationalMatrix, ksq: Mapping[int, Fraction] | Sequence[Fraction], n: int
) -> Fraction:
    """K_n(Q, ..., Q) = tr(A^n) K_n(X^2, ..., X^2) for symmetric A."""
    _require_symmetric(A)
    if n < 1:
        raise MatrixError("cumulant order must be at least 1.")
    try:
        square = ksq[n] if isinstance(ksq, Mapping) else ksq[n - 1]
    except (KeyError, IndexError):
        raise SpecError(f"no square cumulant supplied for order {n}.") from None
    return A.power(n).trace() * Fraction(square)


def square_cumulants(state: State, family: LatticeFamily | str, max_order: int) -> dict[int, Fraction]:
    """K_n(X^2, ..., X^2) of one state variable for n = 1..max_order."""
    family = calculus_family(family)
    label = "X1"
    if isinstance(state, CumulantSpec):
        if not state.labels:
            raise SpecError("square cumulants need a spec with a label.")
        label = state.labels[0]
    square = NCPolynomial.word((label, label))
    return {
        n: joint_cumulant_of_polynomials(state, family, [square] * n)
        for n in range(1, max_order + 1)
    }


PairCumulants = Union[Mapping[Partition, Fraction], Callable[[Partition], Fraction]]


def contraction(matrices: Sequence[RationalMatrix], rho: Partition) -> Fraction:
    """
    sum over index maps h constant on the blocks of rho of
    prod_k A_k[h(2k-1), h(2k)].
    """
    size = matrices[0].rows
    position_block = rho.labels()
    total = Fraction(0)
    for indices in itertools.product(range(size), repeat=len(rho.blocks)):
        term = Fraction(1)
        for k, matrix in enumerate(matrices):
            term *= matrix[indices[position_block[2 * k]], indices[position_block[2 * k + 1]]]
            if not term:
                break
        total += term
    return total


def qform_joint_cumulants(
    As: Sequence[RationalMatrix],
    weight: PairWeight,
    kpair: PairCumulants | None = None,
) -> Fraction:
    """
    K_m(Q_1, ..., Q_m) for Q_k = sum a_ij(k) X_i X_j, matrices not
    necessarily symmetric.

    ``kpair`` gives K_rho(X) on pairings; by default it is the weight itself,
    which is the pair cumulant of a Gaussian in its own calculus.
    """
    if not As:
        raise MatrixError("joint cumulants need at least one matrix.")
    size = As[0].rows
    if any(not A.is_square or A.rows != size for A in As):
        raise MatrixError("all matrices must be square and of the same size.")
    if kpair is None:
        if weight.kind in (WeightKind.Q, WeightKind.CUSTOM):
            raise WeightError(f"{weight} has no cumulant calculus; pass pair cumulants explicitly.")
        kpair = weight.weight
    lookup = kpair if callable(kpair) else kpair.__getitem__
    total = Fraction(0)
    for rho in connecting_partitions(consecutive_pairs(len(As)), LatticeFamily.PAIR):
        k_rho = Fraction(lookup(rho))
        if k_rho:
            total += contraction(As, rho) * k_rho
    return total


@dataclass(frozen=True)
class TraceIdentity:
    """tr((AB+BA)^2) + 2 tr(BA^2B) and its two closed forms."""

    value: Fraction
    sum_of_squares: Fraction
    quartic_coefficient: Fraction

    @property
    def consistent(self) -> bool:
        return self.value == self.sum_of_squares == self.quartic_coefficient

    def to_json(self) -> dict[str, Any]:
        return {
            "value": format_rational(self.value),
            "sum_of_squares": format_rational(self.sum_of_squares),
            "quartic_coefficient": format_rational(self.quartic_coefficient),
        }


def trace_identity(A: RationalMatrix, B: RationalMatrix) -> TraceIdentity:
    """
    Evaluate tr((AB+BA)^2) + 2 tr(BA^2B) for symmetric A, B.

    It equals the s^2 t^2 coefficient 2 tr(ABAB) + 4 tr(A^2 B^2) of
    tr((sA+tB)^4) and the sum of squares |AB+BA|_F^2 + 2 |AB|_F^2, so it
    vanishes iff AB = 0.
    """
    _require_symmetric(A, B)
    AB, BA = A @ B, B @ A
    anti = AB + BA
    value = (anti @ anti).trace() + 2 * (BA @ AB).trace()
    sum_of_squares = anti.frobenius_squared() + 2 * AB.frobenius_squared()
    quartic = 2 * (AB @ AB).trace() + 4 * (A @ A @ B @ B).trace()
    return TraceIdentity(value, sum_of_squares, quartic)


@dataclass(frozen=True)
class SymbolicIdentity:
    size: int
    sum_of_squares_holds: bool
    quartic_coefficient_holds: bool


def _symmetric_symbols(prefix: str, size: int) -> sympy.Matrix:
    return sympy.Matrix(
        size,
        size,
        lambda i, j: sympy.Symbol(f"{prefix}{min(i, j)}{max(i, j)}"),
    )


def trace_identity_symbolic(size: int) -> SymbolicIdentity:
    """Prove both closed forms of the order-4 trace identity on generic symmetric matrices."""
    A = _symmetric_symbols("a", size)
    B = _symmetric_symbols("b", size)
    s, t = sympy.symbols("s t")
    AB, BA = A * B, B * A
    anti = AB + BA
    value = (anti * anti).trace() + 2 * (BA * AB).trace()
    frobenius = sum(e**2 for e in anti) + 2 * sum(e**2 for e in AB)
    quartic = sympy.expand(((s * A + t * B) ** 4).trace())
    coefficient = sympy.Poly(quartic, s, t).coeff_monomial(s**2 * t**2)
    return SymbolicIdentity(
        size,
        sympy.expand(value - frobenius) == 0,
        sympy.expand(value - coefficient) == 0,
    )


def _mixed_words(max_order: int) -> list[tuple[int, ...]]:
    return [
        word
        for order in range(2, max_order + 1)
        for word in itertools.product((0, 1), repeat=order)
        if 0 in word and 1 in word
    ]


@dataclass(frozen=True)
class IndependenceVerdict:
    ab_zero: bool
    identity: TraceIdentity
    mixed: tuple[tuple[str, Fraction], ...]
    max_order: int

    @property
    def mixed_vanish(self) -> bool:
        return all(value == 0 for _, value in self.mixed)

    @property
    def consistent(self) -> bool:
        """AB = 0 forces every mixed cumulant to vanish."""
        return (not self.ab_zero) or self.mixed_vanish

    def to_json(self) -> dict[str, Any]:
        return {
            "ab_zero": self.ab_zero,
            "trace_identity": self.identity.to_json(),
            "max_order": self.max_order,
            "mixed_vanish": self.mixed_vanish,
            "consistent": self.consistent,
            "mixed": [{"desc": d, "value": format_rational(v)} for d, v in self.mixed],
        }


def qform_independence_check(
    A: RationalMatrix, B: RationalMatrix, weight: PairWeight, max_order: int
) -> IndependenceVerdict:
    """Mixed cumulants of (Q_A, Q_B) up to ``max_order`` next to the AB = 0 test."""
    _require_symmetric(A, B)
    if max_order < 2:
        raise MatrixError("max order must be at least 2.")
    names = ("Q", "Q'")
    mixed = tuple(
        (
            f"K{len(word)}({','.join(names[i] for i in word)})",
            qform_joint_cumulants([(A, B)[i] for i in word], weight),
        )
        for word in _mixed_words(max_order)
    )
    return IndependenceVerdict((A @ B).is_zero(), trace_identity(A, B), mixed, max_order)


@dataclass(frozen=True)
class LqReport:
    Ab: tuple[Fraction, ...]
    bA: tuple[Fraction, ...]
    diagnostics: tuple[Fraction, ...]
    mixed: tuple[Fraction, ...]
    gaussian: bool
    cascade: tuple[Fraction, ...] = field(default=())

    @property
    def annihilating(self) -> bool:
        return all(v == 0 for v in self.Ab) and all(v == 0 for v in self.bA)

    @property
    def consistent(self) -> bool:
        """Ab = 0 and b^T A = 0 force independence for Gaussian states."""
        return not (self.annihilating and self.gaussian) or all(v == 0 for v in self.mixed)

    def to_json(self) -> dict[str, Any]:
        payload = {
            "Ab": format_rationals(self.Ab),
            "bA": format_rationals(self.bA),
            "diagnostics": [
                {"m": m, "value": format_rational(v)}
                for m, v in enumerate(self.diagnostics, start=1)
            ],
            "mixed": [
                {"desc": f"K{r}(" + ",".join(["L"] * (r - 1) + ["Q"]) + ")", "value": format_rational(v)}
                for r, v in enumerate(self.mixed, start=2)
            ],
            "annihilating": self.annihilating,
            "consistent": self.consistent,
        }
        if self.cascade:
            payload["cascade"] = [
                {"r": r, "leading": format_rational(v)}
                for r, v in enumerate(self.cascade, start=2)
            ]
        return payload


def _is_gaussian(state: State) -> bool:
    if isinstance(state, PairWeight):
        return True
    return all(len(args) == 2 for args in state.entries)


def _state_family(state: State) -> LatticeFamily:
    return state.calculus if isinstance(state, PairWeight) else state.family


def _state_for(state: State, labels: Sequence[str]) -> State:
    if isinstance(state, CumulantSpec) and tuple(state.labels) != tuple(labels):
        return iid_spec(state, labels)
    return state


def lq_independence_data(
    A: RationalMatrix, b: Sequence[Fraction], state: State, max_order: int
) -> LqReport:
    """
    Data for the linear/quadratic independence criterion.

    Reports Ab, b^T A, sum_i b_i^m a_ii for m <= max_order and
    K_r(L, ..., L, Q) for 2 <= r <= max_order. For non-Gaussian spec states
    the leading term (sum_i b_i^(r-1) a_ii) K_(r+1)(X) of each mixed
    cumulant is listed as well.
    """
    if not A.is_square or A.rows != len(b):
        raise MatrixError(f"vector of length {len(b)} does not fit a {A.rows}x{A.cols} matrix.")
    labels = variable_labels(len(b))
    state = _state_for(state, labels)
    family = _state_family(state)
    L = linear_form(b, labels)
    Q = QuadraticForm(A).polynomial(labels)
    bt = RationalMatrix((tuple(b),))
    diagnostics = tuple(
        sum((Fraction(b[i]) ** m * A[i, i] for i in range(len(b))), Fraction(0))
        for m in range(1, max_order + 1)
    )
    mixed = tuple(
        joint_cumulant_of_polynomials(state, family, [L] * (r - 1) + [Q])
        for r in range(2, max_order + 1)
    )
    gaussian = _is_gaussian(state)
    cascade: tuple[Fraction, ...] = ()
    if not gaussian and isinstance(state, CumulantSpec):
        cascade = tuple(
            diagnostics[r - 2] * state.diagonal(r + 1, labels[0])
            for r in range(2, max_order + 1)
        )
    return LqReport(A.apply(b), (bt @ A).entries[0], diagnostics, mixed, gaussian, cascade)


def _shifted_squares(a: Sequence[Fraction], labels: Sequence[str]) -> NCPolynomial:
    return NCPolynomial.total(
        (NCPolynomial.generator(label) + Fraction(shift)) ** 2
        for label, shift in zip(labels, a)
    )


def shifted_squares_cumulant(
    a: Sequence[Fraction], state: State, family: LatticeFamily | str, m: int
) -> Fraction:
    """K_m(Y, ..., Y) for Y = sum_i (X_i + a_i)^2, by direct expansion."""
    if m < 1:
        raise SpecError("cumulant order must be at least 1.")
    labels = variable_labels(len(a))
    Y = _shifted_squares(a, labels)
    return joint_cumulant_of_polynomials(_state_for(state, labels), family, [Y] * m)


@dataclass(frozen=True)
class ShiftedSquares:
    """K_m(Y) = sum_s (sum_i a_i^s) c_s, s counting constant slots."""

    order: int
    coefficients: tuple[Fraction, ...]
    power_sums: tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return sum((c * p for c, p in zip(self.coefficients, self.power_sums)), Fraction(0))

    def to_json(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "total": format_rational(self.total),
            "terms": [
                {"s": s, "power_sum": format_rational(p), "coefficient": format_rational(c)}
                for s, (c, p) in enumerate(zip(self.coefficients, self.power_sums))
            ],
        }


def _univariate(state: State, family: LatticeFamily) -> CumulantSpec:
    if isinstance(state, CumulantSpec):
        if not state.labels:
            raise SpecError("the decomposition needs a spec with a label.")
        if len(state.labels) != 1:
            state = CumulantSpec(
                (state.labels[0],),
                {k: v for k, v in state.entries.items() if set(k) == {state.labels[0]}},
                state.family,
                independent=True,
            )
        return state
    if state.kind in (WeightKind.Q, WeightKind.CUSTOM) or state.calculus is not family:
        raise WeightError(f"{state} is not a Gaussian of the {family.value} calculus.")
    return CumulantSpec.univariate({2: 1}, family=family)


def shifted_squares_decomposition(
    a: Sequence[Fraction], state: State, family: LatticeFamily | str, m: int
) -> ShiftedSquares:
    """
    Split K_m(sum_i (X_i + a_i)^2) by the number s of constant slots.

    c_s sums K_(rho minus C)(X) over rho in the family with
    rho v (1,2|3,4|...) = 1 and s-element sets C of singleton blocks of rho
    holding the constants. For centred Gaussians only s = 0 and s = 2
    survive, so the cumulant depends on a only through sum a_i^2.
    """
    family = calculus_family(family)
    if family is LatticeFamily.INTERVAL:
        raise SpecError("boolean cumulants do not split off constants.")
    spec = _univariate(state, family)
    coefficients = [Fraction(0)] * (2 * m + 1)
    for rho in connecting_partitions(consecutive_pairs(m), family):
        core = without_singletons(rho)
        singletons = rho.n - core.n
        others = Fraction(1)
        for block in core.blocks:
            others *= spec.diagonal(len(block))
        if not others:
            continue
        k1 = spec.diagonal(1)
        for s in range(singletons + 1):
            coefficients[s] += others * k1 ** (singletons - s) * comb(singletons, s)
    power_sums = tuple(
        sum((Fraction(v) ** s for v in a), Fraction(0)) for s in range(2 * m + 1)
    )
    return ShiftedSquares(m, tuple(coefficients), power_sums)


# --- cli ---------------------------------------------------------------------


def _state_option(weight: str | None, spec_path: Path | None) -> State:
    if (weight is None) == (spec_path is None):
        raise WeightError("provide exactly one of --weight or --spec.")
    return parse_weight(weight) if weight is not None else load_spec(spec_path)


@click.group(help="Linear and quadratic forms.")
def cli() -> None:
    """Root command group for quadratic-form utilities."""


@cli.command("single")
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path))
@click.option("--json", "inline", help="Inline matrix JSON.")
@click.option("--weight", default="classical", show_default=True)
@click.option("--ksq", help="K_n(X^2) for n = 1, 2, ...; computed from the weight if omitted.")
@click.option("--order", type=int, required=True, help="Cumulant order n.")
def single_command(
    matrix_path: Path | None, inline: str | None, weight: str, ksq: str | None, order: int
) -> None:
    """K_n(Q) = tr(A^n) K_n(X^2)."""
    A = load_matrix(matrix_path, inline)
    if ksq is not None:
        squares: Sequence[Fraction] | Mapping[int, Fraction] = parse_rational_list(ksq, origin="--ksq")
    else:
        state = parse_weight(weight)
        squares = square_cumulants(state, state.calculus, order)
    echo_json({"value": format_rational(qform_cumulant(A, squares, order))})


@cli.command("joint")
@click.option("--matrix", "matrix_paths", type=click.Path(path_type=Path), multiple=True, required=True)
@click.option("--weight", default="classical", show_default=True)
def joint_command(matrix_paths: tuple[Path, ...], weight: str) -> None:
    """K_m(Q_1, ..., Q_m), one --matrix per argument."""
    As = [load_matrix(path) for path in matrix_paths]
    echo_json({"value": format_rational(qform_joint_cumulants(As, parse_weight(weight)))})


@cli.command("independence")
@click.option("--a", "a_path", type=click.Path(path_type=Path), required=True)
@click.option("--b", "b_path", type=click.Path(path_type=Path), required=True)
@click.option("--weight", default="classical", show_default=True)
@click.option("--max-order", type=int, default=4, show_default=True)
def independence_command(a_path: Path, b_path: Path, weight: str, max_order: int) -> None:
    """AB = 0 test, order-4 trace identity and mixed (Q, Q') cumulants."""
    verdict = qform_independence_check(
        load_matrix(a_path), load_matrix(b_path), parse_weight(weight), max_order
    )
    echo_json(verdict.to_json())


@cli.command("lq")
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path), required=True)
@click.option("--b", "b_text", required=True, help='Vector, e.g. "3/5,4/5".')
@click.option("--weight", help="Gaussian pair weight.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="One-label i.i.d. spec.")
@click.option("--max-order", type=int, default=4, show_default=True)
def lq_command(
    matrix_path: Path, b_text: str, weight: str | None, spec_path: Path | None, max_order: int
) -> None:
    """Independence data for L = b.X and Q = X^T A X."""
    report = lq_independence_data(
        load_matrix(matrix_path),
        parse_vector(b_text, origin="--b"),
        _state_option(weight, spec_path),
        max_order,
    )
    echo_json(report.to_json())


@cli.command("shifted")
@click.option("--a", "a_text", required=True, help='Shift vector, e.g. "3/5,4/5".')
@click.option("--weight", help="Gaussian pair weight.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="One-label i.i.d. spec.")
@click.option("--family", type=click.Choice(["classical", "free", "boolean"]))
@click.option("--max-order", "order", type=int, required=True, help="Cumulant order m.")
@click.option("--decompose", is_flag=True, help="Also report the split by constant slots.")
def shifted_command(
    a_text: str,
    weight: str | None,
    spec_path: Path | None,
    family: str | None,
    order: int,
    decompose: bool,
) -> None:
    """K_m of sum_i (X_i + a_i)^2."""
    a = parse_vector(a_text, origin="--a")
    state = _state_option(weight, spec_path)
    chosen = calculus_family(family) if family else _state_family(state)
    payload: dict[str, Any] = {
        "value": format_rational(shifted_squares_cumulant(a, state, chosen, order))
    }
    if decompose:
        payload["decomposition"] = shifted_squares_decomposition(a, state, chosen, order).to_json()
    echo_json(payload)
