"""
Generalized Gaussian states.

A pair weight nu on pair partitions defines the moment functional

    phi(X_h(1) ... X_h(n)) = sum_{pi pairing, pi <= ker h} nu(pi)

which vanishes on odd words. Classical (nu = 1), free (noncrossing
indicator), boolean (interval indicator), q-deformed (q^crossings) and
tabulated weights are supported.
"""

from __future__ import annotations

import enum
import functools
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import click

from cumulanttools.common import (
    InvalidInput,
    echo_json,
    format_rational,
    parse_inline_json,
    parse_labels,
    parse_rational,
    parse_rational_list,
)
from cumulanttools.cumulants import (
    CumulantSpec,
    SpecError,
    calculus_family,
    cumulant_from_moments,
    load_spec,
    moments_from_cumulants,
)
from cumulanttools.partitions import (
    LatticeFamily,
    Partition,
    PartitionError,
    count_kernel_maps,
    crossing_number,
    is_interval,
    is_noncrossing,
    is_pair,
    iter_family,
    kernel,
    leq,
)
from cumulanttools.polynomials import NCPolynomial, parse_polynomial
from cumulanttools.state import load_document, load_settings


class WeightError(InvalidInput):
    """Unknown weight strings, incomplete tables, or a weight/family mismatch."""


class WeightKind(str, enum.Enum):
    CLASSICAL = "classical"
    FREE = "free"
    BOOLEAN = "boolean"
    Q = "q"
    CUSTOM = "custom"


_NATIVE_FAMILY = {
    WeightKind.CLASSICAL: LatticeFamily.ALL,
    WeightKind.FREE: LatticeFamily.NONCROSSING,
    WeightKind.BOOLEAN: LatticeFamily.INTERVAL,
    WeightKind.Q: LatticeFamily.ALL,
    WeightKind.CUSTOM: LatticeFamily.ALL,
}


@dataclass(frozen=True)
class PairWeight:
    """A weight nu on pair partitions. Hashable so moment caches can key on it."""

    kind: WeightKind
    q: Fraction | None = None
    table: tuple[tuple[Partition, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.kind is WeightKind.Q and self.q is None:
            raise WeightError("q-deformed weights need a value of q.")
        if self.kind is WeightKind.CUSTOM:
            _check_table(dict(self.table))

    @classmethod
    def classical(cls) -> PairWeight:
        return cls(WeightKind.CLASSICAL)

    @classmethod
    def free(cls) -> PairWeight:
        return cls(WeightKind.FREE)

    @classmethod
    def boolean(cls) -> PairWeight:
        return cls(WeightKind.BOOLEAN)

    @classmethod
    def q_deformed(cls, q: Fraction | int | str) -> PairWeight:
        return cls(WeightKind.Q, q=parse_rational(q, origin="q"))

    @classmethod
    def custom(cls, table: Mapping[Partition, Fraction | int | str]) -> PairWeight:
        items = sorted(
            ((p, parse_rational(v, origin=f"weight of {p}")) for p, v in table.items()),
            key=lambda item: (item[0].n, item[0].labels()),
        )
        return cls(WeightKind.CUSTOM, table=tuple(items))

    @property
    def calculus(self) -> LatticeFamily:
        """The partition family whose cumulants of this state are Gaussian."""
        return _NATIVE_FAMILY[self.kind]

    @property
    def max_tabulated(self) -> int:
        return max((p.n for p, _ in self.table), default=0)

    def weight(self, p: Partition) -> Fraction:
        if not is_pair(p):
            raise WeightError(f"pair weights are defined on pair partitions, got {p}.")
        if self.kind is WeightKind.CLASSICAL:
            return Fraction(1)
        if self.kind is WeightKind.FREE:
            return Fraction(int(is_noncrossing(p)))
        if self.kind is WeightKind.BOOLEAN:
            return Fraction(int(is_interval(p)))
        if self.kind is WeightKind.Q:
            # 0 ** 0 == 1 keeps q = 0 equal to the free weight
            return self.q ** crossing_number(p)
        try:
            return self._table_lookup[p]
        except KeyError:
            raise WeightError(f"custom weight table has no entry for {p}.") from None

    @functools.cached_property
    def _table_lookup(self) -> dict[Partition, Fraction]:
        return dict(self.table)

    def __str__(self) -> str:
        if self.kind is WeightKind.Q:
            return f"q:{format_rational(self.q)}"
        if self.kind is WeightKind.CUSTOM:
            return "custom"
        return self.kind.value


def _check_table(table: Mapping[Partition, Fraction]) -> None:
    for p in table:
        if not is_pair(p):
            raise WeightError(f"custom weight table key {p} is not a pair partition.")
    top = max((p.n for p in table), default=0)
    for n in range(2, top + 1, 2):
        missing = [p for p in iter_family(LatticeFamily.PAIR, n) if p not in table]
        if missing:
            raise WeightError(
                f"custom weight table covers degree {top} but misses {missing[0]}."
            )


def load_custom_weight(path: Path) -> PairWeight:
    """Read ``{"1,2|3,4": "1/2", ...}`` from JSON or YAML."""
    data = load_document(path)
    table = {}
    for key, value in data.items():
        try:
            p = Partition.parse(str(key))
        except PartitionError as exc:
            raise WeightError(f"{path}: bad pair partition {key!r}: {exc.message}") from exc
        table[p] = parse_rational(value, origin=f"{path}: weight of {key}")
    return PairWeight.custom(table)


def parse_weight(text: str) -> PairWeight:
    """Parse "classical", "free", "boolean", "q:3/4" or "custom:<path>"."""
    stripped = text.strip()
    if stripped in ("classical", "free", "boolean"):
        return PairWeight(WeightKind(stripped))
    if stripped.startswith("q:"):
        return PairWeight.q_deformed(stripped[2:])
    if stripped.startswith("custom:") and stripped[len("custom:"):]:
        return load_custom_weight(Path(stripped[len("custom:"):]))
    raise WeightError(
        f"unknown weight {text!r}; expected classical, free, boolean, q:<p/q> or custom:<path>."
    )


State = Union[PairWeight, CumulantSpec]


@functools.lru_cache(maxsize=8192)
def _pairing_sum(weight: PairWeight, ker: Partition) -> Fraction:
    total = Fraction(0)
    for p in iter_family(LatticeFamily.PAIR, ker.n):
        if leq(p, ker):
            total += weight.weight(p)
    return total


def wick_moment(weight: PairWeight, word: Sequence[str]) -> Fraction:
    """phi(word) = sum over pairings refining ker(word) of nu(pairing)."""
    word = tuple(word)
    if not word:
        return Fraction(1)
    if len(word) % 2:
        return Fraction(0)
    settings = load_settings()
    if len(word) > settings.degree_cap:
        raise WeightError(
            f"word length {len(word)} exceeds the configured cap of {settings.degree_cap}."
        )
    return _pairing_sum(weight, kernel(word))


def _word_moment(state: State) -> Callable[[tuple[str, ...]], Fraction]:
    if isinstance(state, PairWeight):
        return functools.partial(wick_moment, state)

    def spec_moment(word: tuple[str, ...]) -> Fraction:
        return Fraction(1) if not word else moments_from_cumulants(state, word)

    return spec_moment


def phi(state: State, p: NCPolynomial) -> Fraction:
    """Linear extension of the moment functional to polynomials."""
    moment = _word_moment(state)
    return sum(
        (coefficient * moment(word) for word, coefficient in p.terms.items()),
        Fraction(0),
    )


def _check_pairing(state: State, family: LatticeFamily, allow_mismatch: bool) -> None:
    if isinstance(state, PairWeight):
        if state.kind in (WeightKind.Q, WeightKind.CUSTOM) and family is not LatticeFamily.ALL:
            raise WeightError(f"{state} weights only pair with the classical family.")
        native = state.calculus
    else:
        native = state.family
    if family is not native and not allow_mismatch:
        raise WeightError(
            f"state {state if isinstance(state, PairWeight) else state.calculus} pairs "
            f"with the {native.value} family, not {family.value}."
        )


def joint_cumulant_of_polynomials(
    state: State,
    family: LatticeFamily | str,
    ps: Sequence[NCPolynomial],
    *,
    allow_mismatch: bool = False,
) -> Fraction:
    """
    K_m(p_1, ..., p_m) in ``family`` for polynomials in the state's variables.

    The polynomials become fresh variables 0..m-1 whose joint moments are
    phi of the corresponding ordered products.
    """
    family = calculus_family(family)
    _check_pairing(state, family, allow_mismatch)
    if not ps:
        raise SpecError("joint cumulants need at least one polynomial.")
    settings = load_settings()
    total_degree = sum(p.degree for p in ps)
    if total_degree > settings.degree_cap:
        raise WeightError(
            f"total degree {total_degree} exceeds the configured cap of {settings.degree_cap}."
        )
    products: dict[tuple[int, ...], Fraction] = {}

    def moment(positions: tuple[int, ...]) -> Fraction:
        if positions not in products:
            product = NCPolynomial.scalar(1)
            for index in positions:
                product = product * ps[index]
            products[positions] = phi(state, product)
        return products[positions]

    return cumulant_from_moments(
        moment, family, tuple(range(len(ps))), settings=settings
    )


# --- central limit -----------------------------------------------------------


@dataclass(frozen=True)
class CltMoment:
    """phi(S_N^n) = total * N^power with power = -n/2."""

    N: int
    n: int
    total: Fraction

    @property
    def power(self) -> Fraction:
        return Fraction(-self.n, 2)

    @property
    def value(self) -> Fraction | None:
        """The exact moment, or None when the power is a half-integer."""
        if self.n % 2:
            return None
        return self.total / Fraction(self.N) ** (self.n // 2)

    def to_json(self) -> dict[str, Any]:
        value = self.value
        return {
            "N": self.N,
            "n": self.n,
            "total": format_rational(self.total),
            "power": format_rational(self.power),
            "value": None if value is None else format_rational(value),
        }


PhiTable = Union[Mapping[Partition, Fraction], Callable[[Partition], Fraction]]


def _lookup(table: PhiTable, p: Partition) -> Fraction:
    if callable(table):
        return Fraction(table(p))
    try:
        return Fraction(table[p])
    except KeyError:
        raise WeightError(f"phi table has no entry for {p}.") from None


def clt_moment(
    N: int, n: int, phi_table: PhiTable, *, singleton_condition: bool = False
) -> CltMoment:
    """
    Exact phi(S_N^n) for S_N = N^(-1/2) sum_{i<=N} X_i.

    ``phi_table(p)`` is phi(X_h(1) ... X_h(n)) for any h with kernel p.
    With ``singleton_condition`` the table must vanish on partitions with a
    singleton block.
    """
    if N < 1:
        raise WeightError("N must be a positive integer.")
    if n < 0:
        raise WeightError("n must be non-negative.")
    settings = load_settings()
    if n > settings.classical_cap:
        raise WeightError(
            f"sums over all partitions of {n} exceed the configured cap of {settings.classical_cap}."
        )
    total = Fraction(0)
    for p in iter_family(LatticeFamily.ALL, n):
        value = _lookup(phi_table, p)
        if singleton_condition and value and any(len(b) == 1 for b in p.blocks):
            raise WeightError(f"phi({p}) = {format_rational(value)} violates the singleton condition.")
        count = count_kernel_maps(p, N)
        if count:
            total += count * value
    return CltMoment(N, n, total)


def clt_limit(n: int, phi_table: PhiTable) -> Fraction:
    """N -> infinity limit under the singleton condition: sum of phi over pairings."""
    if n % 2:
        return Fraction(0)
    return sum(
        (_lookup(phi_table, p) for p in iter_family(LatticeFamily.PAIR, n)), Fraction(0)
    )


def _labels_for(p: Partition) -> tuple[str, ...]:
    return tuple(f"X{label + 1}" for label in p.labels())


def wick_table(weight: PairWeight, n: int) -> dict[Partition, Fraction]:
    """phi(p) of the Gaussian state of ``weight`` for every p in Pi_n."""
    return {p: wick_moment(weight, _labels_for(p)) for p in iter_family(LatticeFamily.ALL, n)}


def block_factorized_table(moments: Sequence[Fraction], n: int) -> dict[Partition, Fraction]:
    """
    Classical i.i.d. table phi(p) = prod_B m_|B| with ``moments[k - 1]`` = m_k.
    """
    if len(moments) < n:
        raise WeightError(f"need moments up to degree {n}, got {len(moments)}.")
    table = {}
    for p in iter_family(LatticeFamily.ALL, n):
        value = Fraction(1)
        for size in p.block_sizes():
            value *= Fraction(moments[size - 1])
        table[p] = value
    return table


# --- cli ---------------------------------------------------------------------

FAMILY_CHOICE = click.Choice(["classical", "free", "boolean"])


def _resolve_state(weight: str | None, spec_path: Path | None) -> State:
    if (weight is None) == (spec_path is None):
        raise InvalidInput("provide exactly one of --weight or --spec.")
    if weight is not None:
        return parse_weight(weight)
    return load_spec(spec_path)


def _parse_poly_option(text: str) -> NCPolynomial:
    stripped = text.strip()
    if stripped.startswith("{"):
        return NCPolynomial.from_json(parse_inline_json(stripped, origin="--poly"))
    return parse_polynomial(stripped)


@click.command("wick")
@click.option("--weight", required=True, help="classical, free, boolean, q:<p/q>, custom:<path>")
@click.option("--word", required=True, help="Comma-separated labels, e.g. X,Y,X,Y.")
def wick_command(weight: str, word: str) -> None:
    """Gaussian moment of a word."""
    value = wick_moment(parse_weight(weight), parse_labels(word))
    echo_json({"value": format_rational(value)})


@click.command("phi")
@click.option("--weight", help="Gaussian pair weight.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="Cumulant spec state.")
@click.option("--poly", required=True, help="e.g. 'X1*X1 + -1*X2*X2' or polynomial JSON.")
def phi_command(weight: str | None, spec_path: Path | None, poly: str) -> None:
    """Moment functional applied to a polynomial."""
    state = _resolve_state(weight, spec_path)
    echo_json({"value": format_rational(phi(state, _parse_poly_option(poly)))})


@click.command("joint-cumulant")
@click.option("--weight", help="Gaussian pair weight.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="Cumulant spec state.")
@click.option("--family", type=FAMILY_CHOICE, default="classical", show_default=True)
@click.option("--poly", "polys", multiple=True, required=True, help="Repeat once per argument.")
@click.option("--allow-mismatch", is_flag=True, help="Allow a family other than the state's own.")
def joint_cumulant_command(
    weight: str | None,
    spec_path: Path | None,
    family: str,
    polys: tuple[str, ...],
    allow_mismatch: bool,
) -> None:
    """Joint cumulant of polynomial arguments."""
    state = _resolve_state(weight, spec_path)
    value = joint_cumulant_of_polynomials(
        state, family, [_parse_poly_option(p) for p in polys], allow_mismatch=allow_mismatch
    )
    echo_json({"value": format_rational(value)})


@click.command("clt")
@click.option("--N", "N", type=int, required=True, help="Number of summands.")
@click.option("--n", "n", type=int, required=True, help="Moment degree.")
@click.option("--moments", "moments_text", help="i.i.d. moments m_1,m_2,... (classical table).")
@click.option("--weight", help="Use the Gaussian table of a pair weight instead.")
@click.option("--singleton", is_flag=True, help="Assert the singleton condition.")
def clt_command(
    N: int, n: int, moments_text: str | None, weight: str | None, singleton: bool
) -> None:
    """Exact finite-N central-limit moment and its limit."""
    if (moments_text is None) == (weight is None):
        raise InvalidInput("provide exactly one of --moments or --weight.")
    if moments_text is not None:
        table = block_factorized_table(parse_rational_list(moments_text, origin="--moments"), n)
    else:
        table = wick_table(parse_weight(weight or ""), n)
    result = clt_moment(N, n, table, singleton_condition=singleton)
    payload = result.to_json()
    payload["limit"] = format_rational(clt_limit(n, table))
    echo_json(payload)
