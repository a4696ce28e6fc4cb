"""
Moment/cumulant transforms over the classical, free and boolean calculi.

Each calculus sums over one partition family: all partitions (classical),
noncrossing partitions (free) or interval partitions (boolean). Moments are

    m(t) = sum_{p in family} K_p(t)

and cumulants are recovered by the triangular recursion
``K(t) = m(t) - sum_{p != 1} K_p(t)``, which needs no family-specific Mobius
function.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

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
from cumulanttools.matrices import RationalMatrix, load_matrix
from cumulanttools.partitions import (
    LatticeFamily,
    Partition,
    iter_family,
    kernel,
    mobius_to_top,
    product_formula_partitions,
    top,
)
from cumulanttools.state import Settings, load_document, load_settings

CALCULI: dict[str, LatticeFamily] = {
    "classical": LatticeFamily.ALL,
    "free": LatticeFamily.NONCROSSING,
    "boolean": LatticeFamily.INTERVAL,
}
CALCULUS_NAMES = {family: name for name, family in CALCULI.items()}

Label = Hashable
Moment = Callable[[tuple[Label, ...]], Fraction]


class SpecError(InvalidInput):
    """Invalid cumulant specification or an exceeded enumeration cap."""


def calculus_family(name: str | LatticeFamily) -> LatticeFamily:
    """Map "classical" / "free" / "boolean" (or a family) to its lattice family."""
    if isinstance(name, LatticeFamily):
        family = name
    elif name in CALCULI:
        family = CALCULI[name]
    else:
        try:
            family = LatticeFamily(name)
        except ValueError:
            raise SpecError(
                f"unknown calculus {name!r}; expected one of {', '.join(CALCULI)}."
            ) from None
    if family not in CALCULUS_NAMES:
        raise SpecError(f"family {family.value!r} does not define a cumulant calculus.")
    return family


def _check_degree(n: int, family: LatticeFamily, settings: Settings) -> None:
    if n > settings.degree_cap:
        raise SpecError(
            f"degree {n} exceeds the configured cap of {settings.degree_cap}."
        )
    if family is LatticeFamily.ALL and n > settings.classical_cap:
        raise SpecError(
            f"classical sums over all partitions of {n} exceed the configured "
            f"cap of {settings.classical_cap}."
        )


def _flag(data: Mapping[str, Any], key: str) -> bool:
    value = data.get(key, False)
    if not isinstance(value, bool):
        raise SpecError(f'"{key}" must be true or false, got {value!r}.')
    return value


@dataclass(frozen=True)
class CumulantSpec:
    """
    Joint cumulants keyed by ordered label tuples.

    Absent tuples are zero. ``independent`` asserts that mixed tuples vanish;
    ``nondegenerate`` asserts K2(X, X) > 0 for every label.
    """

    labels: tuple[str, ...]
    entries: Mapping[tuple[str, ...], Fraction] = field(default_factory=dict)
    family: LatticeFamily = LatticeFamily.ALL
    independent: bool = False
    nondegenerate: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", calculus_family(self.family))
        object.__setattr__(self, "labels", tuple(self.labels))
        known = set(self.labels)
        if len(known) != len(self.labels):
            raise SpecError("spec labels must be distinct.")
        cleaned: dict[tuple[str, ...], Fraction] = {}
        for args, value in self.entries.items():
            args = tuple(args)
            if not args:
                raise SpecError("cumulant entries need arity >= 1.")
            unknown = [label for label in args if label not in known]
            if unknown:
                raise SpecError(f"entry {args} uses undeclared labels {unknown}.")
            value = parse_rational(value, origin=f"entry {args}")
            if value == 0:
                continue
            if self.independent and len(set(args)) > 1:
                raise SpecError(
                    f"spec is declared independent but mixed cumulant {args} is nonzero."
                )
            cleaned[args] = value
        object.__setattr__(self, "entries", cleaned)
        if self.nondegenerate:
            for label in self.labels:
                if cleaned.get((label, label), Fraction(0)) <= 0:
                    raise SpecError(
                        f"spec is declared nondegenerate but K2({label},{label}) <= 0."
                    )

    @classmethod
    def univariate(
        cls,
        cumulants: Mapping[int, Fraction | int | str],
        *,
        label: str = "X",
        family: LatticeFamily | str = LatticeFamily.ALL,
        nondegenerate: bool = False,
    ) -> CumulantSpec:
        """One-label spec from ``{arity: K_arity}``."""
        return cls(
            (label,),
            {(label,) * arity: parse_rational(value) for arity, value in cumulants.items()},
            calculus_family(family),
            independent=True,
            nondegenerate=nondegenerate,
        )

    @property
    def calculus(self) -> str:
        return CALCULUS_NAMES[self.family]

    def cumulant(self, args: Sequence[Label]) -> Fraction:
        key = tuple(args)
        missing = [label for label in key if label not in self.labels]
        if missing:
            raise SpecError(f"labels {missing} are not declared in this spec.")
        return self.entries.get(key, Fraction(0))

    def diagonal(self, n: int, label: str | None = None) -> Fraction:
        """K_n(X, ..., X) for ``label`` (the only label when omitted)."""
        if label is None:
            if len(self.labels) != 1:
                raise SpecError("diagonal cumulants of a multi-label spec need a label.")
            label = self.labels[0]
        return self.cumulant((label,) * n)

    def max_arity(self) -> int:
        return max((len(args) for args in self.entries), default=0)

    def to_json(self) -> dict[str, Any]:
        return {
            "family": self.calculus,
            "labels": list(self.labels),
            "independent": self.independent,
            "nondegenerate": self.nondegenerate,
            "entries": [
                {"args": list(args), "value": format_rational(value)}
                for args, value in sorted(self.entries.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: object) -> CumulantSpec:
        if not isinstance(data, dict):
            raise SpecError("cumulant spec JSON must be an object.")
        raw_entries = data.get("entries", [])
        if not isinstance(raw_entries, list):
            raise SpecError('"entries" must be an array.')
        entries: dict[tuple[str, ...], Fraction] = {}
        for item in raw_entries:
            if not isinstance(item, dict) or "args" not in item or "value" not in item:
                raise SpecError('each entry needs "args" and "value".')
            args = item["args"]
            if not isinstance(args, list) or not all(isinstance(a, str) for a in args):
                raise SpecError('"args" must be an array of label strings.')
            key = tuple(args)
            if key in entries:
                raise SpecError(f"duplicate entry for {key}.")
            entries[key] = parse_rational(item["value"], origin=f"entry {key}")
        labels = data.get("labels")
        if labels is None:
            labels = sorted({label for args in entries for label in args})
        if not isinstance(labels, list) or not all(isinstance(a, str) for a in labels):
            raise SpecError('"labels" must be an array of strings.')
        return cls(
            tuple(labels),
            entries,
            calculus_family(data.get("family", "classical")),
            independent=_flag(data, "independent"),
            nondegenerate=_flag(data, "nondegenerate"),
        )


@dataclass(frozen=True)
class MomentFunction:
    """Joint moments phi(X_t1 ... X_tn) for every label tuple up to ``max_degree``."""

    labels: tuple[str, ...]
    max_degree: int
    values: Mapping[tuple[str, ...], Fraction]

    def __post_init__(self) -> None:
        for args in self.values:
            if len(args) > self.max_degree or any(a not in self.labels for a in args):
                raise SpecError(f"moment tuple {args} is outside the declared range.")

    def __call__(self, args: tuple[str, ...]) -> Fraction:
        if not args:
            return Fraction(1)
        try:
            return self.values[args]
        except KeyError:
            raise SpecError(f"moment {args} is not defined.") from None

    def tuples(self) -> list[tuple[str, ...]]:
        return [
            args
            for degree in range(1, self.max_degree + 1)
            for args in itertools.product(self.labels, repeat=degree)
        ]

    @classmethod
    def univariate(cls, moments: Sequence[Fraction | int | str], *, label: str = "X") -> MomentFunction:
        """``moments[k - 1]`` is phi(X^k)."""
        return cls(
            (label,),
            len(moments),
            {(label,) * (k + 1): parse_rational(v) for k, v in enumerate(moments)},
        )

    @classmethod
    def from_callable(
        cls, labels: Sequence[str], max_degree: int, moment: Moment
    ) -> MomentFunction:
        labels = tuple(labels)
        values = {
            args: moment(args)
            for degree in range(1, max_degree + 1)
            for args in itertools.product(labels, repeat=degree)
        }
        return cls(labels, max_degree, values)

    @classmethod
    def from_spec(cls, spec: CumulantSpec, max_degree: int) -> MomentFunction:
        return cls.from_callable(
            spec.labels, max_degree, lambda args: moments_from_cumulants(spec, args)
        )

    @classmethod
    def from_json(cls, data: object) -> MomentFunction:
        if not isinstance(data, dict) or not isinstance(data.get("moments"), list):
            raise SpecError('moment JSON must be an object with a "moments" array.')
        values: dict[tuple[str, ...], Fraction] = {}
        for item in data["moments"]:
            if not isinstance(item, dict) or not isinstance(item.get("args"), list):
                raise SpecError('each moment needs "args" and "value".')
            args = tuple(str(a) for a in item["args"])
            values[args] = parse_rational(item.get("value"), origin=f"moment {args}")
        labels = data.get("labels") or sorted({a for args in values for a in args})
        max_degree = data.get("max_degree") or max((len(a) for a in values), default=0)
        return cls(tuple(labels), int(max_degree), values)


def _block_args(args: Sequence[Label], block: Sequence[int]) -> tuple[Label, ...]:
    return tuple(args[i - 1] for i in block)


def partitioned_cumulant(spec: CumulantSpec, p: Partition, args: Sequence[Label]) -> Fraction:
    """K_p(args): the product over blocks of the restricted cumulants."""
    if len(args) != p.n:
        raise SpecError(f"{len(args)} arguments given for a partition of {p.n}.")
    value = Fraction(1)
    for block in p.blocks:
        factor = spec.cumulant(_block_args(args, block))
        if factor == 0:
            return Fraction(0)
        value *= factor
    return value


def moments_from_cumulants(
    spec: CumulantSpec, args: Sequence[Label], *, settings: Settings | None = None
) -> Fraction:
    """phi(X_args) as a sum of partitioned cumulants over ``spec.family``."""
    args = tuple(args)
    if not args:
        raise SpecError("moments need at least one argument.")
    spec.cumulant(args)  # label check
    _check_degree(len(args), spec.family, settings or load_settings())
    return sum(
        (partitioned_cumulant(spec, p, args) for p in iter_family(spec.family, len(args))),
        Fraction(0),
    )


def product_cumulant(
    spec: CumulantSpec,
    args: Sequence[Label],
    grouping: Partition,
    *,
    settings: Settings | None = None,
) -> Fraction:
    """
    Cumulant whose arguments are the products of ``args`` over the blocks of ``grouping``.

    Sums K_rho(args) over rho in ``spec.family`` with rho v grouping = 1.
    For an independent spec only rho finer than ker(args) contribute.
    """
    args = tuple(args)
    if len(args) != grouping.n:
        raise SpecError(f"{len(args)} arguments given for a grouping of {grouping.n}.")
    spec.cumulant(args)  # label check
    _check_degree(len(args), spec.family, settings or load_settings())
    base = kernel(args) if spec.independent else top(len(args))
    return sum(
        (
            partitioned_cumulant(spec, rho, args)
            for rho in product_formula_partitions(grouping, spec.family, base)
        ),
        Fraction(0),
    )


def cumulant_from_moments(
    moment: Moment,
    family: LatticeFamily,
    args: Sequence[Label],
    *,
    memo: dict[tuple[Label, ...], Fraction] | None = None,
    settings: Settings | None = None,
) -> Fraction:
    """
    K(args) from a moment oracle by triangular recursion over ``family``.

    ``memo`` may be shared between calls on the same oracle; it is keyed by
    argument tuple.
    """
    family = calculus_family(family)
    settings = settings or load_settings()
    cache: dict[tuple[Label, ...], Fraction] = {} if memo is None else memo

    def solve(t: tuple[Label, ...]) -> Fraction:
        if t in cache:
            return cache[t]
        _check_degree(len(t), family, settings)
        value = moment(t)
        for p in iter_family(family, len(t)):
            if len(p.blocks) == 1:
                continue
            term = Fraction(1)
            for block in p.blocks:
                term *= solve(_block_args(t, block))
                if term == 0:
                    break
            value -= term
        cache[t] = value
        return value

    args = tuple(args)
    if not args:
        raise SpecError("cumulants need at least one argument.")
    return solve(args)


def mobius_cumulant(moment: Moment, args: Sequence[Label]) -> Fraction:
    """Classical cumulant by explicit Mobius inversion over all partitions."""
    args = tuple(args)
    _check_degree(len(args), LatticeFamily.ALL, load_settings())
    total = Fraction(0)
    for p in iter_family(LatticeFamily.ALL, len(args)):
        term = mobius_to_top(p)
        for block in p.blocks:
            term *= moment(_block_args(args, block))
        total += term
    return total


def cumulants_from_moments(
    m: MomentFunction,
    family: LatticeFamily | str,
    *,
    independent: bool = False,
) -> CumulantSpec:
    """The unique spec reproducing ``m`` in ``family``, up to ``m.max_degree``."""
    family = calculus_family(family)
    settings = load_settings()
    _check_degree(m.max_degree, family, settings)
    memo: dict[tuple[Label, ...], Fraction] = {}
    entries = {
        args: cumulant_from_moments(m, family, args, memo=memo, settings=settings)
        for args in m.tuples()
    }
    return CumulantSpec(m.labels, entries, family, independent=independent)


def linear_form_cumulants(
    C: RationalMatrix, xspecs: Sequence[CumulantSpec], args: Sequence[int]
) -> Fraction:
    """
    K_n(Y_args) for Y = C X with independent X_i.

    Multilinearity plus vanishing mixed cumulants leave
    sum_i prod_k C[args[k], i] * K_n(X_i). Row indices are 0-based.
    """
    if len(xspecs) != C.cols:
        raise SpecError(f"{len(xspecs)} variable specs for a matrix with {C.cols} columns.")
    if not args:
        raise SpecError("cumulants need at least one argument.")
    if any(not 0 <= row < C.rows for row in args):
        raise SpecError(f"row indices {list(args)} out of range for {C.rows} rows.")
    total = Fraction(0)
    for column, spec in enumerate(xspecs):
        coefficient = Fraction(1)
        for row in args:
            coefficient *= C[row, column]
            if coefficient == 0:
                break
        if coefficient:
            total += coefficient * spec.diagonal(len(args))
    return total


def split_independent(spec: CumulantSpec) -> list[CumulantSpec]:
    """One-label specs for each variable of an independent spec, in label order."""
    if not spec.independent and len(spec.labels) > 1:
        raise SpecError("only independent specs split into per-variable specs.")
    return [
        CumulantSpec(
            (label,),
            {args: v for args, v in spec.entries.items() if args[0] == label},
            spec.family,
            independent=True,
        )
        for label in spec.labels
    ]


def iid_spec(spec: CumulantSpec, labels: Sequence[str]) -> CumulantSpec:
    """Independent copies of a one-label spec, one per label."""
    if len(spec.labels) != 1:
        raise SpecError("i.i.d. copies need a one-label spec.")
    source = spec.labels[0]
    entries: dict[tuple[str, ...], Fraction] = {}
    for args, value in spec.entries.items():
        if set(args) != {source}:
            continue
        for label in labels:
            entries[(label,) * len(args)] = value
    return CumulantSpec(
        tuple(labels), entries, spec.family, independent=True, nondegenerate=spec.nondegenerate
    )


def shift_spec(spec: CumulantSpec, label: str, c: Fraction | int) -> CumulantSpec:
    """
    X -> X + c.

    Classical and free cumulants of arity >= 2 vanish as soon as one argument
    is a constant, so only K1(X) moves. Boolean cumulants do not have that
    property.
    """
    if spec.family is LatticeFamily.INTERVAL:
        raise SpecError("boolean cumulants are not shift covariant.")
    spec.cumulant((label,))
    entries = dict(spec.entries)
    entries[(label,)] = entries.get((label,), Fraction(0)) + Fraction(c)
    return CumulantSpec(
        spec.labels, entries, spec.family, spec.independent, spec.nondegenerate
    )


def scale_spec(spec: CumulantSpec, label: str, s: Fraction | int) -> CumulantSpec:
    """X -> sX multiplies every cumulant by s to the number of X arguments."""
    spec.cumulant((label,))
    s = Fraction(s)
    entries = {args: value * s ** args.count(label) for args, value in spec.entries.items()}
    return CumulantSpec(
        spec.labels,
        entries,
        spec.family,
        spec.independent,
        spec.nondegenerate and s != 0,
    )


def load_spec(path: Path | None = None, inline: str | None = None) -> CumulantSpec:
    """Read a spec from ``--spec PATH`` or ``--json INLINE``."""
    if (path is None) == (inline is None):
        raise SpecError("provide exactly one of --spec or --json.")
    if path is not None:
        return CumulantSpec.from_json(load_document(path))
    return CumulantSpec.from_json(parse_inline_json(inline or ""))


# --- cli -------------------------------------------------------------------

_spec_path = click.option(
    "--spec", "spec_path", type=click.Path(path_type=Path), help="Cumulant spec JSON/YAML file."
)
_spec_json = click.option("--json", "inline", help="Inline cumulant spec JSON.")
CALCULUS_CHOICE = click.Choice(sorted(CALCULI))


@click.group(help="Moment/cumulant transforms.")
def cli() -> None:
    """Root command group for the cumulant engine."""


@cli.command("to-moments")
@_spec_path
@_spec_json
@click.option("--args", "args_text", required=True, help="Label tuple, e.g. X,X,Y.")
def to_moments_command(spec_path: Path | None, inline: str | None, args_text: str) -> None:
    """Joint moment of the given labels."""
    spec = load_spec(spec_path, inline)
    value = moments_from_cumulants(spec, parse_labels(args_text, origin="--args"))
    echo_json({"value": format_rational(value)})


@cli.command("partitioned")
@_spec_path
@_spec_json
@click.option("--partition", "partition_text", required=True, help="e.g. 1,3|2,4")
@click.option("--args", "args_text", required=True, help="Label tuple, e.g. X,X,Y,Y.")
def partitioned_command(
    spec_path: Path | None, inline: str | None, partition_text: str, args_text: str
) -> None:
    """Partitioned cumulant K_p of the given labels."""
    spec = load_spec(spec_path, inline)
    value = partitioned_cumulant(
        spec, Partition.parse(partition_text), parse_labels(args_text, origin="--args")
    )
    echo_json({"value": format_rational(value)})


@cli.command("product")
@_spec_path
@_spec_json
@click.option("--grouping", "grouping_text", required=True, help="Blocks multiplied together, e.g. 1|2,3")
@click.option("--args", "args_text", required=True, help="Label tuple, e.g. X,X,X.")
def product_command(
    spec_path: Path | None, inline: str | None, grouping_text: str, args_text: str
) -> None:
    """Cumulant with products of the given labels as arguments."""
    spec = load_spec(spec_path, inline)
    value = product_cumulant(
        spec, parse_labels(args_text, origin="--args"), Partition.parse(grouping_text)
    )
    echo_json({"value": format_rational(value)})


@cli.command("from-moments")
@click.option("--moments", "moments_text", help="phi(X), phi(X^2), ... for one variable.")
@click.option("--label", default="X", show_default=True)
@click.option("--json", "inline", help='Inline {"labels", "max_degree", "moments": [...]}.')
@click.option("--family", type=CALCULUS_CHOICE, default="classical", show_default=True)
def from_moments_command(
    moments_text: str | None, label: str, inline: str | None, family: str
) -> None:
    """Invert a moment table into a cumulant spec."""
    if (moments_text is None) == (inline is None):
        raise SpecError("provide exactly one of --moments or --json.")
    if moments_text is not None:
        m = MomentFunction.univariate(
            parse_rational_list(moments_text, origin="--moments"), label=label
        )
    else:
        m = MomentFunction.from_json(parse_inline_json(inline or ""))
    echo_json(cumulants_from_moments(m, family, independent=len(m.labels) == 1).to_json())


@cli.command("linear-form")
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path), required=True)
@click.option(
    "--spec",
    "spec_paths",
    type=click.Path(path_type=Path),
    multiple=True,
    required=True,
    help="One spec per column, or a single independent spec with one label per column.",
)
@click.option("--args", "args_text", required=True, help="1-based row indices, e.g. 1,1,2.")
def linear_form_command(
    matrix_path: Path, spec_paths: tuple[Path, ...], args_text: str
) -> None:
    """Joint cumulant of rows of Y = C X for independent X."""
    matrix = load_matrix(matrix_path)
    specs = [load_spec(path) for path in spec_paths]
    if len(specs) == 1 and len(specs[0].labels) > 1:
        specs = split_independent(specs[0])
    try:
        rows = [int(part) - 1 for part in args_text.split(",")]
    except ValueError:
        raise SpecError("--args must be comma-separated row numbers.") from None
    echo_json({"value": format_rational(linear_form_cumulants(matrix, specs, rows))})
