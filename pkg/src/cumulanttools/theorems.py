"""
Executable checks of the Gaussian characterization theorems and of the
free-probability counterexamples.

Every check is a pure function of its parameters returning a ``CheckReport``
with exact witnesses. The ``check`` click group wraps each one in
``progress.operation`` and exits 1 when the verdict is ``fail``.
"""

from __future__ import annotations

import concurrent.futures
import itertools
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import click

from cumulanttools.common import (
    InvalidInput,
    echo_json,
    format_rational,
    format_rationals,
    parse_rational,
    parse_rational_list,
)
from cumulanttools.cumulants import (
    CumulantSpec,
    iid_spec,
    linear_form_cumulants,
    load_spec,
    moments_from_cumulants,
    partitioned_cumulant,
    product_cumulant,
    split_independent,
)
from cumulanttools.forms import linear_form, variable_labels
from cumulanttools.matrices import (
    RationalMatrix,
    is_irreducible,
    load_matrix,
    parse_vector,
    pythagorean_rotation,
)
from cumulanttools.partitions import (
    LatticeFamily,
    lukacs_grouping,
    product_formula_partitions,
    top,
)
from cumulanttools.polynomials import NCPolynomial
from cumulanttools.progress import emit, operation
from cumulanttools.state import load_baseline, save_baseline
from cumulanttools.wick import (
    PairWeight,
    State,
    joint_cumulant_of_polynomials,
    parse_weight,
    phi,
    wick_moment,
)


class PreconditionError(InvalidInput):
    """A theorem hypothesis the check relies on does not hold."""


@dataclass(frozen=True)
class Witness:
    desc: str
    value: Fraction

    def to_json(self) -> dict[str, str]:
        return {"desc": self.desc, "value": format_rational(self.value)}


@dataclass(frozen=True)
class CheckReport:
    check: str
    params: Mapping[str, Any]
    passed: bool
    witnesses: tuple[Witness, ...]
    max_order: int
    conclusion: str = ""
    details: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.passed and not any(w.value for w in self.witnesses):
            raise ValueError(f"{self.check}: a failing report needs a nonzero witness.")

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "check": self.check,
            "params": dict(self.params),
            "verdict": self.verdict,
            "max_order": self.max_order,
            "witnesses": [w.to_json() for w in self.witnesses],
        }
        if self.conclusion:
            payload["conclusion"] = self.conclusion
        if self.details:
            payload["details"] = dict(self.details)
        return payload


def _one_label(spec: CumulantSpec, check: str) -> str:
    if len(spec.labels) != 1:
        raise PreconditionError(
            f"{check} needs a spec with exactly one label, got {len(spec.labels)}."
        )
    return spec.labels[0]


def _per_variable(specs: Sequence[CumulantSpec], count: int | None = None) -> list[CumulantSpec]:
    if len(specs) == 1 and len(specs[0].labels) > 1:
        specs = split_independent(specs[0])
    if count is not None and len(specs) != count:
        raise PreconditionError(f"expected {count} variable specs, got {len(specs)}.")
    return list(specs)


def _args_desc(prefix: str, word: Sequence[int]) -> str:
    return f"K{len(word)}(" + ",".join(f"{prefix}{i + 1}" for i in word) + ")"


def _mixed_words(rows: int, max_order: int) -> list[tuple[int, ...]]:
    """Multisets of row indices with at least two distinct rows."""
    return [
        word
        for order in range(2, max_order + 1)
        for word in itertools.combinations_with_replacement(range(rows), order)
        if len(set(word)) > 1
    ]


# --- stability ---------------------------------------------------------------


def check_stability(a: Sequence[Fraction], spec: CumulantSpec, max_order: int) -> CheckReport:
    """
    Whether sum a_i X_i (sum a_i^2 = 1, X_i i.i.d.) reproduces the law of X.

    K_m(sum a_i X_i) = (sum a_i^m) K_m(X); a nonzero K_m with sum a_i^m != 1
    breaks stability.
    """
    a = [Fraction(v) for v in a]
    if sum(v * v for v in a) != 1:
        raise PreconditionError("stability needs coefficients with sum of squares 1.")
    label = _one_label(spec, "stability")
    witnesses: list[Witness] = []
    violations: list[int] = []
    forced = True
    for m in range(1, max_order + 1):
        k_m = spec.diagonal(m, label)
        factor = sum(v**m for v in a)
        combined = factor * k_m
        witnesses.append(Witness(f"K{m}(sum a X)", combined))
        if combined != k_m:
            violations.append(m)
            witnesses.append(Witness(f"K{m}(sum a X) - K{m}(X)", combined - k_m))
        elif m != 2 and k_m != 0:
            forced = False
    conclusion = "gaussian forced" if forced else "non-gaussian fixed point"
    return CheckReport(
        "stability",
        {"a": format_rationals(a), "spec": spec.to_json()},
        not violations,
        tuple(witnesses),
        max_order,
        conclusion,
        {"violations": violations},
    )


# --- Maxwell -------------------------------------------------------------------


def _rotated(U: RationalMatrix, labels: Sequence[str]) -> list[NCPolynomial]:
    return [linear_form(U.entries[j], labels) for j in range(U.rows)]


def check_maxwell_forward(weight: PairWeight, U: RationalMatrix, degree: int) -> CheckReport:
    """Every Y-word moment for Y = UX equals the matching X-word moment."""
    if not U.is_orthogonal():
        raise PreconditionError("spherical symmetry is tested with orthogonal matrices only.")
    labels = variable_labels(U.rows)
    ys = _rotated(U, labels)
    mismatches: list[Witness] = []
    samples: list[Witness] = []
    checked = 0
    # odd words vanish on both sides
    for length in range(2, degree + 1, 2):
        for word in itertools.product(range(U.rows), repeat=length):
            product = NCPolynomial.scalar(1)
            for j in word:
                product = product * ys[j]
            left = phi(weight, product)
            right = wick_moment(weight, [labels[j] for j in word])
            checked += 1
            if left != right:
                mismatches.append(
                    Witness(f"phi({'*'.join(f'Y{j + 1}' for j in word)}) - phi(X-word)", left - right)
                )
        samples.append(Witness(f"phi(Y1^{length})", phi(weight, ys[0] ** length)))
    return CheckReport(
        "maxwell",
        {"weight": str(weight), "matrix": U.to_json()},
        not mismatches,
        tuple(mismatches[:20] or samples),
        degree,
        "moments invariant" if not mismatches else "moments not invariant",
        {"words_checked": checked, "mismatches": len(mismatches)},
    )


def check_maxwell_converse(U: RationalMatrix, spec: CumulantSpec, max_order: int) -> CheckReport:
    """
    Contraction factors sum_k U_jk^m for the converse direction.

    Invariance under U forces (sum_k U_jk^m - 1) K_m(X) = 0 for every row j.
    With no entry of modulus 1 every factor for m >= 3 differs from 1, so
    only K_2 can survive.
    """
    if not U.is_orthogonal():
        raise PreconditionError("the converse is stated for orthogonal matrices.")
    label = _one_label(spec, "the converse check")
    unit_entries = [
        (i, j) for i in range(U.rows) for j in range(U.cols) if abs(U[i, j]) == 1
    ]
    table: list[dict[str, Any]] = []
    violations: list[Witness] = []
    factors_differ = True
    for m in range(2, max_order + 1):
        k_m = spec.diagonal(m, label)
        for j in range(U.rows):
            factor = sum((U[j, k] ** m for k in range(U.cols)), Fraction(0))
            table.append({"row": j + 1, "m": m, "factor": format_rational(factor)})
            if m >= 3 and factor == 1:
                factors_differ = False
            if factor * k_m != k_m:
                violations.append(Witness(f"K{m}(Y{j + 1}) - K{m}(X)", factor * k_m - k_m))
    if unit_entries:
        conclusion = "no conclusion: an entry has modulus 1"
    elif factors_differ:
        conclusion = "cumulants of order >= 3 forced to vanish"
    else:
        conclusion = "no conclusion: a contraction factor equals 1"
    witnesses = violations or [
        Witness(f"K{m}(X)", spec.diagonal(m, label)) for m in range(2, max_order + 1)
    ]
    return CheckReport(
        "maxwell-converse",
        {"matrix": U.to_json(), "spec": spec.to_json()},
        not violations,
        tuple(witnesses),
        max_order,
        conclusion,
        {
            "factors": table,
            "unit_entries": [[i + 1, j + 1] for i, j in unit_entries],
        },
    )


# --- Bernstein -----------------------------------------------------------------


def check_bernstein(
    alpha: Fraction,
    beta: Fraction,
    gamma: Fraction,
    delta: Fraction,
    specs: Sequence[CumulantSpec],
    max_order: int,
) -> CheckReport:
    """
    Y1 = alpha X1 + beta X2, Y2 = gamma X1 + delta X2 with orthogonal columns.

    For each order m >= 3 the mixed cumulants K_m(Y1^(m-1), Y2) and
    K_m(Y1^(m-2), Y2^2) form a linear system in K_m(X1), K_m(X2) whose
    determinant det(C) alpha^(m-2) gamma beta^(m-2) delta must not vanish.
    """
    coefficients = [Fraction(v) for v in (alpha, beta, gamma, delta)]
    if any(v == 0 for v in coefficients):
        raise PreconditionError("all four coefficients must be nonzero.")
    alpha, beta, gamma, delta = coefficients
    if alpha * gamma + beta * delta != 0:
        raise PreconditionError("columns are not orthogonal: alpha*gamma + beta*delta != 0.")
    xspecs = _per_variable(specs, 2)
    C = RationalMatrix.from_rows([[alpha, beta], [gamma, delta]])
    variance_gap = alpha * gamma * (xspecs[0].diagonal(2) - xspecs[1].diagonal(2))
    witnesses = [Witness("K2(Y1,Y2)", linear_form_cumulants(C, xspecs, (0, 1)))]
    determinants = []
    for m in range(3, max_order + 1):
        system = RationalMatrix.from_rows(
            [
                [alpha ** (m - 1) * gamma, beta ** (m - 1) * delta],
                [alpha ** (m - 2) * gamma**2, beta ** (m - 2) * delta**2],
            ]
        )
        det = system.determinant()
        determinants.append({"m": m, "determinant": format_rational(det)})
        witnesses.append(Witness(f"det system m={m}", det))
    mixed = [
        Witness(_args_desc("Y", word), linear_form_cumulants(C, xspecs, word))
        for word in _mixed_words(2, max_order)
    ]
    hypothesis = all(w.value == 0 for w in mixed)
    passed = all(w.value != 0 for w in witnesses[1:])
    if not hypothesis:
        conclusion = "mixed cumulants nonzero: hypothesis not met"
    elif passed:
        conclusion = "equal variances and vanishing higher cumulants forced"
    else:
        conclusion = "singular system"
    return CheckReport(
        "bernstein",
        {
            "coefficients": format_rationals(coefficients),
            "specs": [s.to_json() for s in xspecs],
        },
        passed,
        tuple(witnesses + mixed),
        max_order,
        conclusion,
        {
            "variance_gap": format_rational(variance_gap),
            "systems": determinants,
            "mixed_vanish": hypothesis,
        },
    )


def check_bernstein_multi(
    U: RationalMatrix, specs: Sequence[CumulantSpec], max_order: int
) -> CheckReport:
    """
    Multidimensional Bernstein: for irreducible U, vanishing mixed cumulants
    of Y = UX force equal variances and vanishing cumulants of order >= 3.
    """
    if not U.is_square:
        raise PreconditionError("the multidimensional check needs a square matrix.")
    xspecs = _per_variable(specs, U.cols)
    irreducible = is_irreducible(U)
    variances = [s.diagonal(2) for s in xspecs]
    H = U @ RationalMatrix.diagonal(variances) @ U.T
    mixed = [
        Witness(_args_desc("Y", word), linear_form_cumulants(U, xspecs, word))
        for word in _mixed_words(U.rows, max_order)
    ]
    hypothesis = all(w.value == 0 for w in mixed)
    offending: list[Witness] = []
    if hypothesis and irreducible:
        offending.extend(
            Witness(f"K2(X{i + 1}) - K2(X1)", v - variances[0])
            for i, v in enumerate(variances)
            if v != variances[0]
        )
        offending.extend(
            Witness(f"K{m}(X{i + 1})", s.diagonal(m))
            for m in range(3, max_order + 1)
            for i, s in enumerate(xspecs)
            if s.diagonal(m) != 0
        )
    if not irreducible:
        conclusion = "reducible matrix: no conclusion"
    elif not hypothesis:
        conclusion = "mixed cumulants nonzero: hypothesis not met"
    elif offending:
        conclusion = "inconsistent: hypothesis holds but the specs are not i.i.d. Gaussian"
    else:
        conclusion = "equal variances and vanishing higher cumulants"
    witnesses = offending or [w for w in mixed if w.value] or [
        Witness(f"K2(X{i + 1})", v) for i, v in enumerate(variances)
    ]
    return CheckReport(
        "bernstein-multi",
        {"matrix": U.to_json(), "specs": [s.to_json() for s in xspecs]},
        not offending,
        tuple(witnesses),
        max_order,
        conclusion,
        {
            "irreducible": irreducible,
            "variance_matrix": H.to_json(),
            "mixed_vanish": hypothesis,
        },
    )


# --- Skitovic-Darmois ----------------------------------------------------------

SKITOVIC_ROWS = ((2, -1, 2), (2, 2, -1))


def skitovic_specs(eps: Fraction) -> list[CumulantSpec]:
    """Free variables with K2 = 1, K3(X1) = eps/4, K3(X2) = K3(X3) = eps."""
    return [
        CumulantSpec.univariate({2: 1, 3: k3}, label=f"X{i + 1}", family="free")
        for i, k3 in enumerate((eps / 4, eps, eps))
    ]


def check_skitovic_failure(eps: Fraction, max_order: int) -> CheckReport:
    """Non-semicircular free variables whose two linear forms are free."""
    eps = Fraction(eps)
    if eps == 0:
        raise PreconditionError("eps = 0 gives semicircular variables, not a counterexample.")
    C = RationalMatrix.from_rows(SKITOVIC_ROWS)
    xspecs = skitovic_specs(eps)
    mixed = [
        Witness(_args_desc("Y", word), linear_form_cumulants(C, xspecs, word))
        for word in _mixed_words(2, max_order)
    ]
    terms = [
        Witness(
            f"{_args_desc('Y', word)}[X{i + 1}]",
            C[word[0], i] * C[word[1], i] * (C[word[2], i] if len(word) > 2 else 1)
            * xspecs[i].diagonal(len(word)),
        )
        for word in ((0, 1), (0, 0, 1), (0, 1, 1))
        for i in range(3)
    ]
    non_semicircular = [Witness(f"K3(X{i + 1})", s.diagonal(3)) for i, s in enumerate(xspecs)]
    vanish = all(w.value == 0 for w in mixed)
    nonzero = all(w.value != 0 for w in non_semicircular)
    return CheckReport(
        "skitovic",
        {"eps": format_rational(eps)},
        vanish and nonzero,
        tuple(mixed + non_semicircular + terms),
        max_order,
        "free linear forms of non-semicircular variables" if vanish and nonzero else "",
    )


def check_sd_identity(
    b: Sequence[Fraction],
    specs: Sequence[CumulantSpec],
    alpha: Fraction,
    beta: Fraction,
    max_order: int,
) -> CheckReport:
    """
    Compare sum_j (alpha^m + beta^m b_j^m) K_m(X_j) with
    sum_j (alpha + beta b_j)^m K_m(X_j) for Y1 = sum X_j, Y2 = sum b_j X_j.

    The two agree whenever the mixed (Y1, Y2) cumulants vanish.
    """
    b = [Fraction(v) for v in b]
    alpha, beta = Fraction(alpha), Fraction(beta)
    xspecs = _per_variable(specs, len(b))
    C = RationalMatrix.from_rows([[1] * len(b), b])
    mixed = [
        Witness(_args_desc("Y", word), linear_form_cumulants(C, xspecs, word))
        for word in _mixed_words(2, max_order)
    ]
    hypothesis = all(w.value == 0 for w in mixed)
    sides: list[dict[str, Any]] = []
    differences: list[Witness] = []
    for m in range(1, max_order + 1):
        left = sum(
            ((alpha**m + beta**m * bj**m) * s.diagonal(m) for bj, s in zip(b, xspecs)),
            Fraction(0),
        )
        right = sum(
            ((alpha + beta * bj) ** m * s.diagonal(m) for bj, s in zip(b, xspecs)),
            Fraction(0),
        )
        sides.append({"m": m, "left": format_rational(left), "right": format_rational(right)})
        if left != right:
            differences.append(Witness(f"identity gap m={m}", left - right))
    distinct = len(set(b)) == len(b)
    vandermonde = RationalMatrix.from_rows([[bj**k for bj in b] for k in range(len(b))])
    det = vandermonde.determinant()
    passed = not hypothesis or not differences
    witnesses = (differences + [w for w in mixed if w.value]) if not passed else mixed
    return CheckReport(
        "sd-identity",
        {
            "b": format_rationals(b),
            "alpha": format_rational(alpha),
            "beta": format_rational(beta),
            "specs": [s.to_json() for s in xspecs],
        },
        passed,
        tuple(witnesses),
        max_order,
        "mixed cumulants vanish" if hypothesis else "mixed cumulants nonzero: identity not implied",
        {
            "sides": sides,
            "vandermonde": "regular" if distinct and det != 0 else "singular",
            "vandermonde_determinant": format_rational(det),
            "mixed_vanish": hypothesis,
        },
    )


# --- Cramer ----------------------------------------------------------------------


def cramer_spec(eps: Fraction) -> CumulantSpec:
    return CumulantSpec.univariate({2: 1, 3: eps}, family="free")


def check_cramer_failure(eps: Fraction, hankel_size: int) -> CheckReport:
    """
    Leading principal minors of the Hankel matrix [m_(i+j)], 0 <= i, j <= k,
    of the free variable with K2 = 1, K3 = eps.
    """
    if hankel_size < 1:
        raise PreconditionError("hankel size must be at least 1.")
    eps = Fraction(eps)
    spec = cramer_spec(eps)
    moments = [Fraction(1)] + [
        moments_from_cumulants(spec, ("X",) * degree)
        for degree in range(1, 2 * hankel_size + 1)
    ]
    hankel = [[moments[i + j] for j in range(hankel_size + 1)] for i in range(hankel_size + 1)]
    minors = [
        RationalMatrix.from_rows([row[:size] for row in hankel[:size]]).determinant()
        for size in range(1, hankel_size + 2)
    ]
    positive = all(v > 0 for v in minors)
    witnesses = [Witness(f"minor {size}", v) for size, v in enumerate(minors, start=1)]
    witnesses += [Witness(f"m{d}", v) for d, v in enumerate(moments)]
    return CheckReport(
        "cramer",
        {"eps": format_rational(eps), "hankel_size": hankel_size},
        positive,
        tuple(witnesses),
        2 * hankel_size,
        "measure plausible at depth k" if positive else "not a moment sequence",
        {"minors": format_rationals(minors)},
    )


def cramer_baseline_name(eps: Fraction, hankel_size: int) -> str:
    eps = Fraction(eps)
    return f"cramer-{eps.numerator}_{eps.denominator}-k{hankel_size}"


def compare_baseline(report: CheckReport, name: str) -> str:
    """Record the witnesses on first use, compare exactly afterwards."""
    snapshot = [w.to_json() for w in report.witnesses]
    recorded = load_baseline(name)
    if recorded is None:
        save_baseline(name, snapshot)
        return "recorded"
    return "match" if recorded == snapshot else "mismatch"


@dataclass(frozen=True)
class CramerScan:
    first_failure: Fraction | None
    reports: tuple[CheckReport, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "first_failure": None if self.first_failure is None else format_rational(self.first_failure),
            "reports": [r.to_json() for r in self.reports],
        }


def cramer_scan(eps_grid: Sequence[Fraction], hankel_size: int) -> CramerScan:
    """First eps (in grid order) with a non-positive Hankel minor."""
    reports = tuple(check_cramer_failure(eps, hankel_size) for eps in eps_grid)
    first = next(
        (Fraction(eps) for eps, report in zip(eps_grid, reports) if not report.passed), None
    )
    return CramerScan(first, reports)


# --- Lukacs ----------------------------------------------------------------------


def lukacs_statistics(n_vars: int) -> tuple[NCPolynomial, NCPolynomial]:
    """Sample sum S1 = sum X_k and sample variation T = sum (X_k - S1/n)^2."""
    labels = variable_labels(n_vars)
    S1 = NCPolynomial.linear([1] * n_vars, labels)
    mean = S1 * Fraction(1, n_vars)
    T = NCPolynomial.total((NCPolynomial.generator(k) - mean) ** 2 for k in labels)
    return S1, T


def _lukacs_state(state: State, n_vars: int) -> tuple[State, CumulantSpec]:
    # S1 and T only separate in shift covariant calculi
    if isinstance(state, PairWeight):
        if state.kind.value not in ("classical", "free"):
            raise PreconditionError(
                f"the sample variation check needs a classical or free state, not {state}."
            )
        return state, _gaussian(family=state.kind.value)
    if not state.labels:
        raise PreconditionError("the sample variation check needs a spec with a label.")
    one = state if len(state.labels) == 1 else split_independent(state)[0]
    if one.family is LatticeFamily.INTERVAL:
        raise PreconditionError("the sample variation check needs a classical or free spec.")
    return iid_spec(one, variable_labels(n_vars)), one


def variation_cumulant(one: CumulantSpec, n_vars: int, r: int) -> Fraction:
    """
    K_r(S1, ..., S1, T) for i.i.d. copies of ``one`` by the product formula.

    T = sum X_k^2 - S1^2 / n, so the value is n K_r(X, ..., X, X^2) minus
    the sum of n^(|rho| - 1) K_rho(X) over rho connecting 1|2|...|r,r+1.
    """
    args = (one.labels[0],) * (r + 1)
    grouping = lukacs_grouping(r + 1)
    squares = product_cumulant(one, args, grouping)
    mean_square = sum(
        (
            n_vars ** (len(rho.blocks) - 1) * partitioned_cumulant(one, rho, args)
            for rho in product_formula_partitions(grouping, one.family, top(r + 1))
        ),
        Fraction(0),
    )
    return n_vars * squares - mean_square


def check_lukacs(n_vars: int, state: State, max_order: int) -> CheckReport:
    """
    S1 and T are independent iff the variables are Gaussian.

    K_r(S1, ..., S1, T) equals (n - 1) K_(r+1)(X); every other mixed
    arrangement S1^j T^(r-j) vanishes for Gaussian input.
    """
    if n_vars < 2:
        raise PreconditionError("the sample variation needs at least two variables.")
    if max_order < 3:
        raise PreconditionError("max order must be at least 3.")
    expanded, one = _lukacs_state(state, n_vars)
    family, cumulant = one.family, one.diagonal
    gaussian = all(cumulant(m) == 0 for m in range(3, max_order + 2))
    S1, T = lukacs_statistics(n_vars)
    witnesses: list[Witness] = []
    problems: list[Witness] = []
    for r in range(2, max_order + 1):
        for j in range(r - 1, 0, -1):
            value = joint_cumulant_of_polynomials(expanded, family, [S1] * j + [T] * (r - j))
            desc = f"K{r}(" + ",".join(["S1"] * j + ["T"] * (r - j)) + ")"
            witnesses.append(Witness(desc, value))
            if j == r - 1:
                expected = (n_vars - 1) * cumulant(r + 1)
                if value != expected:
                    problems.append(Witness(f"{desc} - (n-1)K{r + 1}(X)", value - expected))
                formula = variation_cumulant(one, n_vars, r)
                if value != formula:
                    problems.append(Witness(f"{desc} - product formula", value - formula))
            elif gaussian and value != 0:
                problems.append(Witness(desc, value))
    nonzero = [w for w in witnesses if w.value]
    if gaussian and not nonzero:
        conclusion = "gaussian: mixed cumulants vanish"
    elif gaussian:
        conclusion = "gaussian input with nonzero mixed cumulant"
    elif nonzero:
        conclusion = "non-gaussian: nonzero mixed cumulant detected"
    else:
        conclusion = "non-gaussian but undetected"
    return CheckReport(
        "lukacs",
        {
            "n_vars": n_vars,
            "state": str(state) if isinstance(state, PairWeight) else state.to_json(),
        },
        not problems,
        tuple(problems or witnesses),
        max_order,
        conclusion,
        {"gaussian": gaussian},
    )


# --- suite -------------------------------------------------------------------------


def _gaussian(label: str = "X", family: str = "classical") -> CumulantSpec:
    return CumulantSpec.univariate({2: 1}, label=label, family=family)


DEFAULT_SUITE: dict[str, Callable[[], CheckReport]] = {
    "bernstein": lambda: check_bernstein(1, 1, 1, -1, [_gaussian("X1"), _gaussian("X2")], 6),
    "bernstein-multi": lambda: check_bernstein_multi(
        RationalMatrix.from_rows([[2, 2, -1], [2, -1, 2], [-1, 2, 2]]).scale(Fraction(1, 3)),
        [_gaussian(f"X{i}") for i in (1, 2, 3)],
        4,
    ),
    "cramer": lambda: check_cramer_failure(Fraction(0), 5),
    "lukacs": lambda: check_lukacs(2, PairWeight.classical(), 4),
    "maxwell": lambda: check_maxwell_forward(PairWeight.classical(), pythagorean_rotation(3, 4), 6),
    "maxwell-converse": lambda: check_maxwell_converse(
        pythagorean_rotation(3, 4), _gaussian(), 8
    ),
    "sd-identity": lambda: check_sd_identity(
        [1, -2, Fraction(-1, 2)],
        [
            CumulantSpec.univariate({2: c * c, 3: c**3 * k3}, label=f"X{i + 1}", family="free")
            for i, (c, k3) in enumerate(((2, Fraction(1, 4)), (-1, 1), (2, 1)))
        ],
        1,
        1,
        8,
    ),
    "skitovic": lambda: check_skitovic_failure(Fraction(1), 8),
    "stability": lambda: check_stability(
        [Fraction(3, 5), Fraction(4, 5)], _gaussian(), 10
    ),
}


def run_suite(names: Sequence[str] | None = None, jobs: int = 4) -> list[CheckReport]:
    """Run the default checks concurrently; reports come back sorted by name."""
    selected = sorted(names or DEFAULT_SUITE)
    unknown = [name for name in selected if name not in DEFAULT_SUITE]
    if unknown:
        raise InvalidInput(f"unknown suite checks: {', '.join(unknown)}.")

    def run(name: str) -> CheckReport:
        with operation("suite", name):
            return DEFAULT_SUITE[name]()

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(pool.map(run, selected))
    return sorted(reports, key=lambda report: report.check)


# --- cli ---------------------------------------------------------------------------


def _finish(ctx: click.Context, report: CheckReport) -> None:
    echo_json(report.to_json())
    if not report.passed:
        ctx.exit(1)


def _spec_or_json(spec_path: Path | None, inline: str | None) -> CumulantSpec:
    return load_spec(spec_path, inline)


_max_order = click.option("--max-order", type=int, default=6, show_default=True)


@click.group(help="Executable theorem checks.")
def cli() -> None:
    """Root command group for the characterization checks."""


@cli.command("stability")
@click.option("--a", "a_text", required=True, help='Coefficients, e.g. "3/5,4/5".')
@click.option("--spec", "spec_path", type=click.Path(path_type=Path))
@click.option("--json", "inline", help="Inline cumulant spec JSON.")
@_max_order
@click.pass_context
def stability_command(
    ctx: click.Context, a_text: str, spec_path: Path | None, inline: str | None, max_order: int
) -> None:
    """Whether sum a_i X_i has the law of X."""
    a = parse_vector(a_text, origin="--a")
    spec = _spec_or_json(spec_path, inline)
    with operation("check", "stability", detail=f"a={a_text}"):
        report = check_stability(a, spec, max_order)
    _finish(ctx, report)


@cli.command("maxwell")
@click.option("--weight", default="classical", show_default=True)
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path))
@click.option("--json", "inline", help="Inline matrix JSON.")
@_max_order
@click.pass_context
def maxwell_command(
    ctx: click.Context, weight: str, matrix_path: Path | None, inline: str | None, max_order: int
) -> None:
    """Spherical symmetry of a Gaussian state under an orthogonal matrix."""
    U = load_matrix(matrix_path, inline)
    with operation("check", "maxwell", detail=f"weight={weight}"):
        report = check_maxwell_forward(parse_weight(weight), U, max_order)
    _finish(ctx, report)


@cli.command("maxwell-converse")
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path), required=True)
@click.option("--spec", "spec_path", type=click.Path(path_type=Path))
@click.option("--json", "inline", help="Inline cumulant spec JSON.")
@_max_order
@click.pass_context
def maxwell_converse_command(
    ctx: click.Context, matrix_path: Path, spec_path: Path | None, inline: str | None, max_order: int
) -> None:
    """Contraction factors forcing higher cumulants to vanish."""
    U = load_matrix(matrix_path)
    spec = _spec_or_json(spec_path, inline)
    with operation("check", "maxwell-converse"):
        report = check_maxwell_converse(U, spec, max_order)
    _finish(ctx, report)


@cli.command("bernstein")
@click.option("--coefficients", required=True, help='alpha,beta,gamma,delta, e.g. "1,1,1,-1".')
@click.option("--spec", "spec_paths", type=click.Path(path_type=Path), multiple=True, required=True)
@_max_order
@click.pass_context
def bernstein_command(
    ctx: click.Context, coefficients: str, spec_paths: tuple[Path, ...], max_order: int
) -> None:
    """Two-variable Bernstein check."""
    values = parse_rational_list(coefficients, origin="--coefficients")
    if len(values) != 4:
        raise InvalidInput("--coefficients needs exactly four rationals.")
    specs = [load_spec(path) for path in spec_paths]
    with operation("check", "bernstein", detail=coefficients):
        report = check_bernstein(*values, specs, max_order)
    _finish(ctx, report)


@cli.command("bernstein-multi")
@click.option("--matrix", "matrix_path", type=click.Path(path_type=Path), required=True)
@click.option("--spec", "spec_paths", type=click.Path(path_type=Path), multiple=True, required=True)
@_max_order
@click.pass_context
def bernstein_multi_command(
    ctx: click.Context, matrix_path: Path, spec_paths: tuple[Path, ...], max_order: int
) -> None:
    """Multidimensional Bernstein check."""
    U = load_matrix(matrix_path)
    specs = [load_spec(path) for path in spec_paths]
    with operation("check", "bernstein-multi"):
        report = check_bernstein_multi(U, specs, max_order)
    _finish(ctx, report)


@cli.command("skitovic")
@click.option("--eps", required=True, help="Third free cumulant scale, e.g. 1/1.")
@click.option("--max-order", type=int, default=8, show_default=True)
@click.pass_context
def skitovic_command(ctx: click.Context, eps: str, max_order: int) -> None:
    """Free counterexample to the Skitovic-Darmois theorem."""
    value = parse_rational(eps, origin="--eps")
    with operation("check", "skitovic", detail=f"eps={eps}"):
        report = check_skitovic_failure(value, max_order)
    _finish(ctx, report)


@cli.command("cramer")
@click.option("--eps", help="Third free cumulant.")
@click.option("--grid", help='Scan several values, e.g. "1,2,5,10".')
@click.option("--hankel-size", type=int, default=5, show_default=True)
@click.option("--baseline/--no-baseline", default=False, help="Record or compare the regression baseline.")
@click.pass_context
def cramer_command(
    ctx: click.Context, eps: str | None, grid: str | None, hankel_size: int, baseline: bool
) -> None:
    """Hankel minors of the eps-deformed semicircle moments."""
    if (eps is None) == (grid is None):
        raise InvalidInput("provide exactly one of --eps or --grid.")
    if grid is not None:
        values = parse_rational_list(grid, origin="--grid")
        with operation("check", "cramer-scan", detail=grid):
            scan = cramer_scan(values, hankel_size)
        echo_json(scan.to_json())
        return
    value = parse_rational(eps, origin="--eps")
    with operation("check", "cramer", detail=f"eps={eps}"):
        report = check_cramer_failure(value, hankel_size)
    payload = report.to_json()
    status = None
    if baseline:
        status = compare_baseline(report, cramer_baseline_name(value, hankel_size))
        payload["baseline"] = status
        emit(f"[check] cramer: baseline {status}")
    echo_json(payload)
    if not report.passed or status == "mismatch":
        ctx.exit(1)


@cli.command("sd-identity")
@click.option("--b", "b_text", required=True, help='Second-form coefficients, e.g. "1,-2,-1/2".')
@click.option("--spec", "spec_paths", type=click.Path(path_type=Path), multiple=True, required=True)
@click.option("--alpha", default="1", show_default=True)
@click.option("--beta", default="1", show_default=True)
@_max_order
@click.pass_context
def sd_identity_command(
    ctx: click.Context,
    b_text: str,
    spec_paths: tuple[Path, ...],
    alpha: str,
    beta: str,
    max_order: int,
) -> None:
    """Cumulant identities behind the Skitovic-Darmois proof."""
    b = parse_vector(b_text, origin="--b")
    specs = [load_spec(path) for path in spec_paths]
    with operation("check", "sd-identity", detail=f"b={b_text}"):
        report = check_sd_identity(
            b,
            specs,
            parse_rational(alpha, origin="--alpha"),
            parse_rational(beta, origin="--beta"),
            max_order,
        )
    _finish(ctx, report)


@cli.command("lukacs")
@click.option("--n-vars", type=int, default=2, show_default=True)
@click.option("--weight", help="Gaussian pair weight.")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="One-label i.i.d. spec.")
@click.option("--max-order", type=int, default=4, show_default=True)
@click.pass_context
def lukacs_command(
    ctx: click.Context, n_vars: int, weight: str | None, spec_path: Path | None, max_order: int
) -> None:
    """Independence of the sample sum and the sample variation."""
    if (weight is None) == (spec_path is None):
        raise InvalidInput("provide exactly one of --weight or --spec.")
    state: State = parse_weight(weight) if weight is not None else load_spec(spec_path)
    with operation("check", "lukacs", detail=f"n={n_vars}"):
        report = check_lukacs(n_vars, state, max_order)
    _finish(ctx, report)


@cli.command("suite")
@click.option("--only", "names", multiple=True, type=click.Choice(sorted(DEFAULT_SUITE)))
@click.option("--jobs", type=int, default=4, show_default=True)
@click.pass_context
def suite_command(ctx: click.Context, names: tuple[str, ...], jobs: int) -> None:
    """Run the default battery of checks."""
    reports = run_suite(names or None, jobs)
    passed = all(report.passed for report in reports)
    echo_json({"passed": passed, "reports": [report.to_json() for report in reports]})
    if not passed:
        ctx.exit(1)
