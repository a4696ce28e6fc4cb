from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

from cumulanttools.common import InvalidInput
from cumulanttools.cumulants import CumulantSpec
from cumulanttools.main import cli
from cumulanttools.matrices import RationalMatrix, permutation_matrix, pythagorean_rotation
from cumulanttools.progress import CHECK_LOG_NAME, CHECK_STATE_NAME
from cumulanttools.state import save_baseline
from cumulanttools.theorems import (
    DEFAULT_SUITE,
    CheckReport,
    PreconditionError,
    Witness,
    check_bernstein,
    check_bernstein_multi,
    check_cramer_failure,
    check_lukacs,
    check_maxwell_converse,
    check_maxwell_forward,
    check_sd_identity,
    check_skitovic_failure,
    check_stability,
    compare_baseline,
    cramer_baseline_name,
    cramer_scan,
    lukacs_statistics,
    run_suite,
    variation_cumulant,
)
from cumulanttools.wick import PairWeight

ROTATION = pythagorean_rotation(3, 4)
MULTI = RationalMatrix.from_rows([[2, 2, -1], [2, -1, 2], [-1, 2, 2]]).scale(Fraction(1, 3))
ORTHOGONAL = {
    "rotation-3-4": ROTATION,
    "rotation-5-12": pythagorean_rotation(5, 12),
    "rotation-8-15": pythagorean_rotation(8, 15),
    "reflection": RationalMatrix.from_rows([[3, 4], [4, -3]]).scale(Fraction(1, 5)),
    "swap": permutation_matrix([1, 0]),
}
WEIGHTS = [
    PairWeight.classical(),
    PairWeight.free(),
    PairWeight.boolean(),
    PairWeight.q_deformed(Fraction(1, 2)),
]
SD_SPECS = [
    CumulantSpec.univariate({2: c * c, 3: c**3 * k3}, label=f"X{i + 1}", family="free")
    for i, (c, k3) in enumerate(((2, Fraction(1, 4)), (-1, 1), (2, 1)))
]


def gaussian(label: str = "X", family: str = "classical", variance: int = 1) -> CumulantSpec:
    return CumulantSpec.univariate({2: variance}, label=label, family=family)


def values(report: CheckReport) -> dict[str, Fraction]:
    return {w.desc: w.value for w in report.witnesses}


def test_failing_report_needs_nonzero_witness() -> None:
    with pytest.raises(ValueError, match="nonzero witness"):
        CheckReport("demo", {}, False, (Witness("K2", Fraction(0)),), 2)


def test_report_json_shape() -> None:
    report = CheckReport("demo", {"eps": "1/1"}, True, (Witness("K2", Fraction(1, 2)),), 2)

    assert report.to_json() == {
        "check": "demo",
        "params": {"eps": "1/1"},
        "verdict": "pass",
        "max_order": 2,
        "witnesses": [{"desc": "K2", "value": "1/2"}],
    }


def test_stability_detects_third_cumulant() -> None:
    spec = CumulantSpec.univariate({2: 1, 3: 1})

    report = check_stability([Fraction(3, 5), Fraction(4, 5)], spec, 3)

    assert report.verdict == "fail"
    assert values(report)["K3(sum a X)"] == Fraction(91, 125)
    assert values(report)["K3(sum a X) - K3(X)"] == Fraction(-34, 125)
    assert report.details["violations"] == [3]


def test_stability_of_gaussian() -> None:
    report = check_stability([Fraction(3, 5), Fraction(4, 5)], gaussian(), 8)

    assert report.passed
    assert report.conclusion == "gaussian forced"


def test_stability_trivial_coefficients_keep_any_law() -> None:
    report = check_stability([1, 0], CumulantSpec.univariate({2: 1, 3: 5}), 5)

    assert report.passed
    assert report.conclusion == "non-gaussian fixed point"


def test_stability_requires_unit_norm() -> None:
    with pytest.raises(PreconditionError, match="sum of squares"):
        check_stability([1, 1], gaussian(), 4)


def _unit_vector(rng: random.Random, size: int) -> list[Fraction]:
    vector = [Fraction(1)]
    for _ in range(size - 1):
        t = Fraction(rng.randint(1, 20), rng.randint(21, 40))
        cos, sin = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
        vector = [v * cos for v in vector] + [sin]
    return vector


def test_stability_on_random_unit_vectors() -> None:
    rng = random.Random(17)
    for _ in range(10):
        a = _unit_vector(rng, rng.randint(2, 4))
        assert sum(v * v for v in a) == 1

        assert check_stability(a, gaussian(), 10).passed
        assert check_stability(a, gaussian(family="free"), 10).conclusion == "gaussian forced"
        report = check_stability(a, CumulantSpec.univariate({2: 1, 4: 1}), 10)
        assert report.verdict == "fail"
        assert report.details["violations"] == [4]


@pytest.mark.parametrize(
    "spec",
    [
        CumulantSpec(()),
        CumulantSpec(("X1", "X2"), {("X1", "X1"): 1, ("X2", "X2"): 1}, independent=True),
    ],
    ids=["no-labels", "two-labels"],
)
def test_single_variable_checks_need_one_label(spec: CumulantSpec) -> None:
    with pytest.raises(PreconditionError, match="exactly one label"):
        check_stability([1, 0], spec, 4)
    with pytest.raises(PreconditionError, match="exactly one label"):
        check_maxwell_converse(ROTATION, spec, 4)


@pytest.mark.parametrize("weight", WEIGHTS, ids=str)
@pytest.mark.parametrize("matrix", list(ORTHOGONAL.values()), ids=list(ORTHOGONAL))
def test_maxwell_forward_invariance(weight: PairWeight, matrix: RationalMatrix) -> None:
    report = check_maxwell_forward(weight, matrix, 6)

    assert report.passed
    assert report.details["mismatches"] == 0
    assert report.details["words_checked"] == 4 + 16 + 64


@pytest.mark.parametrize("weight", WEIGHTS, ids=str)
def test_maxwell_forward_in_three_dimensions(weight: PairWeight) -> None:
    report = check_maxwell_forward(weight, MULTI, 4)

    assert report.passed
    assert report.details["words_checked"] == 9 + 81


def test_maxwell_forward_samples() -> None:
    report = check_maxwell_forward(PairWeight.classical(), ROTATION, 4)

    assert values(report) == {"phi(Y1^2)": 1, "phi(Y1^4)": 3}


def test_maxwell_forward_needs_orthogonal_matrix() -> None:
    with pytest.raises(PreconditionError, match="orthogonal"):
        check_maxwell_forward(PairWeight.free(), RationalMatrix.from_rows([[1, 1], [0, 1]]), 4)


def test_maxwell_converse_factors() -> None:
    report = check_maxwell_converse(ROTATION, gaussian(), 4)

    assert report.passed
    assert report.conclusion == "cumulants of order >= 3 forced to vanish"
    factors = {(row["row"], row["m"]): row["factor"] for row in report.details["factors"]}
    assert factors[(1, 2)] == "1/1"
    assert factors[(1, 3)] == "91/125"
    assert factors[(2, 3)] == "-37/125"
    assert factors[(2, 4)] == "337/625"


def test_maxwell_converse_flags_fourth_cumulant() -> None:
    report = check_maxwell_converse(ROTATION, CumulantSpec.univariate({2: 1, 4: 1}), 4)

    assert report.verdict == "fail"
    assert values(report)["K4(Y1) - K4(X)"] == Fraction(-288, 625)


def test_maxwell_converse_with_unit_entries() -> None:
    report = check_maxwell_converse(permutation_matrix([1, 0]), CumulantSpec.univariate({2: 1, 4: 1}), 4)

    assert report.passed
    assert report.conclusion == "no conclusion: an entry has modulus 1"
    assert report.details["unit_entries"] == [[1, 2], [2, 1]]


def test_bernstein_gaussian_pair() -> None:
    report = check_bernstein(1, 1, 1, -1, [gaussian("X1"), gaussian("X2")], 6)

    assert report.passed
    assert values(report)["K2(Y1,Y2)"] == 0
    assert all(values(report)[f"det system m={m}"] == 2 for m in range(3, 7))
    assert report.details["mixed_vanish"]
    assert report.conclusion == "equal variances and vanishing higher cumulants forced"


def test_bernstein_unequal_variances() -> None:
    report = check_bernstein(1, 1, 1, -1, [gaussian("X1"), gaussian("X2", variance=2)], 4)

    assert values(report)["K2(Y1,Y2)"] == -1
    assert report.details["variance_gap"] == "-1/1"
    assert not report.details["mixed_vanish"]
    assert report.conclusion == "mixed cumulants nonzero: hypothesis not met"


def test_bernstein_accepts_one_multi_label_spec() -> None:
    spec = CumulantSpec(
        ("X1", "X2"), {("X1", "X1"): 1, ("X2", "X2"): 1}, "free", independent=True
    )

    report = check_bernstein(2, 1, 1, -2, [spec], 4)

    assert report.details["mixed_vanish"] is True
    assert report.details["systems"][0] == {"m": 3, "determinant": "20/1"}


@pytest.mark.parametrize(
    ("coefficients", "match"), [((1, 0, 1, -1), "nonzero"), ((1, 1, 1, 1), "orthogonal")]
)
def test_bernstein_preconditions(coefficients: tuple[int, ...], match: str) -> None:
    with pytest.raises(PreconditionError, match=match):
        check_bernstein(*coefficients, [gaussian("X1"), gaussian("X2")], 4)


def test_bernstein_multi_gaussian() -> None:
    report = check_bernstein_multi(MULTI, [gaussian(f"X{i}") for i in (1, 2, 3)], 4)

    assert report.passed
    assert report.details["irreducible"]
    assert report.details["mixed_vanish"]
    assert report.conclusion == "equal variances and vanishing higher cumulants"
    assert RationalMatrix.from_json(report.details["variance_matrix"]) == RationalMatrix.identity(3)


def test_bernstein_multi_non_gaussian_breaks_hypothesis() -> None:
    specs = [CumulantSpec.univariate({2: 1, 3: 1}, label=f"X{i}") for i in (1, 2, 3)]

    report = check_bernstein_multi(MULTI, specs, 3)

    assert report.passed
    assert report.conclusion == "mixed cumulants nonzero: hypothesis not met"
    assert all(w.value != 0 for w in report.witnesses)


def test_bernstein_multi_reducible() -> None:
    report = check_bernstein_multi(
        RationalMatrix.identity(2), [gaussian("X1"), gaussian("X2", variance=3)], 3
    )

    assert report.conclusion == "reducible matrix: no conclusion"
    assert not report.details["irreducible"]


@pytest.mark.parametrize(
    "eps",
    [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(1, 10), Fraction(-1, 10)],
)
def test_skitovic_counterexample(eps: Fraction) -> None:
    report = check_skitovic_failure(eps, 8)

    assert report.passed
    found = values(report)
    assert found["K2(Y1,Y2)"] == 0
    assert found["K3(Y1,Y1,Y2)"] == 0
    assert found["K3(Y1,Y2,Y2)"] == 0
    assert found["K3(X1)"] == eps / 4
    assert found["K2(Y1,Y2)[X1]"] == 4
    assert found["K3(Y1,Y1,Y2)[X3]"] == -4 * eps


def test_skitovic_rejects_semicircular_case() -> None:
    with pytest.raises(PreconditionError, match="semicircular"):
        check_skitovic_failure(Fraction(0), 4)


def test_sd_identity_both_sides_agree() -> None:
    report = check_sd_identity([1, -2, Fraction(-1, 2)], SD_SPECS, 1, 1, 6)

    assert report.passed
    assert report.details["mixed_vanish"]
    sides = {row["m"]: (row["left"], row["right"]) for row in report.details["sides"]}
    assert sides[2] == ("18/1", "18/1")
    assert sides[3] == ("18/1", "18/1")
    assert report.details["vandermonde"] == "regular"
    assert report.details["vandermonde_determinant"] == "27/4"


def test_sd_identity_without_hypothesis() -> None:
    report = check_sd_identity([1, 1], [gaussian("X1"), gaussian("X2")], 1, 1, 3)

    assert report.passed
    assert not report.details["mixed_vanish"]
    assert report.details["vandermonde"] == "singular"
    assert report.conclusion == "mixed cumulants nonzero: identity not implied"


def test_sd_identity_spec_count() -> None:
    with pytest.raises(PreconditionError, match="expected 3"):
        check_sd_identity([1, 2, 3], [gaussian("X1")], 1, 1, 3)


def test_cramer_semicircle_passes() -> None:
    report = check_cramer_failure(Fraction(0), 5)

    assert report.passed
    assert report.details["minors"] == ["1/1"] * 6
    assert report.max_order == 10


@pytest.mark.parametrize(
    ("eps", "minor", "passed"),
    [(Fraction(1), Fraction(0), False), (Fraction(1, 2), Fraction(3, 4), True), (Fraction(2), Fraction(-3), False)],
)
def test_cramer_third_minor(eps: Fraction, minor: Fraction, passed: bool) -> None:
    report = check_cramer_failure(eps, 2)

    assert values(report)["minor 3"] == minor
    assert values(report)["m4"] == 2
    assert values(report)["m3"] == eps
    assert report.passed is passed


def test_cramer_scan_finds_first_failure() -> None:
    scan = cramer_scan([Fraction(1, 2), Fraction(1), Fraction(2)], 2)

    assert scan.first_failure == 1
    assert [r.verdict for r in scan.reports] == ["pass", "fail", "fail"]
    assert scan.to_json()["first_failure"] == "1/1"


def test_cramer_baseline_lifecycle(state_home: Path) -> None:
    report = check_cramer_failure(Fraction(1, 2), 2)
    name = cramer_baseline_name(Fraction(1, 2), 2)

    assert name == "cramer-1_2-k2"
    assert compare_baseline(report, name) == "recorded"
    assert (state_home / "baselines" / f"{name}.json").is_file()
    assert compare_baseline(report, name) == "match"

    save_baseline(name, [{"desc": "minor 1", "value": "2/1"}])
    assert compare_baseline(report, name) == "mismatch"


def test_cramer_small_eps_baseline_is_stable(state_home: Path) -> None:
    name = cramer_baseline_name(Fraction(1, 10), 5)
    first = check_cramer_failure(Fraction(1, 10), 5)

    assert len(first.details["minors"]) == 6
    assert first.details["minors"][:3] == ["1/1", "1/1", "99/100"]
    assert values(first)["m5"] == Fraction(1, 2)
    assert compare_baseline(first, name) == "recorded"
    assert (state_home / "baselines" / "cramer-1_10-k5.json").is_file()
    assert compare_baseline(check_cramer_failure(Fraction(1, 10), 5), name) == "match"


def test_lukacs_statistics_for_two_variables() -> None:
    S1, T = lukacs_statistics(2)

    assert S1.terms == {("X1",): 1, ("X2",): 1}
    assert T.terms == {
        ("X1", "X1"): Fraction(1, 2),
        ("X1", "X2"): Fraction(-1, 2),
        ("X2", "X1"): Fraction(-1, 2),
        ("X2", "X2"): Fraction(1, 2),
    }


@pytest.mark.parametrize("weight", [PairWeight.classical(), PairWeight.free()], ids=str)
@pytest.mark.parametrize("n_vars", [2, 3])
def test_lukacs_gaussian_independence(weight: PairWeight, n_vars: int) -> None:
    report = check_lukacs(n_vars, weight, 4)

    assert report.passed
    assert report.details["gaussian"]
    assert report.conclusion == "gaussian: mixed cumulants vanish"


@pytest.mark.parametrize("family", ["classical", "free"])
def test_lukacs_detects_fourth_cumulant(family: str) -> None:
    spec = CumulantSpec.univariate({2: 1, 4: 1}, family=family)

    report = check_lukacs(2, spec, 3)

    assert report.passed
    assert values(report)["K3(S1,S1,T)"] == 1
    assert values(report)["K2(S1,T)"] == 0
    assert report.conclusion == "non-gaussian: nonzero mixed cumulant detected"


@pytest.mark.parametrize("family", ["classical", "free"])
@pytest.mark.parametrize("n_vars", [2, 3, 5])
def test_variation_cumulant_tracks_next_cumulant(family: str, n_vars: int) -> None:
    rng = random.Random(f"variation-{family}-{n_vars}")
    spec = CumulantSpec.univariate(
        {m: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for m in range(1, 7)}, family=family
    )

    for r in range(2, 6):
        assert variation_cumulant(spec, n_vars, r) == (n_vars - 1) * spec.diagonal(r + 1)


@pytest.mark.parametrize(
    ("n_vars", "state", "max_order", "match"),
    [
        (1, PairWeight.classical(), 4, "two variables"),
        (2, PairWeight.classical(), 2, "at least 3"),
        (2, PairWeight.boolean(), 4, "classical or free"),
        (2, gaussian(family="boolean"), 4, "classical or free"),
        (2, CumulantSpec(()), 4, "with a label"),
    ],
)
def test_lukacs_preconditions(n_vars: int, state: object, max_order: int, match: str) -> None:
    with pytest.raises(PreconditionError, match=match):
        check_lukacs(n_vars, state, max_order)  # type: ignore[arg-type]


def test_run_suite_subset_is_sorted() -> None:
    reports = run_suite(["stability", "cramer"], jobs=2)

    assert [r.check for r in reports] == ["cramer", "stability"]
    assert all(r.passed for r in reports)


def test_run_suite_rejects_unknown() -> None:
    with pytest.raises(InvalidInput, match="unknown suite checks"):
        run_suite(["gauss"])


def test_default_suite_names() -> None:
    assert sorted(DEFAULT_SUITE) == [
        "bernstein",
        "bernstein-multi",
        "cramer",
        "lukacs",
        "maxwell",
        "maxwell-converse",
        "sd-identity",
        "skitovic",
        "stability",
    ]


def test_check_skitovic_command_passes(state_home: Path) -> None:
    result = CliRunner().invoke(cli, ["check", "skitovic", "--eps", "1/1"])

    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["verdict"] == "pass"
    assert payload["params"] == {"eps": "1/1"}
    assert "[check] skitovic: done" in (state_home / CHECK_LOG_NAME).read_text()
    assert json.loads((state_home / CHECK_STATE_NAME).read_text())["status"] == "done"


def test_check_cramer_command_fails_with_exit_one() -> None:
    result = CliRunner().invoke(cli, ["check", "cramer", "--eps", "1", "--hankel-size", "2"])

    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["verdict"] == "fail"
    assert payload["conclusion"] == "not a moment sequence"


def test_check_cramer_command_baseline() -> None:
    args = ["check", "cramer", "--eps", "1/2", "--hankel-size", "2", "--baseline"]
    runner = CliRunner()

    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)

    assert json.loads(first.stdout)["baseline"] == "recorded"
    assert json.loads(second.stdout)["baseline"] == "match"
    assert second.exit_code == 0


def test_check_cramer_command_grid() -> None:
    result = CliRunner().invoke(cli, ["check", "cramer", "--grid", "1/2,1,2", "--hankel-size", "2"])

    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["first_failure"] == "1/1"


@pytest.mark.parametrize(
    "args",
    [
        ["check", "skitovic", "--eps", "0"],
        ["check", "skitovic", "--eps", "0.5"],
        ["check", "cramer"],
        ["check", "lukacs", "--weight", "boolean"],
        ["check", "stability", "--a", "1,1", "--json", '{"entries": [{"args": ["X", "X"], "value": "1"}]}'],
    ],
)
def test_check_commands_reject_bad_input(args: list[str]) -> None:
    result = CliRunner().invoke(cli, args)

    assert result.exit_code == 2


def test_check_bernstein_command(tmp_path: Path) -> None:
    paths = []
    for label in ("X1", "X2"):
        path = tmp_path / f"{label}.yaml"
        path.write_text(f'labels: [{label}]\nindependent: true\nentries:\n  - args: [{label}, {label}]\n    value: "1"\n')
        paths.append(path)

    result = CliRunner().invoke(
        cli,
        ["check", "bernstein", "--coefficients", "1,1,1,-1", "--spec", str(paths[0]), "--spec", str(paths[1])],
    )

    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["details"]["systems"][0] == {"m": 3, "determinant": "2/1"}


def test_check_suite_command() -> None:
    result = CliRunner().invoke(cli, ["check", "suite", "--only", "skitovic", "--only", "cramer"])

    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["passed"] is True
    assert [r["check"] for r in payload["reports"]] == ["cramer", "skitovic"]


def test_check_stability_command_rejects_empty_spec() -> None:
    result = CliRunner().invoke(cli, ["check", "stability", "--a", "1", "--json", '{"entries": []}'])

    assert result.exit_code == 2
    assert "exactly one label" in result.output


def test_check_maxwell_converse_command_rejects_empty_spec(tmp_path: Path) -> None:
    matrix = tmp_path / "u.json"
    matrix.write_text(json.dumps(ROTATION.to_json()))

    result = CliRunner().invoke(
        cli, ["check", "maxwell-converse", "--matrix", str(matrix), "--json", '{"entries": []}']
    )

    assert result.exit_code == 2
    assert "exactly one label" in result.output
