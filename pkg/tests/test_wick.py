from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

from cumulanttools.common import InvalidInput
from cumulanttools.cumulants import CumulantSpec, moments_from_cumulants
from cumulanttools.main import cli
from cumulanttools.partitions import LatticeFamily, Partition, enumerate_family
from cumulanttools.polynomials import NCPolynomial, parse_polynomial
from cumulanttools.wick import (
    PairWeight,
    WeightError,
    block_factorized_table,
    clt_limit,
    clt_moment,
    joint_cumulant_of_polynomials,
    load_custom_weight,
    parse_weight,
    phi,
    wick_moment,
    wick_table,
)

X1 = NCPolynomial.generator("X1")
X2 = NCPolynomial.generator("X2")
WEIGHTS = [
    PairWeight.classical(),
    PairWeight.free(),
    PairWeight.boolean(),
    PairWeight.q_deformed(Fraction(1, 2)),
]


def test_fourth_moments() -> None:
    word = ("X",) * 4

    assert wick_moment(PairWeight.classical(), word) == 3
    assert wick_moment(PairWeight.free(), word) == 2
    assert wick_moment(PairWeight.boolean(), word) == 1
    assert wick_moment(PairWeight.q_deformed(Fraction(1, 3)), word) == 2 + Fraction(1, 3)


def test_alternating_word_separates_free_from_classical() -> None:
    word = ("X1", "X2", "X1", "X2")

    assert wick_moment(PairWeight.free(), word) == 0
    assert wick_moment(PairWeight.classical(), word) == 1


@pytest.mark.parametrize(
    ("weight", "family"),
    [(PairWeight.classical(), "classical"), (PairWeight.free(), "free"), (PairWeight.boolean(), "boolean")],
)
def test_gaussian_moments_match_engine(
    weight: PairWeight, family: str, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv("CUMULANTTOOLS_CLASSICAL_CAP", "10")
    spec = CumulantSpec.univariate({2: 1}, family=family)

    # full classical sums stop at the raised cap
    top = 5 if family == "classical" else 6
    for k in range(1, top + 1):
        word = ("X",) * (2 * k)
        assert wick_moment(weight, word) == moments_from_cumulants(spec, word)


def test_even_moment_sequences() -> None:
    double_factorials = [1, 3, 15, 105, 945, 10395]
    catalan = [1, 2, 5, 14, 42, 132]
    for k in range(1, 7):
        word = ("X",) * (2 * k)
        assert wick_moment(PairWeight.classical(), word) == double_factorials[k - 1]
        assert wick_moment(PairWeight.free(), word) == catalan[k - 1]


def test_q_deformation_interpolates() -> None:
    classical_q, free_q = PairWeight.q_deformed(1), PairWeight.q_deformed(0)
    for length in range(1, 9):
        for word in itertools.product("ABC", repeat=length):
            assert wick_moment(classical_q, word) == wick_moment(PairWeight.classical(), word)
            assert wick_moment(free_q, word) == wick_moment(PairWeight.free(), word)


def test_q_deformation_on_long_words() -> None:
    rng = random.Random(5)
    for _ in range(20):
        word = tuple(rng.choice("AB") for _ in range(10))
        assert wick_moment(PairWeight.q_deformed(1), word) == wick_moment(PairWeight.classical(), word)
        assert wick_moment(PairWeight.q_deformed(0), word) == wick_moment(PairWeight.free(), word)


@pytest.mark.parametrize("weight", WEIGHTS, ids=str)
def test_singleton_property(weight: PairWeight) -> None:
    for length in range(1, 9):
        for word in itertools.product("ABC", repeat=length):
            if any(word.count(label) % 2 for label in "ABC"):
                assert wick_moment(weight, word) == 0


def test_phi_examples() -> None:
    classical = PairWeight.classical()

    assert phi(classical, (X1 + X2) ** 2) == 2
    assert phi(classical, NCPolynomial.scalar(5)) == 5
    assert phi(classical, X1 * X1 - X2 * X2) == 0


def test_phi_is_linear() -> None:
    rng = random.Random(9)
    weight = PairWeight.q_deformed(Fraction(-1, 2))
    labels = ["X1", "X2"]

    def random_poly() -> NCPolynomial:
        return NCPolynomial.total(
            NCPolynomial.word(
                [rng.choice(labels) for _ in range(rng.randint(0, 6))],
                Fraction(rng.randint(-4, 4), rng.randint(1, 4)),
            )
            for _ in range(5)
        )

    for _ in range(10):
        p, q = random_poly(), random_poly()
        a, b = Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(-3, 3), 5)
        assert phi(weight, p * a + q * b) == a * phi(weight, p) + b * phi(weight, q)


def test_joint_cumulants_of_polynomials() -> None:
    s1 = X1 + X2
    t = X1 * X1 + X2 * X2 - s1 * s1 * Fraction(1, 2)

    assert joint_cumulant_of_polynomials(PairWeight.classical(), "classical", [s1, t]) == 0
    assert joint_cumulant_of_polynomials(PairWeight.free(), "free", [X1, X1]) == 1
    assert joint_cumulant_of_polynomials(PairWeight.free(), "free", [X1, X2]) == 0


def test_joint_cumulant_family_mismatch() -> None:
    with pytest.raises(WeightError, match="pairs with"):
        joint_cumulant_of_polynomials(PairWeight.free(), "classical", [X1, X1])

    value = joint_cumulant_of_polynomials(
        PairWeight.free(), "classical", [X1, X1], allow_mismatch=True
    )
    assert value == 1


def test_q_weight_only_pairs_with_classical_family() -> None:
    with pytest.raises(WeightError, match="classical family"):
        joint_cumulant_of_polynomials(PairWeight.q_deformed(0), "free", [X1, X1])


def test_joint_cumulant_degree_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("CUMULANTTOOLS_DEGREE_CAP", "4")

    with pytest.raises(WeightError, match="total degree"):
        joint_cumulant_of_polynomials(PairWeight.classical(), "classical", [X1 * X1] * 3)


def test_phi_of_spec_state() -> None:
    spec = CumulantSpec.univariate({1: 1, 2: 1}, label="X1")

    assert phi(spec, X1 * X1 + 3) == 2 + 3


def test_custom_weight_table(tmp_path: Path) -> None:
    path = tmp_path / "weights.json"
    path.write_text(json.dumps({"1,2": "1", "1,2|3,4": "1", "1,3|2,4": "1/4", "1,4|2,3": "1/2"}))
    weight = load_custom_weight(path)

    assert wick_moment(weight, ("X",) * 4) == Fraction(7, 4)
    assert parse_weight(f"custom:{path}") == weight


def test_custom_weight_table_must_cover_degree(tmp_path: Path) -> None:
    path = tmp_path / "weights.json"
    path.write_text(json.dumps({"1,2": "1", "1,2|3,4": "1"}))

    with pytest.raises(WeightError, match="misses"):
        load_custom_weight(path)


def test_custom_weight_rejects_non_pairs() -> None:
    with pytest.raises(WeightError, match="not a pair partition"):
        PairWeight.custom({Partition.parse("1,2,3"): 1})


@pytest.mark.parametrize("text", ["gaussian", "q:0.5", "custom:"])
def test_parse_weight_rejects_unknown(text: str) -> None:
    with pytest.raises(InvalidInput) as excinfo:
        parse_weight(text)

    assert excinfo.value.exit_code == 2


def test_clt_bernoulli_example() -> None:
    table = block_factorized_table([0, 1, 0, 1], 4)

    result = clt_moment(2, 4, table, singleton_condition=True)

    assert result.total == 8
    assert result.value == 2
    assert clt_limit(4, table) == 3


@pytest.mark.parametrize("N", range(2, 41))
def test_clt_fourth_moment_is_exact(N: int) -> None:
    moments = [0, 1, 0, 1, 0]
    fourth = clt_moment(N, 4, block_factorized_table(moments, 4), singleton_condition=True)

    assert fourth.value == 3 - Fraction(2, N)
    for odd in (3, 5):
        table = block_factorized_table(moments, odd)
        assert clt_moment(N, odd, table, singleton_condition=True).total == 0


def test_clt_converges_at_rate_one_over_n() -> None:
    table = block_factorized_table([0, 1, 0, 1, 0, 1], 6)
    limit = clt_limit(6, table)

    for N in range(2, 41):
        value = clt_moment(N, 6, table, singleton_condition=True).value
        assert value is not None
        assert abs((value - limit) * N) <= 100


def test_clt_odd_degree_keeps_exact_total() -> None:
    result = clt_moment(5, 3, block_factorized_table([0, 1, 0], 3), singleton_condition=True)

    assert result.total == 0
    assert result.value is None
    assert result.power == Fraction(-3, 2)
    assert result.to_json()["value"] is None


def test_singleton_condition_violation_is_reported() -> None:
    table = block_factorized_table([1, 1, 1, 1], 4)

    with pytest.raises(WeightError, match="singleton condition"):
        clt_moment(3, 4, table, singleton_condition=True)


def test_wick_table_covers_all_partitions() -> None:
    table = wick_table(PairWeight.free(), 4)

    assert len(table) == len(enumerate_family(LatticeFamily.ALL, 4))
    assert table[Partition.parse("1,3|2,4")] == 0
    assert table[Partition.parse("1,2,3,4")] == 2


def test_wick_command_q_weight() -> None:
    result = CliRunner().invoke(cli, ["wick", "--weight", "q:1/2", "--word", "X,X,X,X"])

    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {"value": "5/2"}


def test_phi_command_with_polynomial_text() -> None:
    result = CliRunner().invoke(cli, ["phi", "--weight", "free", "--poly", "X1*X1*X1*X1 + -1*X2*X2"])

    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {"value": "1/1"}


def test_joint_cumulant_command() -> None:
    result = CliRunner().invoke(
        cli,
        ["joint-cumulant", "--weight", "free", "--family", "free", "--poly", "X1", "--poly", "X1"],
    )

    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {"value": "1/1"}


def test_clt_command() -> None:
    result = CliRunner().invoke(cli, ["clt", "--N", "2", "--n", "4", "--moments", "0,1,0,1", "--singleton"])

    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["value"] == "2/1"
    assert payload["limit"] == "3/1"
    assert payload["power"] == "-2/1"


def test_parse_polynomial_matches_builder() -> None:
    assert parse_polynomial("X1*X2 + X2*X1") == X1 * X2 + X2 * X1
