from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import click
import pytest
from click.testing import CliRunner

from cumulanttools.main import cli


def _run_cli(args: list[str], state_home: Path) -> subprocess.CompletedProcess[str]:
    env = os.environ.copy()
    env["CUMULANTTOOLS_STATE_HOME"] = str(state_home)
    return subprocess.run(
        [sys.executable, "-c", "from cumulanttools.main import cli; cli()", *args],
        env=env,
        text=True,
        capture_output=True,
        check=False,
    )


@pytest.mark.parametrize(
    "args", [["--help"], ["check", "--help"], ["qform", "--help"], ["check", "suite", "--help"]]
)
def test_help_does_not_create_state(tmp_path: Path, args: list[str]) -> None:
    state_home = tmp_path / "state"

    result = _run_cli(args, state_home)

    assert result.returncode == 0, result.stderr
    assert "Usage:" in result.stdout
    assert not state_home.exists()


def test_help_ignores_broken_settings(tmp_path: Path) -> None:
    state_home = tmp_path / "state"
    state_home.mkdir()
    settings = state_home / "settings.yaml"
    content = "this is deliberately not valid: [yaml"
    settings.write_text(content)

    result = _run_cli(["check", "--help"], state_home)

    assert result.returncode == 0, result.stderr
    assert settings.read_text() == content
    assert sorted(path.name for path in state_home.iterdir()) == ["settings.yaml"]


def test_broken_settings_fail_computations(tmp_path: Path) -> None:
    state_home = tmp_path / "state"
    state_home.mkdir()
    (state_home / "settings.yaml").write_text("this is deliberately not valid: [yaml")

    result = _run_cli(["wick", "--weight", "free", "--word", "X,X"], state_home)

    assert result.returncode == 2
    assert "Failed to parse" in result.stderr


def test_computation_leaves_state_untouched(tmp_path: Path) -> None:
    state_home = tmp_path / "state"

    result = _run_cli(["partitions", "enum", "--family", "pair", "--n", "4"], state_home)

    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["count"] == 3
    assert not state_home.exists()


def test_checks_log_progress(tmp_path: Path) -> None:
    state_home = tmp_path / "state"

    result = _run_cli(["--pretty", "check", "skitovic", "--eps", "1/2"], state_home)

    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["verdict"] == "pass"
    assert "[check] skitovic: start (eps=1/2)" in result.stderr
    assert (state_home / "checks.log").is_file()


def _command_table(group: click.Group, prefix: str = "") -> set[str]:
    table: set[str] = set()
    for name, command in group.commands.items():
        if isinstance(command, click.Group):
            table |= _command_table(command, f"{prefix}{name} ")
        else:
            table.add(f"{prefix}{name}")
    return table


def test_command_table() -> None:
    assert _command_table(cli) == {
        "partitions enum",
        "partitions mobius",
        "partitions kernel",
        "partitions join",
        "partitions leq",
        "partitions meet",
        "partitions crossings",
        "partitions kernel-maps",
        "partitions connect",
        "cumulants to-moments",
        "cumulants partitioned",
        "cumulants product",
        "cumulants from-moments",
        "cumulants linear-form",
        "wick",
        "phi",
        "joint-cumulant",
        "clt",
        "qform single",
        "qform joint",
        "qform independence",
        "qform lq",
        "qform shifted",
        "check stability",
        "check maxwell",
        "check maxwell-converse",
        "check bernstein",
        "check bernstein-multi",
        "check skitovic",
        "check cramer",
        "check sd-identity",
        "check lukacs",
        "check suite",
        "matrix orthogonal",
        "matrix irreducible",
    }


@pytest.mark.parametrize(
    ("args", "expected"),
    [
        (["partitions", "enum", "--family", "pair", "--n", "6", "--count-only"], '{"count":15}\n'),
        (["wick", "--weight", "q:1/2", "--word", "X,X,X,X"], '{"value":"5/2"}\n'),
    ],
)
def test_documented_examples_are_byte_stable(args: list[str], expected: str) -> None:
    runner = CliRunner()

    outputs = {runner.invoke(cli, args).stdout for _ in range(2)}

    assert outputs == {expected}
