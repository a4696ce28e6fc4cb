from __future__ import annotations

from pathlib import Path

import pytest


@pytest.fixture(autouse=True)
def state_home(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    home = tmp_path / "state"
    monkeypatch.setenv("CUMULANTTOOLS_STATE_HOME", str(home))
    monkeypatch.delenv("CUMULANTTOOLS_DEGREE_CAP", raising=False)
    monkeypatch.delenv("CUMULANTTOOLS_CLASSICAL_CAP", raising=False)
    return home
