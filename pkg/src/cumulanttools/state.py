from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from cumulanttools.common import InvalidInput

STATE_ENV_VAR = "CUMULANTTOOLS_STATE_HOME"
DEGREE_CAP_ENV_VAR = "CUMULANTTOOLS_DEGREE_CAP"
CLASSICAL_CAP_ENV_VAR = "CUMULANTTOOLS_CLASSICAL_CAP"
SETTINGS_NAME = "settings.yaml"
BASELINE_DIR = "baselines"
DEFAULT_DEGREE_CAP = 14
DEFAULT_CLASSICAL_CAP = 9


@dataclass(frozen=True)
class Settings:
    degree_cap: int = DEFAULT_DEGREE_CAP
    classical_cap: int = DEFAULT_CLASSICAL_CAP


def default_state_home() -> Path:
    """Return the configured state directory without creating it."""
    configured = os.getenv(STATE_ENV_VAR)
    if configured:
        return Path(configured).expanduser()
    return Path("~/cumulanttools/state").expanduser()


def ensure_state_dir() -> Path:
    """Ensure the state directory exists and return it."""
    state_dir = default_state_home()
    state_dir.mkdir(parents=True, exist_ok=True)
    return state_dir


def get_state_file(name: str, *, ensure_parent: bool = True) -> Path:
    """
    Return the path to a file under the state directory.

    When ensure_parent is True (default) the parent directories are created.
    """
    base = ensure_state_dir() if ensure_parent else default_state_home()
    path = base / name
    if ensure_parent:
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def load_document(path: Path) -> dict[str, Any]:
    """Load a YAML (or JSON) document and require a mapping at the root."""
    target = path.expanduser()
    try:
        raw = target.read_text()
    except FileNotFoundError as exc:
        raise InvalidInput(f"Expected input file at {target}") from exc

    try:
        parsed = yaml.safe_load(raw)
        data = {} if parsed is None else parsed
    except yaml.YAMLError as exc:
        raise InvalidInput(f"Failed to parse {target}: {exc}") from exc

    if not isinstance(data, dict):
        raise InvalidInput(
            f"{target} has unexpected structure (expected a mapping)."
        )
    return data


def _coerce_cap(value: object, *, origin: str) -> int:
    if isinstance(value, bool):
        raise InvalidInput(f"{origin} must be a positive integer.")
    if isinstance(value, str):
        stripped = value.strip()
        if not stripped.isdigit():
            raise InvalidInput(f"{origin} must be a positive integer, got {value!r}.")
        value = int(stripped, 10)
    if not isinstance(value, int) or value < 1:
        raise InvalidInput(f"{origin} must be a positive integer, got {value!r}.")
    return value


def load_settings() -> Settings:
    """
    Resolve the enumeration caps.

    ``settings.yaml`` in the state directory is optional; environment
    variables win over the file. Nothing is created on disk.
    """
    values: dict[str, object] = {}
    settings_path = get_state_file(SETTINGS_NAME, ensure_parent=False)
    if settings_path.is_file():
        values.update(load_document(settings_path))

    unknown = sorted(set(values) - {"degree_cap", "classical_cap"})
    if unknown:
        raise InvalidInput(
            f"{settings_path} has unknown keys: {', '.join(map(str, unknown))}."
        )

    for key, env_var in (
        ("degree_cap", DEGREE_CAP_ENV_VAR),
        ("classical_cap", CLASSICAL_CAP_ENV_VAR),
    ):
        configured = os.getenv(env_var)
        if configured:
            values[key] = configured

    return Settings(
        degree_cap=_coerce_cap(
            values.get("degree_cap", DEFAULT_DEGREE_CAP), origin="degree_cap"
        ),
        classical_cap=_coerce_cap(
            values.get("classical_cap", DEFAULT_CLASSICAL_CAP), origin="classical_cap"
        ),
    )


def _atomic_write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temporary = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as stream:
            json.dump(data, stream, sort_keys=True, indent=2)
            stream.write("\n")
            stream.flush()
            os.fsync(stream.fileno())
        os.replace(temporary, path)
    finally:
        try:
            os.unlink(temporary)
        except FileNotFoundError:
            pass


def baseline_path(name: str) -> Path:
    return get_state_file(f"{BASELINE_DIR}/{name}.json", ensure_parent=False)


def load_baseline(name: str) -> Any | None:
    """Return a recorded baseline, or None if it was never recorded."""
    path = baseline_path(name)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        return None
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"Invalid baseline {path}: {exc}") from exc


def save_baseline(name: str, data: Any) -> Path:
    path = baseline_path(name)
    _atomic_write_json(path, data)
    return path
