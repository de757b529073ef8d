"""Run artifacts: CSV tables, the JSON run manifest and terminal messages.

CSV is the interchange format for every table; JSON is used only for the
manifest. Tables are written with ``\\n`` line endings and pandas' default
float repr, so identical frames give identical bytes.
"""

from __future__ import annotations

import platform
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING, Any

import hstobit_core
from hstobit_core.errors import ConfigError
from hstobit_core.rng import PRNG_ALGORITHM
from pydantic import BaseModel, ConfigDict, Field, ValidationError

UTC = timezone.utc  # datetime.UTC is an alias of this (Python >= 3.11)

if TYPE_CHECKING:
    import pandas as pd

MANIFEST_NAME = "manifest.json"

_RESET = "\033[0m"
_DIM = "\033[2m"
_RED = "\033[31m"
_GREEN = "\033[32m"


class RunManifest(BaseModel):
    """Everything needed to re-run a command bit-exactly.

    ``inputs`` holds the command's file arguments; ``config`` the fully
    resolved configuration after file values and flags were merged.
    """

    model_config = ConfigDict(extra="forbid")

    command: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    version: str = hstobit_core.__version__
    prng: str = PRNG_ALGORITHM
    python: str = Field(default_factory=platform.python_version)
    created_at: str = Field(default_factory=lambda: datetime.now(UTC).isoformat(timespec="seconds"))
    timings: dict[str, float] = Field(default_factory=dict)
    warnings: dict[str, int] = Field(default_factory=dict)
    diagnostics: dict[str, Any] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)


def write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write ``frame`` without its index."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, lineterminator="\n")
    return out


def write_manifest(manifest: RunManifest, output_dir: str | Path) -> Path:
    out = Path(output_dir) / MANIFEST_NAME
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(manifest.model_dump_json(indent=2) + "\n")
    return out


def load_manifest(path: str | Path) -> RunManifest:
    source = Path(path)
    if source.is_dir():
        source = source / MANIFEST_NAME
    try:
        return RunManifest.model_validate_json(source.read_text())
    except OSError as exc:
        raise ConfigError(f"Cannot read manifest {source}: {exc}") from exc
    except ValidationError as exc:
        raise ConfigError(f"Invalid manifest {source}: {exc.error_count()} problem(s)") from exc


def print_success(message: str) -> None:
    """Print a success message (green)."""
    print(f"{_GREEN}{message}{_RESET}")


def print_system(message: str) -> None:
    """Print a status message (dimmed)."""
    print(f"{_DIM}{message}{_RESET}")


def print_error(message: str) -> None:
    """Print an error message (red) to stderr."""
    print(f"{_RED}{message}{_RESET}", file=sys.stderr)
