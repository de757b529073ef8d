"""File I/O helpers for configs and datasets.

Pydantic handles config serialization and pandas handles CSV parsing;
these wrappers turn their failures into the library's own errors.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from .dataset import TobitDataset
from .errors import ConfigError, DomainError, IngestionError

ConfigT = TypeVar("ConfigT", bound=BaseModel)


def _config_error(model_cls: type[BaseModel], exc: ValidationError) -> ConfigError:
    unknown = [".".join(str(part) for part in err["loc"]) for err in exc.errors() if err["type"] == "extra_forbidden"]
    problems = [
        f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
        for err in exc.errors()
        if err["type"] != "extra_forbidden"
    ]
    message = f"Invalid {model_cls.__name__}"
    if problems:
        message += ": " + "; ".join(problems)
    return ConfigError(message, unknown_keys=unknown)


def load_config(model_cls: type[ConfigT], source: str | Path | dict[str, Any]) -> ConfigT:
    """Load a config from a JSON file path, JSON string, or dict."""
    try:
        if isinstance(source, dict):
            return model_cls.model_validate(source)
        if isinstance(source, str) and source.lstrip().startswith("{"):
            return model_cls.model_validate_json(source)
        path = Path(source)
        if path.exists():
            return model_cls.model_validate_json(path.read_text())
        if isinstance(source, str):
            return model_cls.model_validate_json(source)
    except ValidationError as exc:
        raise _config_error(model_cls, exc) from exc
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigError(f"Cannot read {model_cls.__name__} from {source}: {exc}") from exc
    raise ConfigError(f"Cannot load {model_cls.__name__} from: {source}")


def dump_config(config: BaseModel) -> dict[str, Any]:
    """Serialize a config to a JSON-compatible dict."""
    return config.model_dump(mode="json")


def read_numeric_csv(path: str | Path) -> pd.DataFrame:
    """Read a headed CSV whose every cell must be numeric.

    Raises IngestionError naming the first bad row (1-based, header
    excluded) and column.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as exc:
        raise IngestionError(f"File not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise IngestionError(f"CSV has no header: {path}") from exc
    except pd.errors.ParserError as exc:
        raise IngestionError(f"Malformed CSV {path}: {exc}") from exc
    if frame.empty:
        raise DomainError(f"Dataset is empty: {path}")
    out = {}
    for column in frame.columns:
        raw = frame[column].str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0]) + 1
            cell = raw.iloc[row - 1]
            reason = "Missing value" if cell == "" else f"Non-numeric value {cell!r}"
            raise IngestionError(reason, row=row, column=str(column))
        out[str(column)] = values.astype(float)
    return pd.DataFrame(out)


def read_dataset_csv(
    path: str | Path,
    response: str = "y",
    c: float = 0.0,
    standardize: bool = False,
) -> TobitDataset:
    """Load a TobitDataset: ``response`` column as y, every other column as X."""
    frame = read_numeric_csv(path)
    if response not in frame.columns:
        raise IngestionError(f"Response column '{response}' not found in {path}", column=response)
    features = [col for col in frame.columns if col != response]
    if not features:
        raise DomainError(f"No predictor columns besides '{response}' in {path}")
    data = TobitDataset(
        X=frame[features].to_numpy(dtype=float),
        y=frame[response].to_numpy(dtype=float),
        c=c,
        feature_names=tuple(features),
    )
    return data.standardized() if standardize else data
