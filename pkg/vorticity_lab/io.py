"""Input/Output utilities for the vorticity laboratory."""

import json
import logging
import os
from typing import Any, Dict, Mapping, Optional, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from .integrate import Trajectory
from .schemas import RUN_CONFIG_ADAPTER

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Run config failed schema validation."""


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def validate_run_config(doc: Mapping[str, Any]):
    try:
        return RUN_CONFIG_ADAPTER.validate_python(dict(doc))
    except ValidationError as e:
        raise ConfigError(f"Invalid run config: {_describe(e)}") from None


def read_config(file_path: str, command: Optional[str] = None) -> Dict[str, Any]:
    """Raw JSON run config; `command` fills in a missing "command" key."""
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Config file not found: {file_path}")
    with open(file_path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config {file_path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"Config {file_path} must hold a JSON object")
    if command is not None:
        doc.setdefault("command", command)
        if doc["command"] != command:
            raise ConfigError(f"command: config is for {doc['command']!r}, not {command!r}")
    logger.debug("Loaded config %s", file_path)
    return doc


def load_run_config(file_path: str, command: Optional[str] = None):
    """Load and validate a JSON run config."""
    return validate_run_config(read_config(file_path, command))


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dump_json(doc: Any, schema: Optional[Type[BaseModel]] = None) -> str:
    """Serialize deterministically (sorted keys, 2-space indent, trailing newline)."""
    if schema is not None:
        doc = schema.model_validate(doc).model_dump(mode="json")
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False, default=_plain) + "\n"


def save_json(doc: Any, output_path: str, schema: Optional[Type[BaseModel]] = None) -> None:
    text = dump_json(doc, schema)
    with open(output_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info("Results saved to: %s", output_path)


def save_trajectory_csv(traj: Trajectory, output_path: str) -> None:
    """CSV with header t,<amplitude names>."""
    frame = traj.to_frame()
    frame.to_csv(output_path, index=False, lineterminator="\r\n", float_format="%.17g")
    logger.info("Trajectory saved to: %s (%d samples, %d columns)", output_path, len(frame), len(frame.columns))


def create_output_filename(base: str, suffix: str = "", extension: str = ".json", output_dir: str = ".") -> str:
    """Output path built from a base name, e.g. ('lorenz1960', '_k1_l2') -> ./lorenz1960_k1_l2.json."""
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in f"{base}{suffix}")
    return os.path.join(output_dir, f"{safe}{extension}")
