"""
Run configuration for the command-line driver.

Values come from the JSON file named by --config; flags given on the
command line override file values.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from stratafold.config import CommandKind, OutputFormat
from stratafold.errors import ConfigError

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """Validated parameters of one sub-command run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: CommandKind
    config_path: Optional[Path] = Field(None, description="JSON file the run was configured from")
    output: Optional[Path] = Field(None, description="Output file; stdout when unset")
    format: OutputFormat = OutputFormat.CSV
    t_max: float = Field(2.0, gt=0, description="Integration window for lindblad")
    dt: float = Field(1e-3, gt=0, description="RK4 step for lindblad")
    stride: int = Field(1, ge=1, description="Record every stride-th step")
    backward: bool = Field(False, description="Integrate towards negative time")
    sites: int = Field(8, ge=3, description="Ring size N for dec-spectrum")
    spacing: float = Field(1.0, gt=0, description="Edge length l for dec-spectrum")
    samples: int = Field(20, ge=1, description="Randomized cases per check or Fisher sample points")
    outcomes: int = Field(3, ge=2, description="Outcome count for sampled Fisher points")
    seed: int = Field(0, ge=0, lt=2 ** 64, description="Root seed for randomized runs")
    suites: Optional[List[str]] = Field(None, description="Subset of invariant suites for algebra-check")
    payload: Dict[str, Any] = Field(default_factory=dict, description="Command document read from the config file")

    @model_validator(mode="after")
    def _window_holds_a_step(self) -> "RunConfig":
        if self.t_max < self.dt:
            raise ValueError(f"t_max ({self.t_max}) must be at least dt ({self.dt})")
        return self

    @classmethod
    def from_sources(
        cls,
        command: CommandKind,
        config_path: Optional[Path] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> "RunConfig":
        """
        Merge a JSON config file with command-line overrides.

        The file's optional "run" object sets RunConfig fields; every other
        top-level key is kept in `payload` for the sub-command document
        (Lindblad spec, structure constants, probabilities, ring lengths).

        Args:
            command: Sub-command being run
            config_path: Optional JSON file
            overrides: Flag values; None entries are ignored

        Returns:
            The validated configuration

        Raises:
            ConfigError: Unreadable file, malformed JSON or invalid values
        """
        values: Dict[str, Any] = {"command": command, "config_path": config_path}
        payload: Dict[str, Any] = {}
        if config_path is not None:
            payload = _read_json(Path(config_path))
            settings = payload.pop("run", {})
            if not isinstance(settings, dict):
                raise ConfigError(f"'run' section of {config_path} must be an object")
            values.update(settings)
        values["payload"] = payload
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        try:
            return cls(**values)
        except ValidationError as e:
            logger.error(f"Invalid run configuration: {e}")
            raise ConfigError(f"invalid configuration: {_first_error(e)}") from e


def _read_json(path: Path) -> Dict[str, Any]:
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return document


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ())) or "config"
    return f"{location}: {first.get('msg', 'invalid value')}"
