import argparse
import logging
import os
import re
from pathlib import Path
from typing import Any, Literal

import dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

_CURRENT_DIR = Path(os.path.dirname(__file__))

# Path to the src/ directory
SRC_ROOT = _CURRENT_DIR.parent

# Path to the app directory (sensorsched/)
APP_ROOT = SRC_ROOT.parent

# Path to the data directory (default root for run artifacts)
DATA_ROOT = APP_ROOT / "data"


_config_arg_parser = argparse.ArgumentParser(add_help=False)
_config_arg_parser.add_argument(
    "-e",
    "--env",
    type=str,
    help="Path to the .env file to use.",
)

_config_args, _ = _config_arg_parser.parse_known_args()
CONFIG_FILE = _config_args.env or APP_ROOT / ".env"

_dotenv_values = dotenv.dotenv_values(CONFIG_FILE)

# _env contains all the variables in the .env file. Use this to access the variables not
# defined in the RunConfig class.
_env = {
    **_dotenv_values,
    "CONFIG_FILE": str(CONFIG_FILE),
}


def get_config(key: str) -> str | None:
    """Get a configuration value from the environment."""
    return _env.get(key.upper())


_REWARD_PATTERN = re.compile(r"^\s*\d+(\.\d+)?\s*/\s*\d+(\.\d+)?\s*$")

# Dotted keys in a run config file that tune the trace profile, e.g. class.0.min=20 or cl.3=5
_PROFILE_KEY = re.compile(r"^(class\.\d+\.(min|max|weight)|cl\.\d+)$")
_PERIOD_KEY = re.compile(r"^period\.(\d+)$")


class RunConfig(BaseModel):
    """Every parameter a subcommand may need. Defaults < .env < config file < CLI flags."""

    seed: int = Field(1, ge=0)
    out: Path = Path("runs")

    # trace
    length: int = Field(7000, ge=1)
    profile: Literal["kitchen"] = "kitchen"
    profile_overrides: dict[str, str] = {}
    trace: Path | None = None

    # scheduler training
    episodes: int = Field(20000, ge=0)
    epsilon: float = Field(0.1, ge=0.0, le=1.0)
    alpha: float = Field(0.1, gt=0.0, le=1.0)
    gamma: float = Field(0.6, ge=0.0, lt=1.0)
    theta: float = Field(0.01, ge=0.0)
    n_success: int = Field(5, ge=1)
    mode: Literal["full", "update"] = "full"
    a_max: int = Field(100, ge=1)
    cr1: str = "10/50"
    cr2: str = "1/5"
    qtable: Path | None = None

    # simulation
    policy: str = "clpa"
    policies: list[str] = ["fixed", "clpa", "qlbs", "min"]
    fixed_period: int = Field(1, ge=1)
    jobs: int = Field(1, ge=1)
    classifier: Literal["oracle", "openworld"] = "oracle"

    # open world
    tail_size: int = Field(100, ge=1)
    cover_threshold: float = Field(0.7, gt=0.0, le=1.0)
    distance_multiplier: float = Field(0.4, gt=0.0)
    rejection_threshold: float = Field(0.5, gt=0.0, lt=1.0)
    min_samples: int = Field(10, ge=1)
    n_known: int = Field(9, ge=2)
    n_increments: int = Field(3, ge=0)
    per_increment: int = Field(3, ge=1)
    dim: int = Field(16, ge=1)
    train_per_class: int = Field(60, ge=2)
    test_per_class: int = Field(40, ge=1)

    # updater
    queue_size: int = Field(100, ge=0)
    seconds_per_sample: float = Field(31.0, gt=0.0)
    novel_class: int = Field(5, ge=0)
    period_overrides: dict[int, int] = {}
    calibrate: bool = False

    @field_validator("cr1", "cr2")
    @classmethod
    def _check_reward(cls, v: str) -> str:
        if not _REWARD_PATTERN.match(v):
            raise ValueError(f"reward must look like R/P, got {v!r}")
        return v.replace(" ", "")

    @field_validator("policies", mode="before")
    @classmethod
    def _split_policies(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [p.strip() for p in v.split(",") if p.strip()]
        return v

    @field_validator("policies")
    @classmethod
    def _check_policies(cls, v: list[str]) -> list[str]:
        unknown = set(v) - {"fixed", "clpa", "qlbs", "min"}
        if unknown:
            raise ValueError(f"unknown policies: {sorted(unknown)}")
        return v

    @field_validator("period_overrides", mode="before")
    @classmethod
    def _parse_period_overrides(cls, v: Any) -> Any:
        if isinstance(v, str):
            v = [item for item in v.split(",") if item.strip()]
        if isinstance(v, list):
            parsed: dict[int, int] = {}
            for item in v:
                class_id, _, period = str(item).partition("=")
                if not period:
                    raise ValueError(f"period override must look like class=T_sp, got {item!r}")
                parsed[int(class_id)] = int(period)
            return parsed
        return v

    @field_validator("period_overrides")
    @classmethod
    def _check_period_overrides(cls, v: dict[int, int]) -> dict[int, int]:
        for class_id, period in v.items():
            if period < 1:
                raise ValueError(f"period override for class {class_id} must be >= 1")
        return v

    @property
    def output_dir(self) -> Path:
        return self.out if self.out.is_absolute() else DATA_ROOT / self.out


def read_config_file(path: Path | str) -> dict[str, str]:
    """Read a flat key=value run config file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    values = dotenv.dotenv_values(path)
    return {key.strip(): value for key, value in values.items() if value is not None}


def _from_env() -> dict[str, Any]:
    values: dict[str, Any] = {}
    for name in RunConfig.model_fields:
        if (value := get_config(name)) is not None:
            values[name] = value
    return values


def _from_file(path: Path | str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    profile_overrides: dict[str, str] = {}
    period_overrides: dict[int, int] = {}
    for key, value in read_config_file(path).items():
        if _PROFILE_KEY.match(key):
            profile_overrides[key] = value
        elif match := _PERIOD_KEY.match(key):
            period_overrides[int(match.group(1))] = int(value)
        else:
            name = key.replace("-", "_")
            if name not in RunConfig.model_fields:
                logger.warning(f"Ignoring unknown config key: {key}")
                continue
            values[name] = value
    if profile_overrides:
        values["profile_overrides"] = profile_overrides
    if period_overrides:
        values["period_overrides"] = period_overrides
    return values


def load_run_config(
    config_file: Path | str | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Build the run config by layering .env values, the config file and explicit overrides."""
    values = _from_env()
    if config_file is not None:
        values.update(_from_file(config_file))
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    run_config = RunConfig.model_validate(values)
    logger.debug(f"Run config: {run_config.model_dump_json()}")
    return run_config
