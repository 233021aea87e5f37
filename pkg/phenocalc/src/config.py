import logging
import os

from pathlib import Path
from typing import Literal, Optional

import yaml

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from phenocalc.src.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_PATH = os.environ.get("PHENOCALC_CONFIG", str(Path(__file__).resolve().parents[2] / "config.yaml"))


class Settings(BaseModel):
    """Validated contents of config.yaml. Keys are spelled in upper case in the file."""

    model_config = ConfigDict(populate_by_name=True, frozen=True, extra="ignore")

    backend: Literal["exact", "float"] = Field("exact", alias="BACKEND")
    depth: int = Field(64, alias="DEPTH", ge=0)
    float_tolerance: float = Field(1e-12, alias="FLOAT_TOLERANCE", gt=0)
    output: Literal["json", "csv"] = Field("json", alias="OUTPUT")
    precision: int = Field(6, alias="PRECISION", ge=1, le=17)
    tie_tolerance: float = Field(1e-12, alias="TIE_TOLERANCE", gt=0)
    near_tie_tolerance: float = Field(1e-9, alias="NEAR_TIE_TOLERANCE", gt=0)
    exact_rate_max_denominator: int = Field(4096, alias="EXACT_RATE_MAX_DENOMINATOR", ge=1)
    limit_precision_digits: int = Field(50, alias="LIMIT_PRECISION_DIGITS", ge=15)
    cdf_grid_points: int = Field(1001, alias="CDF_GRID_POINTS", ge=2)
    concentration_delta: float = Field(0.05, alias="CONCENTRATION_DELTA", gt=0)
    seed: int = Field(42, alias="SEED", ge=0, lt=2 ** 64)
    chunk_size: int = Field(4096, alias="CHUNK_SIZE", ge=1)
    max_workers: int = Field(4, alias="MAX_WORKERS", ge=1)
    log_level: str = Field("WARNING", alias="LOG_LEVEL")

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, v):
        if not isinstance(logging.getLevelName(v.upper()), int):
            raise ValueError(f"{v} is not a logging level.")
        return v.upper()


def load_settings(path: Optional[str] = None) -> Settings:
    """
    Reads a YAML configuration file into a Settings object.

    A missing file yields the built-in defaults; an unreadable or invalid one raises ConfigError.
    """
    path = path or CONFIG_PATH
    if not os.path.exists(path):
        logger.debug(f"No configuration file at {path}, using defaults.")
        return Settings()
    try:
        with open(path, 'r') as config_file:
            raw = yaml.safe_load(config_file) or {}
        return Settings(**raw)
    except (yaml.YAMLError, ValidationError, TypeError) as e:
        raise ConfigError(f"Invalid configuration file {path}: {e}")


settings = load_settings()
