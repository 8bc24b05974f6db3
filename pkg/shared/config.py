"""Run configuration shared by the tools and the command line.

Guard defaults are read from the environment (``.env`` is loaded by the
entry points with python-dotenv), so a deployment can tighten or relax them
without touching flags.
"""

import json
import logging
import os
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

Subcommand = Literal["enum", "build", "audit", "containers", "count", "oracle", "trend"]


def env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r (not an integer), using %d", name, raw, default)
        return default


def default_workers() -> int:
    return env_int("SUPERSAT_WORKERS", 1)


def default_oracle_max_vertices() -> int:
    return env_int("SUPERSAT_ORACLE_MAX_VERTICES", 12)


def default_container_max_edges() -> int:
    return env_int("SUPERSAT_CONTAINER_MAX_EDGES", 18)


def default_free_count_max_edges() -> int:
    return env_int("SUPERSAT_FREE_COUNT_MAX_EDGES", 24)


class RunConfig(BaseModel):
    """Fully resolved parameters of one run, echoed into every output header."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    pattern: Optional[str] = None
    graph: Optional[str] = None
    family: Optional[str] = None
    n: Optional[int] = Field(None, ge=1)
    delta: Optional[float] = Field(None, gt=0)
    eps: Optional[float] = Field(None, gt=0)
    k0: Optional[float] = Field(None, gt=0)
    k: Optional[float] = Field(None, gt=0)
    family_k: Optional[float] = Field(None, gt=0)
    tau: Optional[float] = Field(None, gt=0)
    alpha: Optional[float] = Field(None, gt=0)
    c_bound: Optional[float] = Field(None, gt=0)
    target: Optional[int] = Field(None, ge=0)
    seed: int = 0
    shuffle: Optional[int] = None
    fmt: Literal["json", "csv"] = "json"
    count_only: bool = False
    oracle: bool = False
    verify: bool = True
    sizes: Optional[str] = None
    hosts: Literal["complete", "random"] = "complete"
    density: float = Field(2.0, gt=0)
    threshold_c: float = Field(1.0, ge=0)
    max_edges: Optional[int] = Field(None, ge=0)
    workers: int = Field(default_factory=default_workers, ge=1)
    oracle_max_vertices: int = Field(default_factory=default_oracle_max_vertices, ge=1)
    container_max_edges: int = Field(default_factory=default_container_max_edges, ge=1)
    free_count_max_edges: int = Field(default_factory=default_free_count_max_edges, ge=1)

    @model_validator(mode="after")
    def _check_pipeline_eps(self) -> "RunConfig":
        if self.subcommand == "count" and self.eps is not None and not self.eps < 1:
            raise ValueError("count needs 0 < eps < 1")
        return self

    def echo(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)


def load_config(path: str) -> RunConfig:
    """Read the config echoed by an earlier run (a JSON output or a CSV header)."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    first = text.split("\n", 1)[0]
    if first.startswith("# config: "):
        data = json.loads(first[len("# config: "):])
    else:
        document = json.loads(text)
        data = document.get("config", document) if isinstance(document, dict) else document
    return RunConfig.model_validate(data)
