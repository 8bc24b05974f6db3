"""Output emission shared by the tools: JSON and CSV with the run config
echoed at the top, and the base class every subcommand tool derives from.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import Any, ClassVar, Iterable, Literal, Sequence

from agency_swarm.tools import BaseTool
from pydantic import ValidationError

from shared.config import RunConfig

from .errors import SupersatError

logger = logging.getLogger(__name__)

CONFIG_PREFIX = "# config: "

EXIT_CODES = {"ok": 0, "fail": 1, "error": 2}


@dataclass(frozen=True)
class ToolResult:
    status: Literal["ok", "fail", "error"]
    output: str

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _default(value: Any) -> Any:
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def emit_json(config: RunConfig, payload: dict) -> str:
    return json.dumps({"config": config.echo(), **payload}, indent=2, default=_default)


def emit_csv(config: RunConfig, header: Sequence[str], rows: Iterable[Sequence[Any]], trailer: Iterable[str] = ()) -> str:
    buffer = io.StringIO()
    buffer.write(CONFIG_PREFIX + json.dumps(config.echo(), separators=(",", ":")) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for line in trailer:
        buffer.write(f"# {line}\n")
    return buffer.getvalue()


class SupersatTool(BaseTool):
    """Base for the subcommand tools.

    Field names match ``RunConfig`` so a tool and its echoed config convert
    into each other.
    """

    subcommand: ClassVar[str]

    def to_config(self) -> RunConfig:
        values = self.model_dump(include=set(self.config_fields()), exclude_none=True)
        return RunConfig(subcommand=self.subcommand, **values)

    @classmethod
    def config_fields(cls) -> list[str]:
        return [name for name in cls.model_fields if name in RunConfig.model_fields]

    @classmethod
    def from_config(cls, config: RunConfig) -> "SupersatTool":
        if config.subcommand != cls.subcommand:
            raise ValueError(f"config is for {config.subcommand!r}, not {cls.subcommand!r}")
        return cls(**config.model_dump(include=set(cls.config_fields()), exclude_none=True))

    def perform(self, config: RunConfig) -> ToolResult:
        raise NotImplementedError

    def execute(self) -> ToolResult:
        try:
            config = self.to_config()
            return self.perform(config)
        except ValidationError as e:
            return ToolResult("error", f"Error: invalid parameters: {e}")
        except SupersatError as e:
            logger.warning("%s failed: %s", self.subcommand, e)
            return ToolResult("error", f"Error: {e}")

    def run(self) -> str:
        return self.execute().output
