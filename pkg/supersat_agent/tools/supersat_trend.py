from typing import ClassVar, Literal, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.experiments import TREND_COLUMNS, parse_sizes, supersat_trend, trend_hosts
from .utils.patterns import PatternSpec
from .utils.reporting import SupersatTool, ToolResult, emit_csv, emit_json


class SupersatTrend(SupersatTool):
    """
    Tabulates exact copy counts against the supersaturation benchmark m^e(H) n^(v(H) - r e(H)).

    Hosts are complete r-graphs K_n or seeded random r-graphs with
    ceil(density * m(n)) edges, one per size. Rows with fewer than
    threshold_c * m(n) edges are flagged. The table is for trend inspection only.
    """

    subcommand: ClassVar[str] = "trend"

    pattern: str = Field(..., description="Pattern as 'theta:a,b' or 'complete:a1,...,ar'")
    sizes: str = Field(..., description="Vertex counts as 'LOW..HIGH' or '4,6,8'")
    hosts: Literal["complete", "random"] = Field(default="complete", description="Host series")
    density: float = Field(default=2.0, gt=0, description="Random hosts get ceil(density * m(n)) edges")
    threshold_c: float = Field(default=1.0, ge=0, description="Flag rows with m < threshold_c * m(n)")
    seed: int = Field(default=0, description="Seed for random hosts")
    fmt: Literal["json", "csv"] = Field(default="csv", description="Output format")
    workers: Optional[int] = Field(default=None, ge=1, description="Worker threads for the enumeration")

    def perform(self, config: RunConfig) -> ToolResult:
        pattern = PatternSpec.parse(config.pattern)
        hosts = trend_hosts(pattern, parse_sizes(config.sizes), config.hosts, config.density, config.seed)
        rows = supersat_trend(pattern, hosts, config.threshold_c, workers=config.workers)
        if config.fmt == "json":
            return ToolResult("ok", emit_json(config, {"rows": [dict(zip(TREND_COLUMNS, row.as_row())) for row in rows]}))
        return ToolResult("ok", emit_csv(config, TREND_COLUMNS, [row.as_row() for row in rows]))


if __name__ == "__main__":
    print(SupersatTrend(pattern="theta:2,2", sizes="4..8").run())
