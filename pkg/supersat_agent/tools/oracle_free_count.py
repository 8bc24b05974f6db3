from typing import ClassVar, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.patterns import PatternSpec
from .utils.pipeline import brute_force_free_count
from .utils.reporting import SupersatTool, ToolResult, emit_json


class OracleFreeCount(SupersatTool):
    """
    Counts the labelled pattern-free r-graphs on n vertices exactly by sweeping all 2^C(n,r) of them.

    Optionally only graphs with at most max_edges edges are counted.
    """

    subcommand: ClassVar[str] = "oracle"

    pattern: str = Field(..., description="Pattern as 'theta:a,b' or 'complete:a1,...,ar'")
    n: int = Field(..., ge=1, description="Number of vertices")
    max_edges: Optional[int] = Field(default=None, ge=0, description="Only count graphs with at most this many edges")
    free_count_max_edges: Optional[int] = Field(default=None, ge=1, description="Largest C(n, r) the sweep accepts")

    def perform(self, config: RunConfig) -> ToolResult:
        pattern = PatternSpec.parse(config.pattern)
        count = brute_force_free_count(config.n, pattern, config.max_edges, guard=config.free_count_max_edges)
        return ToolResult("ok", emit_json(config, {"pattern": pattern.label, "n": config.n, "count": count}))


if __name__ == "__main__":
    print(OracleFreeCount(pattern="theta:2,2", n=4).run())
