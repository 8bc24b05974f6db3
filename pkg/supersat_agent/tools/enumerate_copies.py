from typing import ClassVar, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.documents import load_graph
from .utils.patterns import PatternSpec, enumerate_copies, oracle_count
from .utils.reporting import SupersatTool, ToolResult, emit_json


class EnumerateCopies(SupersatTool):
    """
    Lists every copy of a theta graph or a complete r-partite r-graph in a host graph.

    - Theta copies are reported as {"x", "y", "paths"}, each path running from x to y.
    - Complete r-partite copies are reported as {"parts"}, one sorted vertex list per part.
    - With count_only the copy list is omitted.
    - With oracle the count is re-derived by brute force and compared.
    """

    subcommand: ClassVar[str] = "enum"

    pattern: str = Field(..., description="Pattern as 'theta:a,b' or 'complete:a1,...,ar'")
    graph: str = Field(..., description="Path to a graph JSON document {n, r, edges}")
    count_only: bool = Field(default=False, description="Only report the number of copies")
    oracle: bool = Field(default=False, description="Cross-check the count with the brute-force oracle")
    workers: Optional[int] = Field(default=None, ge=1, description="Worker threads for the enumeration")
    oracle_max_vertices: Optional[int] = Field(default=None, ge=1, description="Largest host the oracle will scan")

    def perform(self, config: RunConfig) -> ToolResult:
        host = load_graph(config.graph)
        pattern = PatternSpec.parse(config.pattern)
        copies = list(enumerate_copies(host, pattern, config.workers))
        payload = {"pattern": pattern.label, "count": len(copies)}
        status = "ok"
        if config.oracle:
            expected = oracle_count(host, pattern, guard=config.oracle_max_vertices)
            payload["oracle_count"] = expected
            if expected != len(copies):
                status = "fail"
        if not config.count_only:
            payload["copies"] = [copy.to_dict() for copy in copies]
        return ToolResult(status, emit_json(config, payload))


if __name__ == "__main__":
    import json
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump({"n": 4, "r": 2, "edges": [[0, 1], [1, 2], [2, 3], [0, 3]]}, handle)
    print(EnumerateCopies(pattern="theta:2,2", graph=handle.name, oracle=True).run())
