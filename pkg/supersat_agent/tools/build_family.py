from typing import ClassVar, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.balanced import greedy_build
from .utils.documents import family_document, load_graph
from .utils.hypergraph import ScaleParams
from .utils.patterns import PatternSpec
from .utils.reporting import SupersatTool, ToolResult


class BuildFamily(SupersatTool):
    """
    Greedily builds a balanced family of pattern copies in a host graph and writes it as a family JSON document.

    Copies are added in enumeration order (or a seeded shuffle of it) as long as no
    degree cap would be exceeded. The caps depend on delta and on the density k,
    which is derived from the edge count unless given explicitly. The resulting
    family is re-audited from scratch; a failed audit makes the run fail.
    """

    subcommand: ClassVar[str] = "build"

    pattern: str = Field(..., description="Pattern as 'theta:a,b' or 'complete:a1,...,ar'")
    graph: str = Field(..., description="Path to a graph JSON document {n, r, edges}")
    delta: Optional[float] = Field(default=None, gt=0, description="Slack constant delta; the built-in default when omitted")
    k: Optional[float] = Field(default=None, gt=0, description="Density override; derived from the edge count when omitted")
    target: Optional[int] = Field(default=None, ge=0, description="Stop once the family has this many copies")
    shuffle: Optional[int] = Field(default=None, description="Seed for shuffling the candidate order")
    workers: Optional[int] = Field(default=None, ge=1, description="Worker threads for the enumeration")

    def perform(self, config: RunConfig) -> ToolResult:
        host = load_graph(config.graph)
        pattern = PatternSpec.parse(config.pattern)
        params = ScaleParams.for_host(pattern, host, k=config.k, delta=config.delta)
        built = greedy_build(host, params, config.target, shuffle_seed=config.shuffle, workers=config.workers)
        document = family_document(built.family, params, built.stop_reason, built.target, config.echo())
        status = "ok" if built.audit.passed else "fail"
        return ToolResult(status, document.model_dump_json(indent=2))


if __name__ == "__main__":
    import json
    import tempfile
    from itertools import combinations

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump({"n": 5, "r": 2, "edges": [list(e) for e in combinations(range(5), 2)]}, handle)
    print(BuildFamily(pattern="theta:2,2", graph=handle.name, delta=0.01, k=10).run())
