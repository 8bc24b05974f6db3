import logging
from typing import ClassVar, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.containers import container_step, verify_containers
from .utils.documents import load_family, load_graph
from .utils.errors import HostGraphError, PatternError
from .utils.patterns import PatternSpec
from .utils.reporting import SupersatTool, ToolResult, emit_json

logger = logging.getLogger(__name__)


class BuildContainers(SupersatTool):
    """
    Runs one container step on the supersaturation hypergraph of a family.

    The hypergraph has the host's edges as vertices and one hyperedge per family
    member. Emits the containers, their fingerprints, delta(H, tau), the container
    count bound and, when the host is small enough, an exhaustive verification
    over every pattern-free subgraph.
    """

    subcommand: ClassVar[str] = "containers"

    family: str = Field(..., description="Path to a family JSON document written by BuildFamily")
    eps: float = Field(..., gt=0, description="Container parameter eps")
    graph: Optional[str] = Field(default=None, description="Host graph JSON; must match the family's host when given")
    pattern: Optional[str] = Field(default=None, description="Pattern; must match the family's pattern when given")
    tau: Optional[float] = Field(default=None, gt=0, description="Explicit tau; derived from eps, k and alpha when omitted")
    alpha: Optional[float] = Field(default=None, gt=0, description="Exponent gain alpha used to derive tau")
    k: Optional[float] = Field(default=None, gt=0, description="Density used to derive tau; from the edge count when omitted")
    verify: bool = Field(default=True, description="Verify the containers exhaustively when the guard allows")
    container_max_edges: Optional[int] = Field(default=None, ge=1, description="Largest host edge count to verify exhaustively")

    def perform(self, config: RunConfig) -> ToolResult:
        fam, _, _ = load_family(config.family)
        host = fam.host
        if config.graph is not None and load_graph(config.graph) != host:
            raise HostGraphError(f"{config.graph} is not the host of {config.family}")
        if config.pattern is not None and PatternSpec.parse(config.pattern) != fam.pattern:
            raise PatternError(f"{config.family} holds {fam.pattern}, not {config.pattern}")

        step = container_step(host, fam, config.eps, config.alpha, config.k, tau=config.tau)
        payload = step.to_dict()
        status = "ok"
        if not config.verify:
            payload["verification"] = {"skipped": "disabled"}
        elif host.m > config.container_max_edges:
            logger.warning("host has %d edges, above the verification guard %d", host.m, config.container_max_edges)
            payload["verification"] = {"skipped": f"{host.m} edges exceed guard {config.container_max_edges}"}
        else:
            report = verify_containers(step, host, fam.pattern, guard=config.container_max_edges)
            payload["verification"] = report.to_dict()
            status = "ok" if report.passed else "fail"
        return ToolResult(status, emit_json(config, payload))
