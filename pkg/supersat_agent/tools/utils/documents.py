"""JSON documents for graphs and families, modelled with pydantic."""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from .balanced import BalancedFamily
from .errors import HostGraphError, PatternError
from .hypergraph import HostGraph, ScaleParams
from .patterns import PatternCopy, PatternSpec, RPartiteCopy, theta_copy_from_paths

logger = logging.getLogger(__name__)


class GraphDocument(BaseModel):
    """``{"n": int, "r": int, "edges": [[v, ...], ...]}`` with 0-based vertices."""

    n: int = Field(..., ge=0, description="Number of vertices")
    r: int = Field(default=2, ge=2, description="Uniformity (2 for graphs)")
    edges: list[list[int]] = Field(default_factory=list, description="Edges as vertex lists")

    def to_host(self) -> HostGraph:
        unique = sorted({tuple(sorted(edge)) for edge in self.edges})
        if len(unique) != len(self.edges):
            logger.warning("graph document lists %d duplicate edges; keeping one of each", len(self.edges) - len(unique))
        return HostGraph(self.n, self.r, unique)

    @classmethod
    def from_host(cls, g: HostGraph) -> "GraphDocument":
        return cls(n=g.n, r=g.r, edges=[list(edge) for edge in g.edges])


class ThetaCopyDocument(BaseModel):
    x: int
    y: int
    paths: list[list[int]]


class RPartiteCopyDocument(BaseModel):
    parts: list[list[int]]


class FamilyDocument(BaseModel):
    """A built family: its host, parameters, members and a ledger summary."""

    config: dict[str, Any] = Field(default_factory=dict)
    pattern: str
    graph: GraphDocument
    params: dict[str, Any]
    stop_reason: str
    target: int
    size: int
    members: list[Union[ThetaCopyDocument, RPartiteCopyDocument]]
    ledger_summary: dict[str, Any] = Field(default_factory=dict)


def _read_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise HostGraphError(f"cannot read {path}: {exc}") from exc


def load_graph(path: Union[str, Path]) -> HostGraph:
    try:
        document = GraphDocument.model_validate(_read_json(path))
    except ValidationError as exc:
        raise HostGraphError(f"{path} is not a graph document: {exc}") from exc
    return document.to_host()


def dump_graph(g: HostGraph) -> str:
    return GraphDocument.from_host(g).model_dump_json()


def member_document(copy: PatternCopy) -> Union[ThetaCopyDocument, RPartiteCopyDocument]:
    if isinstance(copy, RPartiteCopy):
        return RPartiteCopyDocument(parts=[list(part) for part in copy.parts])
    return ThetaCopyDocument(x=copy.x, y=copy.y, paths=[list(path) for path in copy.paths])


def ledger_summary(fam: BalancedFamily) -> dict[str, Any]:
    by_size: dict[int, int] = {}
    for query, degree in fam.ledger.items():
        size = len(query) if isinstance(query, frozenset) else sum(len(part) for part in query)
        by_size[size] = max(by_size.get(size, 0), degree)
    return {
        "entries": len(fam.ledger),
        "max_degree_by_size": {str(size): by_size[size] for size in sorted(by_size)},
    }


def family_document(
    fam: BalancedFamily,
    params: ScaleParams,
    stop_reason: str,
    target: int,
    config: Optional[dict] = None,
) -> FamilyDocument:
    return FamilyDocument(
        config=config or {},
        pattern=fam.pattern.label,
        graph=GraphDocument.from_host(fam.host),
        params=params.to_dict(),
        stop_reason=stop_reason,
        target=target,
        size=len(fam),
        members=[member_document(member) for member in fam.members],
        ledger_summary=ledger_summary(fam),
    )


def load_family(path: Union[str, Path]) -> tuple[BalancedFamily, ScaleParams, FamilyDocument]:
    """Rebuild a family and its parameters from a family document."""
    try:
        document = FamilyDocument.model_validate(_read_json(path))
    except ValidationError as exc:
        raise PatternError(f"{path} is not a family document: {exc}") from exc
    host = document.graph.to_host()
    pattern = PatternSpec.parse(document.pattern)

    family = BalancedFamily(host, pattern)
    for member in document.members:
        if pattern.kind == "theta":
            if not isinstance(member, ThetaCopyDocument):
                raise PatternError("theta family lists a non-theta member")
            family.add(theta_copy_from_paths(host, member.paths, pattern))
        else:
            if not isinstance(member, RPartiteCopyDocument):
                raise PatternError("complete family lists a non-tuple member")
            copy = RPartiteCopy(tuple(tuple(sorted(part)) for part in member.parts))
            pattern.check_copy(copy)
            for transversal in copy.transversals():
                host.edge_id(transversal)
            family.add(copy)

    params = document.params
    k = params["k"] if params.get("k_override") else None
    if pattern.kind == "theta":
        scale = ScaleParams.for_theta(pattern.a, pattern.b, host.n, host.m, k=k, delta=params["delta"])
    else:
        scale = ScaleParams.for_complete(pattern.shape, host.n, host.m, k=k, delta=params["delta"])
    return family, scale, document
