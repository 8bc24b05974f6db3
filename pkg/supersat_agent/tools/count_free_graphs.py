from typing import ClassVar, Literal, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.hypergraph import complete_host
from .utils.patterns import PatternSpec
from .utils.pipeline import brute_force_free_count, power_bound, run_pipeline, verify_coverage
from .utils.reporting import SupersatTool, ToolResult, emit_csv, emit_json

LEVEL_COLUMNS = ["level", "k", "threshold", "containers", "replaced", "kept", "max_edges", "bound", "min_shrinkage"]


def _cell(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.12g}"


class CountFreeGraphs(SupersatTool):
    """
    Bounds the number of pattern-free r-graphs on n labelled vertices by iterated container steps.

    Starting from the complete r-graph, every container with at least k(i) m(n)
    edges is replaced by the containers of a freshly built balanced family, for
    the geometric schedule k(1) > k(2) > ... down to k0. Reports one row per level
    and the bounds sum 2^e(G) and the sparse-graph bound. With oracle, the bounds
    are compared with exact brute-force counts and coverage is checked.
    A level that cannot be completed stops the run and makes it fail.
    """

    subcommand: ClassVar[str] = "count"

    pattern: str = Field(..., description="Pattern as 'theta:a,b' or 'complete:a1,...,ar'")
    n: int = Field(..., ge=1, description="Number of vertices")
    eps: float = Field(..., gt=0, lt=1, description="Schedule ratio is 1 - eps")
    k0: float = Field(..., gt=0, description="Stop the schedule at the first k(t) <= k0")
    delta: Optional[float] = Field(default=None, gt=0, description="Slack constant for the per-level families (default 1)")
    family_k: Optional[float] = Field(default=None, gt=0, description="Density override for the per-level families")
    tau: Optional[float] = Field(default=None, gt=0, description="Explicit tau for every container step")
    alpha: Optional[float] = Field(default=None, gt=0, description="Exponent gain alpha used to derive tau")
    target: Optional[int] = Field(default=None, ge=0, description="Family size target for the per-level builds")
    oracle: bool = Field(default=False, description="Compare with exact counts and check coverage")
    fmt: Literal["json", "csv"] = Field(default="csv", description="Output format")
    free_count_max_edges: Optional[int] = Field(default=None, ge=1, description="Largest C(n, r) for the exact sweeps")

    def perform(self, config: RunConfig) -> ToolResult:
        pattern = PatternSpec.parse(config.pattern)
        result = run_pipeline(
            config.n, pattern, config.eps, config.k0,
            delta=1.0 if config.delta is None else config.delta,
            family_k=config.family_k, alpha=config.alpha, tau=config.tau, target=config.target,
        )
        tree = result.tree
        status = "fail" if tree.aborted is not None else "ok"
        summary = {
            "bound": result.bound,
            "sparse_bound": result.sparse_bound,
            "sparse_limit": result.sparse_limit,
            "aborted": str(tree.aborted) if tree.aborted is not None else None,
        }
        if config.oracle:
            guard = config.free_count_max_edges
            exact = brute_force_free_count(config.n, pattern, guard=guard)
            exact_sparse = brute_force_free_count(config.n, pattern, max_edges=result.sparse_limit, guard=guard)
            covered = verify_coverage(tree.final, config.n, pattern, guard=guard)
            summary.update(exact=exact, exact_sparse=exact_sparse, coverage=covered)
            if not (covered and result.bound >= exact and result.sparse_bound >= exact_sparse):
                status = "fail"

        root_edges = complete_host(config.n, pattern.uniformity).m
        rows = [[0, "", "", 1, 0, 0, root_edges, power_bound(tree.levels[0]), ""]]
        for stats in tree.stats:
            rows.append([
                stats.level, _cell(stats.k), _cell(stats.threshold), stats.size, stats.replaced,
                stats.kept, stats.max_edges, stats.bound, _cell(stats.min_shrinkage),
            ])

        if config.fmt == "json":
            levels = [dict(zip(LEVEL_COLUMNS, row)) for row in rows]
            payload = {"schedule": list(result.schedule.values), "levels": levels, **summary}
            return ToolResult(status, emit_json(config, payload))
        trailer = [f"{key}: {'' if value is None else value}" for key, value in summary.items()]
        return ToolResult(status, emit_csv(config, LEVEL_COLUMNS, rows, trailer))
