from .audit_family import AuditFamily
from .build_containers import BuildContainers
from .build_family import BuildFamily
from .count_free_graphs import CountFreeGraphs
from .enumerate_copies import EnumerateCopies
from .oracle_free_count import OracleFreeCount
from .supersat_trend import SupersatTrend

TOOLS_BY_SUBCOMMAND = {
    tool.subcommand: tool
    for tool in (
        EnumerateCopies,
        BuildFamily,
        AuditFamily,
        BuildContainers,
        CountFreeGraphs,
        OracleFreeCount,
        SupersatTrend,
    )
}

__all__ = [
    "EnumerateCopies",
    "BuildFamily",
    "AuditFamily",
    "BuildContainers",
    "CountFreeGraphs",
    "OracleFreeCount",
    "SupersatTrend",
    "TOOLS_BY_SUBCOMMAND",
]
