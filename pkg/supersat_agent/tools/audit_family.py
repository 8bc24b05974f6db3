from typing import ClassVar, Literal, Optional

from pydantic import Field

from shared.config import RunConfig

from .utils.balanced import audit_family
from .utils.documents import load_family
from .utils.reporting import SupersatTool, ToolResult, emit_csv, emit_json

AUDIT_COLUMNS = ["check", "status", "detail"]


class AuditFamily(SupersatTool):
    """
    Re-checks a family JSON document from scratch.

    Reports the overall verdict, the smallest constant C for which the family is
    alpha-good, and one row per invariant: goodness, ledger recount, handshake,
    monotonicity, link or X_i bounds, the forest derivation and condition (ii).
    Any failing row makes the run fail.
    """

    subcommand: ClassVar[str] = "audit"

    family: str = Field(..., description="Path to a family JSON document written by BuildFamily")
    alpha: Optional[float] = Field(default=None, gt=0, description="Exponent gain alpha; 1/(e(H)-1) when omitted")
    c_bound: Optional[float] = Field(default=None, gt=0, description="Fail condition (ii) when the smallest C exceeds this")
    fmt: Literal["json", "csv"] = Field(default="csv", description="Output format")

    def perform(self, config: RunConfig) -> ToolResult:
        fam, params, _ = load_family(config.family)
        report = audit_family(fam, params, config.alpha, config.c_bound)
        verdict = "pass" if report.passed else "fail"
        smallest_c = report.condition.smallest_c if report.condition is not None else None
        status = "ok" if report.passed else "fail"

        if config.fmt == "json":
            return ToolResult(status, emit_json(config, {
                "passed": report.passed,
                "smallest_c": smallest_c,
                "checks": [{"name": row.name, "status": row.status, "detail": row.detail} for row in report.rows],
            }))
        rows = [["verdict", verdict, f"family of {len(fam)} copies"]]
        rows.append(["smallest_c", "info", "" if smallest_c is None else f"{smallest_c:.12g}"])
        rows.extend([row.name, row.status, row.detail] for row in report.rows)
        return ToolResult(status, emit_csv(config, AUDIT_COLUMNS, rows))
