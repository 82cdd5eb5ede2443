from __future__ import annotations

from typing import TYPE_CHECKING, Any, Literal, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ReportFormatError

if TYPE_CHECKING:
    from .checkers import Verdict

SCHEMA_VERSION = 1


class Certificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    recheck: str
    holds: bool
    payload: dict[str, Any] = Field(default_factory=dict)


class VerdictReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: Literal["classify"] = "classify"
    graph: str
    field: str
    seed: int
    classification: Literal["Acyclic", "Cyclic"]
    cycle: list[str] | None = None
    regular: bool
    p_injective: bool
    locally_matricial: bool
    dimension: int | None = None
    evidence: list[Certificate]


class OperationReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str
    graph: str
    field: str
    seed: int
    result: dict[str, Any] = Field(default_factory=dict)
    evidence: list[Certificate] = Field(default_factory=list)


Report = Union[VerdictReport, OperationReport]


def verdict_report(verdict: "Verdict", *, graph_text: str, seed: int) -> VerdictReport:
    return VerdictReport(
        graph=graph_text,
        field=verdict.field.spec,
        seed=seed,
        classification=verdict.classification,
        cycle=list(verdict.cycle) if verdict.cycle is not None else None,
        regular=verdict.regular,
        p_injective=verdict.p_injective,
        locally_matricial=verdict.locally_matricial,
        dimension=verdict.dimension,
        evidence=list(verdict.evidence),
    )


def render_json(report: BaseModel) -> str:
    data = report.model_dump(mode="json")
    return orjson.dumps(data, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode() + "\n"


def load_report(text: str | bytes) -> Report:
    try:
        data = orjson.loads(text)
    except orjson.JSONDecodeError as exc:
        raise ReportFormatError(f"report is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ReportFormatError("report must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ReportFormatError(f"unsupported schema_version {version!r}")
    try:
        if data.get("command") == "classify":
            return VerdictReport.model_validate(data)
        return OperationReport.model_validate(data)
    except ValidationError as exc:
        raise ReportFormatError(f"malformed report: {exc.error_count()} problem(s)") from exc
