import orjson
import pytest

from leavitt_lab.checkers import classify
from leavitt_lab.errors import ReportFormatError
from leavitt_lab.graph import line_graph, loop_graph, serialize_graph
from leavitt_lab.report import (
    SCHEMA_VERSION,
    Certificate,
    OperationReport,
    VerdictReport,
    load_report,
    render_json,
    verdict_report,
)


def make_report(graph, seed=0, samples=2):
    verdict = classify(graph, seed=seed, samples=samples)
    return verdict_report(verdict, graph_text=serialize_graph(graph), seed=seed)


def test_verdict_report_fields():
    report = make_report(loop_graph())

    assert report.schema_version == SCHEMA_VERSION
    assert report.classification == "Cyclic"
    assert report.cycle == ["c"]
    assert report.dimension is None
    assert not report.regular


def test_rendering_is_byte_identical():
    first = render_json(make_report(line_graph(3), seed=4))
    second = render_json(make_report(line_graph(3), seed=4))

    assert first == second
    assert first.endswith("\n")
    assert list(orjson.loads(first)) == sorted(orjson.loads(first))


def test_load_report_round_trip():
    report = make_report(line_graph(2))

    loaded = load_report(render_json(report))
    assert isinstance(loaded, VerdictReport)
    assert loaded == report


def test_load_operation_report():
    report = OperationReport(
        command="witness",
        graph="vertex v\n",
        field="q",
        seed=0,
        result={"r": "v"},
        evidence=[Certificate(kind="regularity", recheck="witness", holds=True, payload={"a": "v", "r": "v"})],
    )

    assert load_report(render_json(report)) == report


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"schema_version": 99, "command": "classify"}',
        '{"schema_version": 1, "command": "classify", "graph": "vertex v\\n"}',
    ],
)
def test_load_report_rejects_bad_input(text):
    with pytest.raises(ReportFormatError) as info:
        load_report(text)

    assert info.value.exit_code == 2
