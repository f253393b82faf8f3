import csv
import io
import json
from datetime import datetime, timezone

import pytest

from policylint.ingest import from_text
from policylint.report import (
    CSV_COLUMNS,
    CorpusRow,
    CorpusSummary,
    Finding,
    Fixed,
    canonical_json,
    verdict_for,
)
from policylint.ruleset import analyze
from policylint.textmetrics import TextStats

from conftest import FIXTURES

GDPR = ("GDPR1", "GDPR2", "GDPR3", "GDPR4", "GDPR5", "GDPR6")


def findings(**statuses):
    return [Finding(rid, statuses.get(rid, "satisfied")) for rid in GDPR]


def test_verdict_rules():
    assert verdict_for(findings()) == "compliant"
    assert verdict_for(findings(GDPR4="not_satisfied")) == "not_compliant"
    assert verdict_for(findings(GDPR2="indeterminate")) == "indeterminate"
    assert verdict_for(findings(GDPR2="indeterminate", GDPR6="not_satisfied")) == "not_compliant"
    assert verdict_for(findings() + [Finding("UG-A", "not_satisfied")]) == "compliant"


def test_bad_status_is_rejected():
    with pytest.raises(ValueError):
        Finding("GDPR1", "maybe")


def test_canonical_json_fixes_decimals():
    assert canonical_json({"a": Fixed(11.339, 2), "b": [1, "x"], "c": {}}) == (
        '{\n  "a": 11.34,\n  "b": [\n    1,\n    "x"\n  ],\n  "c": {}\n}\n'
    )


def test_report_json_shape():
    body = (FIXTURES / "labeled" / "doc01.txt").read_text(encoding="utf-8")
    report = analyze(from_text(body, "doc01.txt"))
    data = json.loads(report.to_json())
    assert list(data) == ["tool_version", "source_id", "verdict", "stats", "usability", "findings"]
    assert data["verdict"] == "compliant"
    assert [f["rule_id"] for f in data["findings"]][:6] == list(GDPR)
    gfi_text = report.to_json().split('"gfi": ')[1].split("\n")[0]
    assert gfi_text == f"{report.stats.gfi:.2f}"


def test_envelope_holds_the_timestamp():
    report = analyze(from_text("We keep your name for a year. Email a@b.example with questions."))
    stamp = datetime(2020, 1, 2, 3, 4, 5, tzinfo=timezone.utc)
    wrapped = json.loads(report.to_json(envelope=True, now=stamp))
    assert wrapped["generated_at"] == "2020-01-02T03:04:05+00:00"
    assert wrapped["report"] == json.loads(report.to_json())
    assert "generated_at" not in report.to_json()


def test_text_rendering_mentions_every_rule():
    report = analyze(from_text("We keep your name for a year. Email a@b.example with questions."))
    text = report.to_text()
    for f in report.findings:
        assert f.rule_id in text
    assert "GFI" in text


@pytest.mark.parametrize("words, complex_words, percent", [(445, 91, "20.45"), (5260, 994, "18.90"), (1, 0, "0.00")])
def test_csv_complex_percent(words, complex_words, percent):
    row = CorpusRow.from_stats("site", TextStats.from_counts(words, 10, complex_words))
    values = dict(zip(CSV_COLUMNS, row.csv_values()))
    assert values["complex_percent"] == percent
    assert float(values["complex_percent"]) == pytest.approx(100 * complex_words / words, abs=0.005)


def test_failed_rows_are_indeterminate():
    summary = CorpusSummary((CorpusRow.failed("gone.txt", "no such file"),))
    rows = list(csv.DictReader(io.StringIO(summary.to_csv())))
    assert rows[0]["words"] == "" and rows[0]["gdpr4"] == "indeterminate"
    assert rows[0]["verdict"] == "indeterminate"
    assert json.loads(summary.to_json())["rows"][0]["error"] == "no such file"


def test_corpus_aggregate():
    rows = tuple(
        CorpusRow.from_stats(name, TextStats.from_counts(w, s, c))
        for name, w, s, c in [("bbc", 5187, 312, 608), ("ebay", 5260, 202, 994)]
    )
    agg = json.loads(CorpusSummary(rows).to_json())["aggregate"]
    assert agg["documents"] == 2 and agg["scored"] == 2
    assert agg["gfi_min"] == 11.34 and agg["gfi_max"] == 17.97
    assert agg["gfi_mean"] == pytest.approx((rows[0].stats.gfi + rows[1].stats.gfi) / 2, abs=0.005)


def test_csv_header():
    assert CorpusSummary(()).to_csv() == ",".join(CSV_COLUMNS) + "\n"
    assert CSV_COLUMNS == (
        "source_id", "words", "complex", "complex_percent", "gfi",
        "gdpr1", "gdpr2", "gdpr3", "gdpr4", "gdpr5", "gdpr6", "verdict",
    )
