"""Summarise a corpus two ways: recorded site statistics, and live fixture documents.

Run from the repository root:  python3 demos/corpus_summary.py
"""

import csv
from pathlib import Path

from policylint.cli import ToolConfig, run_corpus
from policylint.ingest import FetchSettings
from policylint.report import CorpusRow, CorpusSummary
from policylint.rulespec import Rules
from policylint.textmetrics import ExclusionPolicy, TextStats

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def recorded_sites() -> CorpusSummary:
    # only counts survive for these sites, so rows are built from the numbers
    with (FIXTURES / "site_stats.csv").open(encoding="utf-8", newline="") as fh:
        rows = [
            CorpusRow.from_stats(r["site"], TextStats.from_counts(int(r["words"]), int(r["sentences"]), int(r["complex"])))
            for r in csv.DictReader(fh)
        ]
    return CorpusSummary(tuple(sorted(rows, key=lambda r: r.stats.gfi)))


def main() -> None:
    print("recorded site statistics, easiest first:")
    print(recorded_sites().to_text())

    tool = ToolConfig(Rules.default(), ExclusionPolicy(), FetchSettings(allow_network=False), jobs=4)
    print("\nfixture corpus:")
    print(run_corpus(str(FIXTURES / "corpus.txt"), tool).to_text())


if __name__ == "__main__":
    main()
