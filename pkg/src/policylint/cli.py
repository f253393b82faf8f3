"""Command-line interface: ``policylint analyze|corpus|template|rules``.

Exit codes: 0 when the analyzed policy is compliant (or the command
succeeded), 1 when it is not compliant or indeterminate, 2 on any error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from ._kv import KVError, parse_bool, read_kv
from .document import Document
from .ingest import (
    CACHE_ENV,
    FetchSettings,
    IngestError,
    SourceSpec,
    concatenate,
    discover_policy_link,
    load,
    read_source,
)
from .report import CorpusRow, CorpusSummary
from .rulespec import Rules, RulesError
from .ruleset import AnalysisSettings, analyze
from .templategen import ValidationFailed, generate, load_config
from .textmetrics import ExclusionPolicy

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


class UsageError(Exception):
    pass


@dataclasses.dataclass
class ToolConfig:
    """Settings shared by every subcommand; flags override the config file."""

    rules: Rules
    exclusions: ExclusionPolicy
    fetch: FetchSettings
    jobs: int = 1


_CONFIG_KEYS = {
    "rules", "exclusions", "exclude_proper_nouns", "exclude_compounds", "exclude_suffixes",
    "fetch_timeout", "user_agent", "cache_dir", "min_words", "no_network", "max_bytes", "jobs",
}


def _read_tool_config(path: str | None) -> dict[str, tuple[str, int]]:
    if not path:
        return {}
    values = {}
    for key, value, line in read_kv(path):
        if key not in _CONFIG_KEYS:
            raise KVError(f"unknown setting {key!r}", line, path)
        values[key] = (value, line)
    return values


def build_tool_config(args: argparse.Namespace) -> ToolConfig:
    conf = _read_tool_config(getattr(args, "config", None))
    src = getattr(args, "config", None) or "<config>"

    def get(key: str, flag_value=None, cast=str):
        if flag_value is not None:
            return flag_value
        if key in conf:
            value, line = conf[key]
            try:
                return cast(value)
            except ValueError as exc:
                raise KVError(f"bad value for {key}: {value!r}", line, src) from exc
        return None

    rules_path = get("rules", getattr(args, "rules", None))
    rules = Rules.load(rules_path) if rules_path else Rules.default()

    policy = ExclusionPolicy()
    for name in ("proper_nouns", "compounds", "suffixes"):
        if f"exclude_{name}" in conf:
            value, line = conf[f"exclude_{name}"]
            policy = dataclasses.replace(policy, **{name: parse_bool(value, line, src)})
    toggles = get("exclusions", getattr(args, "exclusions", None))
    if toggles:
        policy = ExclusionPolicy.parse(toggles, policy)

    no_network = bool(getattr(args, "no_network", False)) or (
        "no_network" in conf and parse_bool(conf["no_network"][0], conf["no_network"][1], src)
    )
    defaults = FetchSettings()
    fetch = FetchSettings(
        timeout=get("fetch_timeout", getattr(args, "fetch_timeout", None), float) or defaults.timeout,
        max_bytes=get("max_bytes", None, int) or defaults.max_bytes,
        user_agent=get("user_agent", getattr(args, "user_agent", None)) or defaults.user_agent,
        allow_network=not no_network,
        cache_dir=get("cache_dir", getattr(args, "cache_dir", None)) or os.environ.get(CACHE_ENV),
        min_words=get("min_words", getattr(args, "min_words", None), int) or defaults.min_words,
    )
    jobs = get("jobs", getattr(args, "jobs", None), int) or 1
    return ToolConfig(rules, policy, fetch, max(1, jobs))


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(locator: str, tool: ToolConfig, format_hint: str = "auto", discover: bool = False) -> Document:
    spec = SourceSpec.from_locator(locator, format_hint)
    if discover:
        landing = read_source(spec, tool.fetch)
        base = locator if spec.kind == "url" else None
        anchor = discover_policy_link(landing, base)
        if anchor is None:
            raise UsageError(f"{spec.source_id}: no privacy-policy link found on the landing page")
        target = anchor.href
        if spec.kind == "file":
            target = str(Path(locator).parent / target) if "://" not in target else target
        elif spec.kind == "stdin" and "://" not in target:
            raise UsageError("a relative policy link cannot be followed from stdin")
        spec = SourceSpec.from_locator(target, format_hint)
    return load(spec, tool.fetch)


def cmd_analyze(args: argparse.Namespace) -> int:
    tool = build_tool_config(args)
    if len(args.sources) > 1 and not args.concat:
        raise UsageError("several sources given; pass --concat to analyze them as one policy, or use 'corpus'")
    docs = [_load(s, tool, args.input_format, args.discover) for s in args.sources]
    doc = concatenate(docs) if len(docs) > 1 else docs[0]
    report = analyze(doc, tool.rules, AnalysisSettings(tool.exclusions))
    fmt = args.format or ("json" if args.out or not sys.stdout.isatty() else "text")
    if fmt == "json":
        text = report.to_json(envelope=args.envelope)
    elif fmt == "text":
        text = report.to_text()
    else:
        raise UsageError(f"analyze does not support --format {fmt}")
    _write(text, args.out)
    return EXIT_OK if report.verdict == "compliant" else EXIT_FAIL


def read_manifest(path: str) -> list[tuple[str, str]]:
    """``(source_id, locator)`` pairs; relative paths resolve against the manifest's directory."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    base = Path(path).parent
    entries = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "://" in line or line == "-" or Path(line).is_absolute():
            entries.append((line, line))
        else:
            entries.append((line, str(base / line)))
    return entries


def _corpus_row(entry: tuple[str, str], tool: ToolConfig, format_hint: str) -> CorpusRow:
    source_id, locator = entry
    try:
        doc = load(SourceSpec.from_locator(locator, format_hint), tool.fetch)
    except IngestError as exc:
        return CorpusRow.failed(source_id, str(exc))
    doc = dataclasses.replace(doc, source_id=source_id)
    return CorpusRow.from_report(analyze(doc, tool.rules, AnalysisSettings(tool.exclusions)))


def run_corpus(manifest: str, tool: ToolConfig, format_hint: str = "auto") -> CorpusSummary:
    entries = read_manifest(manifest)
    if not entries:
        raise UsageError(f"manifest {manifest} lists no sources")
    with ThreadPoolExecutor(max_workers=tool.jobs) as pool:
        rows = list(pool.map(lambda e: _corpus_row(e, tool, format_hint), entries))
    return CorpusSummary(tuple(rows))


def cmd_corpus(args: argparse.Namespace) -> int:
    tool = build_tool_config(args)
    summary = run_corpus(args.manifest, tool, args.input_format)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write(summary.to_csv(), str(out_dir / "summary.csv"))
        _write(summary.to_json(envelope=args.envelope), str(out_dir / "summary.json"))
    fmt = args.format or "csv"
    rendered = {"csv": summary.to_csv, "json": lambda: summary.to_json(envelope=args.envelope), "text": summary.to_text}
    if fmt not in rendered:
        raise UsageError(f"corpus does not support --format {fmt}")
    if args.out or not args.out_dir:
        _write(rendered[fmt](), args.out)
    return EXIT_OK


def cmd_template(args: argparse.Namespace) -> int:
    tool = build_tool_config(args)
    config = load_config(args.config_file)
    policy = generate(config, theme=args.theme, rules=tool.rules, background=args.background)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        md_path, html_path = out_dir / f"{args.name}.md", out_dir / f"{args.name}.html"
        _write(policy.markdown, str(md_path))
        _write(policy.html, str(html_path))
        written = [md_path, html_path]
    else:
        _write(policy.html if args.format == "html" else policy.markdown, args.out)
        written = [Path(args.out)] if args.out else []
    if args.check:
        problems = []
        for path in written:
            report = analyze(load(SourceSpec("file", str(path)), tool.fetch), tool.rules, AnalysisSettings(tool.exclusions))
            if report.verdict != "compliant":
                problems.append(f"{path}: verdict {report.verdict}")
        if not written and policy.report.verdict != "compliant":
            problems.append(f"generated policy: verdict {policy.report.verdict}")
        if problems:
            for p in problems:
                print(f"policylint: check failed: {p}", file=sys.stderr)
            return EXIT_FAIL
        print("policylint: check passed: generated policy is compliant", file=sys.stderr)
    return EXIT_OK


def cmd_rules(args: argparse.Namespace) -> int:
    tool = build_tool_config(args)
    _write(tool.rules.dump(), args.out)
    return EXIT_OK


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rules", help="rules file whose blocks override the built-in rules")
    parser.add_argument("--config", help="tool settings file (key = value)")
    parser.add_argument("--format", choices=("json", "text", "csv", "markdown", "html"), help="output format")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--exclusions", help="complex-word exclusion toggles, e.g. 'proper_nouns=off,-suffixes'")
    parser.add_argument("--no-network", action="store_true", default=None, help="never fetch URLs (the cache is still used)")
    parser.add_argument("--fetch-timeout", type=float, help="seconds before a fetch is abandoned")
    parser.add_argument("--user-agent", help="User-Agent header for fetches")
    parser.add_argument("--cache-dir", help=f"fetch cache directory (default ${CACHE_ENV})")
    parser.add_argument("--min-words", type=int, help="fewer extracted words than this is an extraction failure")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="policylint", description="Lint and generate privacy policies.")
    parser.add_argument("--version", action="version", version=f"policylint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="score one policy")
    p.add_argument("sources", nargs="+", help="file, URL or - for stdin")
    p.add_argument("--concat", action="store_true", help="treat several sources as pages of one policy")
    p.add_argument("--discover", action="store_true", help="source is a landing page; follow its privacy-policy link")
    p.add_argument("--input-format", choices=("auto", "text", "markdown", "html"), default="auto")
    p.add_argument("--envelope", action="store_true", help="wrap JSON in an envelope with a timestamp")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("corpus", help="score every source listed in a manifest")
    p.add_argument("manifest", help="one source per line; # starts a comment")
    p.add_argument("--out-dir", help="write summary.csv and summary.json here")
    p.add_argument("--jobs", type=int, help="documents analyzed in parallel")
    p.add_argument("--input-format", choices=("auto", "text", "markdown", "html"), default="auto")
    p.add_argument("--envelope", action="store_true", help="wrap JSON in an envelope with a timestamp")
    _common(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("template", help="generate a policy from a company profile")
    p.add_argument("config_file", help="company profile (key = value)")
    p.add_argument("--out-dir", help="write NAME.md and NAME.html here")
    p.add_argument("--name", default="privacy-policy", help="base name of the written files")
    p.add_argument("--theme", default="icons", help="directory the section icons resolve against")
    p.add_argument("--background", default="#eeeeee", help="section box background colour")
    p.add_argument("--check", action="store_true", help="re-analyze the written files and require compliance")
    _common(p)
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("rules", help="print the effective rules")
    _common(p)
    p.set_defaults(func=cmd_rules)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailed as exc:
        print(f"policylint: {exc}", file=sys.stderr)
    except (IngestError, RulesError, KVError, UsageError, ValueError) as exc:
        print(f"policylint: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
