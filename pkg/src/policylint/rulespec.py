"""Detector rules as data: parsing, merging and dumping the rules file.

Grammar (one rule per block, ``#`` starts a comment line)::

    [GDPR4]
    threshold window 1
    pattern retention_verb \\b(?:keep|kept|retain)\\b
    pattern duration \\b\\d+\\s*days?\\b

Repeating ``pattern`` for the same concept adds an alternative. Patterns
are compiled case-insensitively; use ``(?-i:...)`` for case-sensitive parts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator

RULE_IDS = (
    "GDPR1", "GDPR2", "GDPR3", "GDPR4", "GDPR5", "GDPR6",
    "UG-A", "UG-B", "UG-C", "UG-D", "UG-E", "UG-F",
)

REQUIRED_CONCEPTS: dict[str, tuple[str, ...]] = {
    "GDPR1": ("collection_verb", "personal_data", "data_enumeration"),
    "GDPR2": ("data_use", "purpose"),
    "GDPR3": ("basis_consent", "special_basis", "profiling", "sensitive_data", "collection_verb"),
    "GDPR4": ("retention_verb", "duration"),
    "GDPR5": ("contact_phrase", "email_channel", "postal_channel", "phone_number", "dpo", "timescale"),
    "GDPR6": (),
    "UG-A": (),
    "UG-B": ("pronoun",),
    "UG-C": (),
    "UG-D": ("seal", "security", "enforcement", "phone_number"),
    "UG-E": ("more_info",),
    "UG-F": ("acronym",),
}

REQUIRED_THRESHOLDS: dict[str, tuple[str, ...]] = {
    "GDPR1": ("window",),
    "GDPR2": ("window",),
    "GDPR3": ("window",),
    "GDPR4": ("window",),
    "GDPR5": ("window",),
    "GDPR6": ("gfi_max",),
    "UG-A": ("min_images",),
    "UG-B": ("words_per_pronoun",),
    "UG-C": ("min_markers",),
    "UG-D": (),
    "UG-E": ("section_words_max", "min_more_info_links"),
    "UG-F": ("mean_sentence_words_max", "sentence_words_max", "acronyms_max"),
}

HEADER = (
    "# policylint rules\n"
    '# [RULE-ID] starts a block; "threshold NAME NUMBER"; "pattern CONCEPT REGEX".\n'
    "# Patterns are case-insensitive; repeated concepts add alternatives.\n"
)

_NAME_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")


class RulesError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<rules>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class RuleSpec:
    rule_id: str
    patterns: dict[str, tuple[str, ...]] = field(default_factory=dict)
    thresholds: dict[str, float] = field(default_factory=dict)

    @cached_property
    def _compiled(self) -> dict[str, tuple[re.Pattern, ...]]:
        return {
            concept: tuple(re.compile(p, re.IGNORECASE) for p in sources)
            for concept, sources in self.patterns.items()
        }

    def compiled(self, concept: str) -> tuple[re.Pattern, ...]:
        return self._compiled.get(concept, ())

    def finditer(self, concept: str, text: str) -> Iterator[tuple[int, int]]:
        """Yield ``(start, end)`` for every non-empty match of ``concept``, in text order."""
        hits = set()
        for pattern in self.compiled(concept):
            for m in pattern.finditer(text):
                if m.end() > m.start():
                    hits.add((m.start(), m.end()))
        yield from sorted(hits)

    def matches_at(self, concept: str, text: str, start: int, end: int) -> bool:
        """True when some pattern of ``concept`` matches exactly ``text[start:end]`` in place."""
        return (start, end) in set(self.finditer(concept, text))

    def threshold(self, name: str) -> float:
        return self.thresholds[name]

    def concepts(self, prefix: str = "") -> list[str]:
        return [c for c in self.patterns if c.startswith(prefix)]


class Rules:
    """An ordered, validated set of :class:`RuleSpec` blocks keyed by rule id."""

    def __init__(self, specs: dict[str, RuleSpec]):
        self._specs = {rid: specs[rid] for rid in RULE_IDS if rid in specs}
        self.validate()

    def __getitem__(self, rule_id: str) -> RuleSpec:
        return self._specs[rule_id]

    def __iter__(self):
        return iter(self._specs.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Rules) and self.dump() == other.dump()

    def validate(self) -> None:
        for rid in RULE_IDS:
            if rid not in self._specs:
                raise RulesError(f"missing rule block [{rid}]")
            spec = self._specs[rid]
            for concept in REQUIRED_CONCEPTS[rid]:
                if not spec.patterns.get(concept):
                    raise RulesError(f"[{rid}] needs at least one pattern for {concept!r}")
            for name in REQUIRED_THRESHOLDS[rid]:
                if name not in spec.thresholds:
                    raise RulesError(f"[{rid}] needs threshold {name!r}")

    @classmethod
    def default(cls) -> "Rules":
        return _default_rules()

    @classmethod
    def load(cls, path: str | Path, base: "Rules | None" = None) -> "Rules":
        """Load a rules file as overrides on top of ``base`` (the defaults if omitted)."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise RulesError(f"cannot read rules file: {exc}", source=str(path)) from exc
        return (base or cls.default()).merge(parse_rules(text, source=str(path)))

    def merge(self, overrides: dict[str, RuleSpec]) -> "Rules":
        """Overriding a concept replaces its pattern list; thresholds override one by one."""
        merged = {}
        for rid, spec in self._specs.items():
            extra = overrides.get(rid)
            if extra is None:
                merged[rid] = spec
                continue
            merged[rid] = RuleSpec(
                rid,
                {**spec.patterns, **extra.patterns},
                {**spec.thresholds, **extra.thresholds},
            )
        return Rules(merged)

    def dump(self) -> str:
        blocks = []
        for spec in self._specs.values():
            lines = [f"[{spec.rule_id}]"]
            lines += [f"threshold {name} {_fmt(value)}" for name, value in spec.thresholds.items()]
            for concept, sources in spec.patterns.items():
                lines += [f"pattern {concept} {src}" for src in sources]
            blocks.append("\n".join(lines) + "\n")
        return HEADER + "\n" + "\n".join(blocks)


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


@lru_cache(maxsize=1)
def _default_rules() -> Rules:
    return Rules(parse_rules(default_rules_text(), source="<default rules>"))


def default_rules_text() -> str:
    return resources.files("policylint").joinpath("default_rules.txt").read_text(encoding="utf-8")


def parse_rules(text: str, source: str = "<rules>") -> dict[str, RuleSpec]:
    """Parse rules-file text into partial specs (no completeness check)."""
    specs: dict[str, tuple[dict, dict]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise RulesError("unterminated rule header", lineno, source)
            current = stripped[1:-1].strip()
            if current not in RULE_IDS:
                raise RulesError(f"unknown rule id {current!r}", lineno, source)
            if current in specs:
                raise RulesError(f"duplicate rule block [{current}]", lineno, source)
            specs[current] = ({}, {})
            continue
        if current is None:
            raise RulesError("directive outside a [RULE] block", lineno, source)
        parts = stripped.split(None, 2)
        if len(parts) < 3:
            raise RulesError(f"expected 'threshold NAME VALUE' or 'pattern CONCEPT REGEX', got {stripped!r}", lineno, source)
        kind, name, value = parts
        if not _NAME_RE.match(name):
            raise RulesError(f"bad name {name!r}", lineno, source)
        patterns, thresholds = specs[current]
        if kind == "threshold":
            try:
                thresholds[name] = float(value)
            except ValueError:
                raise RulesError(f"threshold {name} is not a number: {value!r}", lineno, source) from None
        elif kind == "pattern":
            try:
                re.compile(value, re.IGNORECASE)
            except re.error as exc:
                raise RulesError(f"bad regex for {name}: {exc}", lineno, source) from None
            patterns[name] = patterns.get(name, ()) + (value,)
        else:
            raise RulesError(f"unknown directive {kind!r}", lineno, source)
    return {rid: RuleSpec(rid, p, t) for rid, (p, t) in specs.items()}
