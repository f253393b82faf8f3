"""Requirement (GDPR1-GDPR6) and usability-guideline (UG-A..UG-F) detectors.

Every detector is a pure function of a Document and a :class:`Rules` set.
Pattern concepts come from the rules file, so the phrase lists are data,
not code. "Within one sentence" means the two matches sit in sentences
whose indices differ by at most the rule's ``window`` threshold.

GDPR1, GDPR2, GDPR4 and GDPR5 are existential, so appending text never turns
a satisfied finding into a failure. GDPR3 is not: appending a profiling or
special-category statement adds an obligation. GDPR6 and UG-F depend on
averages and are not monotone either.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable

from .document import Document
from .report import Evidence, Finding, Report
from .rulespec import RuleSpec, Rules
from .textmetrics import ExclusionPolicy, TextStats, TokenizedText, compute_stats, tokenize

MAX_EVIDENCE = 20

Span = tuple[int, int]


@dataclass(frozen=True)
class AnalysisSettings:
    exclusions: ExclusionPolicy = field(default_factory=ExclusionPolicy)
    syllable_overrides: dict[str, int] = field(default_factory=dict)


class _Sentences:
    """Maps character offsets to sentence indices."""

    def __init__(self, tokens: TokenizedText):
        self._starts = [s for s, _ in tokens.sentences]

    def index(self, offset: int) -> int:
        return max(0, bisect_right(self._starts, offset) - 1)


def _rules(rules: Rules | None) -> Rules:
    return rules if rules is not None else Rules.default()


def _tokens(doc: Document, tokens: TokenizedText | None) -> TokenizedText:
    return tokens if tokens is not None and tokens.text == doc.body else tokenize(doc.body)


def _evidence(doc: Document, spans: Iterable[Span], label: str) -> list[Evidence]:
    return [Evidence(s, e, label, doc.body[s:e]) for s, e in spans]


def _hits(spec: RuleSpec, concept: str, doc: Document) -> list[Span]:
    return list(spec.finditer(concept, doc.body))


def _near(
    sentences: _Sentences, first: list[Span], second: list[Span], window: int
) -> tuple[list[Span], list[Span]]:
    """The spans of ``first`` and ``second`` that have a partner within ``window`` sentences."""
    a_idx = [sentences.index(s) for s, _ in first]
    b_idx = [sentences.index(s) for s, _ in second]
    a_keep = [span for span, i in zip(first, a_idx) if any(abs(i - j) <= window for j in b_idx)]
    b_keep = [span for span, j in zip(second, b_idx) if any(abs(i - j) <= window for i in a_idx)]
    return a_keep, b_keep


def _window(spec: RuleSpec) -> int:
    return int(spec.threshold("window"))


def _empty(rule_id: str) -> Finding:
    return Finding(rule_id, "indeterminate", message="document body is empty", remediation="check that the policy text was extracted")


def _cap(evidence: list[Evidence]) -> tuple[Evidence, ...]:
    return tuple(sorted(evidence, key=lambda e: (e.start, e.end, e.label))[:MAX_EVIDENCE])


def _pair_finding(
    rule_id: str,
    doc: Document,
    spec: RuleSpec,
    tokens: TokenizedText,
    first: tuple[str, ...],
    second: tuple[str, ...],
    ok: str,
    missing: str,
    remediation: str,
) -> Finding:
    """Satisfied when some concept of ``first`` occurs near some concept of ``second``."""
    sentences = _Sentences(tokens)
    a = {c: _hits(spec, c, doc) for c in first}
    b = {c: _hits(spec, c, doc) for c in second}
    evidence: list[Evidence] = []
    for ca, spans_a in a.items():
        for cb, spans_b in b.items():
            keep_a, keep_b = _near(sentences, spans_a, spans_b, _window(spec))
            evidence += _evidence(doc, keep_a, ca) + _evidence(doc, keep_b, cb)
    evidence = list(dict.fromkeys(evidence))
    if evidence:
        return Finding(rule_id, "satisfied", _cap(evidence), ok)
    return Finding(rule_id, "not_satisfied", (), missing, remediation)


def detect_gdpr1(doc: Document, rules: Rules | None = None, tokens: TokenizedText | None = None) -> Finding:
    """Does the policy say which personal data is collected?"""
    if not doc.body.strip():
        return _empty("GDPR1")
    return _pair_finding(
        "GDPR1", doc, _rules(rules)["GDPR1"], _tokens(doc, tokens),
        ("collection_verb", "data_enumeration"), ("personal_data",),
        "states which personal data is collected",
        "no statement pairs a collection verb with a kind of personal data",
        "list the data you collect, e.g. \"We keep your name, home address and email.\"",
    )


def detect_gdpr2(doc: Document, rules: Rules | None = None, tokens: TokenizedText | None = None) -> Finding:
    """Does the policy justify why data is collected?"""
    if not doc.body.strip():
        return _empty("GDPR2")
    return _pair_finding(
        "GDPR2", doc, _rules(rules)["GDPR2"], _tokens(doc, tokens),
        ("data_use",), ("purpose",),
        "explains what the data is used for",
        "no purpose or justification is linked to the data use",
        "say why you need the data, e.g. \"We use your email to send you receipts.\"",
    )


def detect_gdpr3(doc: Document, rules: Rules | None = None, tokens: TokenizedText | None = None) -> Finding:
    """Does the policy give a lawful basis for processing, with the extra checks for profiling and sensitive data?"""
    if not doc.body.strip():
        return _empty("GDPR3")
    spec = _rules(rules)["GDPR3"]
    tokens = _tokens(doc, tokens)
    sentences = _Sentences(tokens)

    basis: list[Evidence] = []
    for concept in spec.concepts("basis_"):
        basis += _evidence(doc, _hits(spec, concept, doc), concept)
    opt_in = [m for m in doc.interactive_markers if m.kind == "opt_in"]
    opt_out = [m for m in doc.interactive_markers if m.kind == "opt_out"]
    basis += [Evidence(m.start, m.end, "opt_in_marker", doc.body[m.start:m.end]) for m in opt_in]

    if not basis:
        return Finding(
            "GDPR3", "not_satisfied", (), "no lawful basis for processing is stated",
            "state the basis, e.g. \"We only use your data with your consent.\" or add an opt-in control",
        )

    evidence = list(basis)
    problems = []

    profiling = _hits(spec, "profiling", doc)
    if profiling:
        evidence += _evidence(doc, profiling, "profiling")
        if opt_out:
            evidence += [Evidence(m.start, m.end, "opt_out_marker", doc.body[m.start:m.end]) for m in opt_out]
        else:
            problems.append("profiling is mentioned but there is no opt-out")

    sensitive, _ = _near(sentences, _hits(spec, "sensitive_data", doc), _hits(spec, "collection_verb", doc), _window(spec))
    special = _hits(spec, "special_basis", doc)
    if sensitive:
        evidence += _evidence(doc, sensitive, "sensitive_data")
        # a regular basis that is not just part of the special-category phrase
        regular = [
            e for e in basis
            if e.label != "opt_in_marker" and not any(s < e.end and e.start < t for s, t in special)
        ]
        if special and regular:
            evidence += _evidence(doc, special, "special_basis")
        else:
            problems.append("special-category data needs its own processing basis as well as a general one")

    details = {"profiling": bool(profiling), "sensitive_data": bool(sensitive)}
    if problems:
        return Finding(
            "GDPR3", "not_satisfied", _cap(evidence), "; ".join(problems),
            "add an opt-out for automated processing and a separate basis (e.g. explicit consent) for sensitive data",
            details,
        )
    return Finding("GDPR3", "satisfied", _cap(evidence), "states a lawful basis for processing", "", details)


def detect_gdpr4(doc: Document, rules: Rules | None = None, tokens: TokenizedText | None = None) -> Finding:
    """Does the policy say how long data is kept?"""
    if not doc.body.strip():
        return _empty("GDPR4")
    return _pair_finding(
        "GDPR4", doc, _rules(rules)["GDPR4"], _tokens(doc, tokens),
        ("retention_verb",), ("duration",),
        "states how long data is kept",
        "no retention period is given",
        "state a period, e.g. \"We delete your data after 12 months.\"",
    )


def detect_gdpr5(doc: Document, rules: Rules | None = None, tokens: TokenizedText | None = None) -> Finding:
    """Does the policy give a contact route for access and removal requests?"""
    if not doc.body.strip():
        return _empty("GDPR5")
    spec = _rules(rules)["GDPR5"]
    base = _pair_finding(
        "GDPR5", doc, spec, _tokens(doc, tokens),
        ("email_channel", "postal_channel"), ("contact_phrase",),
        "gives a contact for questions, access and removal",
        "no email or postal contact is offered for questions or removal requests",
        "add a contact, e.g. \"If you want your data removed, email privacy@example.com.\"",
    )
    details = {
        "has_email": bool(_hits(spec, "email_channel", doc)),
        "has_phone": bool(_hits(spec, "phone_number", doc)),
        "has_postal": bool(_hits(spec, "postal_channel", doc)),
        "mentions_dpo": bool(_hits(spec, "dpo", doc)),
        "mentions_timescale": bool(_hits(spec, "timescale", doc)),
    }
    return Finding(base.rule_id, base.status, base.evidence, base.message, base.remediation, details)


def _document_evidence(doc: Document, stats: TextStats) -> Evidence:
    summary = f"GFI {stats.gfi:.2f}; {stats.word_count} words; {stats.sentence_count} sentences; {stats.complex_word_count} complex"
    return Evidence(0, len(doc.body), "document", summary)


def detect_gdpr6(doc: Document, stats: TextStats, rules: Rules | None = None) -> Finding:
    """Is the policy readable without more than a high-school education?"""
    if not doc.body.strip() or stats.word_count == 0:
        return _empty("GDPR6")
    limit = _rules(rules)["GDPR6"].threshold("gfi_max")
    message = (
        f"GFI {stats.gfi:.2f} over {stats.word_count} words "
        f"({stats.complex_percent:.2f}% complex); limit {limit:g}"
    )
    details = {"stats": stats, "gfi_max": float(limit)}
    evidence = (_document_evidence(doc, stats),)
    if stats.gfi <= limit:
        return Finding("GDPR6", "satisfied", evidence, message, "", details)
    return Finding(
        "GDPR6", "not_satisfied", evidence, message,
        "use shorter sentences and fewer words of three or more syllables",
        details,
    )


# -- usability guidelines ------------------------------------------------------------


def _ug_a(doc: Document, spec: RuleSpec) -> Finding:
    if doc.format == "text":
        return Finding("UG-A", "indeterminate", (), "plain text carries no images", "")
    evidence = [Evidence(i.position, i.position, "image", i.alt) for i in doc.images]
    missing_alt = [i for i in doc.images if not i.alt.strip()]
    details = {"images": len(doc.images), "missing_alt": len(missing_alt)}
    if len(doc.images) >= spec.threshold("min_images") and not missing_alt:
        return Finding("UG-A", "satisfied", _cap(evidence), "sections are marked with images that have alt text", "", details)
    problem = "images lack alt text" if missing_alt else "no icons or images mark the sections"
    return Finding("UG-A", "not_satisfied", _cap(evidence), problem, "add a small icon with alt text to each section", details)


def _ug_b(doc: Document, spec: RuleSpec, stats: TextStats) -> Finding:
    pronouns = _hits(spec, "pronoun", doc)
    per = spec.threshold("words_per_pronoun")
    details = {"pronouns": len(pronouns), "words": stats.word_count}
    evidence = _evidence(doc, pronouns, "pronoun")
    if stats.word_count and len(pronouns) * per >= stats.word_count:
        return Finding("UG-B", "satisfied", _cap(evidence), f"{len(pronouns)} second-person pronouns in {stats.word_count} words", "", details)
    return Finding(
        "UG-B", "not_satisfied", _cap(evidence), f"{len(pronouns)} second-person pronouns in {stats.word_count} words",
        f"address the reader as \"you\" at least once every {per:g} words", details,
    )


def _ug_c(doc: Document, spec: RuleSpec) -> Finding:
    markers = doc.interactive_markers
    evidence = [Evidence(m.start, m.end, f"{m.kind}_marker", doc.body[m.start:m.end]) for m in markers]
    if len(markers) >= spec.threshold("min_markers"):
        return Finding("UG-C", "satisfied", _cap(evidence), f"{len(markers)} opt-in/opt-out control(s)", "")
    return Finding("UG-C", "not_satisfied", (), "no opt-in or opt-out control", "add a visible \"Opt out here\" or \"Opt in here\" control")


def _ug_d(doc: Document, spec: RuleSpec) -> Finding:
    seal = _evidence(doc, _hits(spec, "seal", doc), "seal")
    seal += [Evidence(i.position, i.position, "seal_image", i.alt) for i in doc.images if i.role == "seal"]
    security = _evidence(doc, _hits(spec, "security", doc), "security")
    phone = _evidence(doc, _hits(spec, "phone_number", doc), "phone_number")
    enforcement = _evidence(doc, _hits(spec, "enforcement", doc), "enforcement")
    missing = []
    if not (seal or security):
        missing.append("a privacy seal or security assurance")
    if not phone:
        missing.append("a telephone number")
    if not enforcement:
        missing.append("a statement of enforcement")
    details = {"seal": bool(seal), "security": bool(security), "phone": bool(phone), "enforcement": bool(enforcement)}
    evidence = _cap(seal + security + phone + enforcement)
    if not missing:
        return Finding("UG-D", "satisfied", evidence, "gives trust signals: assurance, phone and enforcement", "", details)
    return Finding("UG-D", "not_satisfied", evidence, "missing " + ", ".join(missing), "add " + ", ".join(missing), details)


def _ug_e(doc: Document, spec: RuleSpec) -> Finding:
    sections = [s for s in doc.sections if doc.section_text(s).strip()]
    if not sections:
        return Finding("UG-E", "not_satisfied", (), "the policy has no sections", "split the policy into short titled sections, each with a link to more information")
    limit = spec.threshold("section_words_max")
    need = spec.threshold("min_more_info_links")
    evidence, problems = [], []
    for sec in sections:
        words = len(tokenize(doc.section_text(sec)).words)
        links = [l for l in sec.links if any(True for _ in spec.finditer("more_info", l.text))]
        evidence += [Evidence(l.start, l.end, "more_info_link", l.text) for l in links]
        if words > limit:
            problems.append(f"section {sec.heading!r} has {words} words")
        if len(links) < need:
            problems.append(f"section {sec.heading!r} has no link to more information")
    details = {"sections": len(sections)}
    if problems:
        return Finding(
            "UG-E", "not_satisfied", _cap(evidence), "; ".join(problems),
            f"keep each section under {limit:g} words and end it with a \"Find out more\" link", details,
        )
    return Finding("UG-E", "satisfied", _cap(evidence), f"{len(sections)} short sections, each linking to more information", "", details)


def _inside_tokens(tokens: TokenizedText, kinds: tuple[str, ...]) -> list[Span]:
    return [(w.start, w.end) for w in tokens.words if w.kind in kinds]


def _ug_f(doc: Document, spec: RuleSpec, stats: TextStats, tokens: TokenizedText) -> Finding:
    lengths = [0] * len(tokens.sentences)
    for idx in tokens.word_sentence:
        lengths[idx] += 1
    mean = sum(lengths) / len(lengths) if lengths else 0.0
    longest = max(lengths, default=0)

    skip = _inside_tokens(tokens, ("url", "email"))
    acronyms = [
        (s, e) for s, e in spec.finditer("acronym", doc.body)
        if not any(a <= s and e <= b for a, b in skip)
    ]
    forms = {doc.body[s:e] for s, e in acronyms}
    expanded = {
        form for form in forms
        if re.search(rf"\b{re.escape(form)}\s*\(|\(\s*{re.escape(form)}\s*\)", doc.body)
    }
    unexpanded = [(s, e) for s, e in acronyms if doc.body[s:e] not in expanded]

    details = {
        "mean_sentence_words": float(mean),
        "max_sentence_words": longest,
        "unexpanded_acronyms": len(unexpanded),
    }
    problems = []
    if mean > spec.threshold("mean_sentence_words_max"):
        problems.append(f"mean sentence length {mean:.1f} words")
    if longest > spec.threshold("sentence_words_max"):
        problems.append(f"a sentence of {longest} words")
    if len(unexpanded) > spec.threshold("acronyms_max"):
        problems.append(f"{len(unexpanded)} unexplained acronym(s)")
    if not problems:
        return Finding("UG-F", "satisfied", (_document_evidence(doc, stats),), "short sentences and no unexplained acronyms", "", details)
    long_spans = [tokens.sentences[i] for i, n in enumerate(lengths) if n > spec.threshold("sentence_words_max")]
    evidence = _evidence(doc, unexpanded, "acronym") + _evidence(doc, long_spans, "long_sentence")
    return Finding(
        "UG-F", "not_satisfied", _cap(evidence), "; ".join(problems),
        "split long sentences and spell out acronyms on first use", details,
    )


def check_guidelines(
    doc: Document, stats: TextStats, rules: Rules | None = None, tokens: TokenizedText | None = None
) -> list[Finding]:
    """The six usability-guideline findings, UG-A to UG-F."""
    rules = _rules(rules)
    if not doc.body.strip():
        return [_empty(rid) for rid in ("UG-A", "UG-B", "UG-C", "UG-D", "UG-E", "UG-F")]
    tokens = _tokens(doc, tokens)
    return [
        _ug_a(doc, rules["UG-A"]),
        _ug_b(doc, rules["UG-B"], stats),
        _ug_c(doc, rules["UG-C"]),
        _ug_d(doc, rules["UG-D"]),
        _ug_e(doc, rules["UG-E"]),
        _ug_f(doc, rules["UG-F"], stats, tokens),
    ]


def analyze(doc: Document, rules: Rules | None = None, settings: AnalysisSettings | None = None) -> Report:
    """Run every detector over ``doc``; the verdict depends on GDPR1-GDPR6 only."""
    rules = _rules(rules)
    settings = settings or AnalysisSettings()
    tokens = tokenize(doc.body, settings.syllable_overrides or None)
    stats = compute_stats(tokens, settings.exclusions, settings.syllable_overrides or None)
    findings = [
        detect_gdpr1(doc, rules, tokens),
        detect_gdpr2(doc, rules, tokens),
        detect_gdpr3(doc, rules, tokens),
        detect_gdpr4(doc, rules, tokens),
        detect_gdpr5(doc, rules, tokens),
        detect_gdpr6(doc, stats, rules),
        *check_guidelines(doc, stats, rules, tokens),
    ]
    return Report(doc.source_id, stats, tuple(findings))
