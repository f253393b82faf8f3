"""Generate a short, sectioned privacy policy from a company profile.

The six sections follow the order of the requirements they answer:
what is collected, why, on what basis, for how long, who to contact, and
how the data is kept safe. Each section gets an icon, a "Find out more"
link and, where the profile asks for it, an opt-in or opt-out control.

Generation is all-or-nothing: every section is checked for readability
(GFI <= 13, at most 60 words) and the assembled document is re-analyzed;
any failure raises :class:`ValidationFailed` listing every problem.

Profile file grammar (``#`` comments, one ``key = value`` per line)::

    company_name = Company X
    data_item = name                    # repeat for each item
    purpose = predict global trends | opt_in
    purpose = adverts from 3rd parties | opt_out
    retention = Your data will be deleted if you do not use this website for a month.
    email = privacy@example.com
    phone = 01382 308000                # optional
    dpo_name = Anna Reid                # optional
    access_request_timescale = one month  # optional
    security = Your data is stored safely and securely.
    enforcement = If we do lose your data we will be fined by the Information Commissioner.
    seal = seals/trust.svg | Certified by Example Trust
    more_info.collect = https://example.com/privacy/collect
    opt_in_data = all order information
    special_category_basis = explicit consent
    opt_in_url = https://example.com/opt-in
    opt_out_url = https://example.com/opt-out
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field
from pathlib import Path

from ._kv import KVError, parse_kv, read_kv
from .document import Document
from .ingest import from_text, parse_markdown
from .report import Report
from .rulespec import Rules
from .ruleset import analyze, detect_gdpr4
from .textmetrics import ExclusionPolicy, TextStats, compute_stats, tokenize

SECTION_IDS = ("collect", "purpose", "processing", "retention", "contact", "trust")
SECTION_TITLES = {
    "collect": "What we collect",
    "purpose": "Why we collect it",
    "processing": "How we use it",
    "retention": "How long we keep it",
    "contact": "Contact us",
    "trust": "Keeping your data safe",
}
SECTION_RULES = {
    "collect": "GDPR1",
    "purpose": "GDPR2",
    "processing": "GDPR3",
    "retention": "GDPR4",
    "contact": "GDPR5",
    "trust": "GDPR6",
}
GFI_MAX = 13.0
SECTION_WORDS_MAX = 60
BOX_BACKGROUND = "#eeeeee"
MORE_INFO_TEXT = "Find out more"
OPT_IN_TEXT = "Opt in here"
OPT_OUT_TEXT = "Opt out here"

DEFAULT_SECURITY = "Your data is stored safely and securely."
DEFAULT_ENFORCEMENT = "If we do lose your data we will be fined by the Information Commissioner."

_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+\Z")


class ValidationFailed(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("policy validation failed:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass(frozen=True)
class Contact:
    email: str
    phone: str | None = None
    dpo_name: str | None = None
    access_request_timescale: str | None = None


@dataclass(frozen=True)
class Purpose:
    text: str
    requires_opt_in: bool = False
    requires_opt_out: bool = False


@dataclass(frozen=True)
class Seal:
    src: str
    alt: str


def _clean(value: str) -> str:
    return " ".join(value.split())


def join_list(items: list[str] | tuple[str, ...]) -> str:
    """"a", "a, and b", "a, b, and c" (the comma form used throughout the template)."""
    items = list(items)
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + ", and " + items[-1]


@dataclass(frozen=True)
class PolicyConfig:
    company_name: str
    data_items: tuple[str, ...]
    purposes: tuple[Purpose, ...]
    retention_statement: str
    contact: Contact
    security_statement: str = DEFAULT_SECURITY
    enforcement_statement: str = DEFAULT_ENFORCEMENT
    seal: Seal | None = None
    more_info_links: dict[str, str] = field(default_factory=dict)
    opt_in_data: str = "all order information"
    special_category_basis: str | None = None
    opt_in_url: str = "#opt-in"
    opt_out_url: str = "#opt-out"

    def __post_init__(self) -> None:
        object.__setattr__(self, "data_items", tuple(_clean(d) for d in self.data_items))
        object.__setattr__(self, "purposes", tuple(self.purposes))
        problems = self.problems()
        if problems:
            raise ValidationFailed(problems)

    def problems(self, rules: Rules | None = None) -> list[str]:
        rules = rules or Rules.default()
        out = []
        if not self.company_name.strip():
            out.append("company_name is empty")
        if not self.data_items or not all(self.data_items):
            out.append("data_items must list at least one non-empty item")
        elif not any(any(True for _ in rules["GDPR1"].finditer("personal_data", d)) for d in self.data_items):
            out.append("no data item is recognised as personal data (e.g. name, email, address, phone number)")
        if not _EMAIL_RE.match(self.contact.email or ""):
            out.append(f"contact email {self.contact.email!r} is not a valid address")
        if detect_gdpr4(from_text(self.retention_statement), rules).status != "satisfied":
            out.append("retention_statement must say how long data is kept (e.g. 'deleted after 12 months')")
        if not self.security_statement.strip():
            out.append("security_statement is empty")
        if not self.enforcement_statement.strip():
            out.append("enforcement_statement is empty")
        for p in self.purposes:
            if not p.text.strip():
                out.append("a purpose has empty text")
            elif any(True for _ in rules["GDPR3"].finditer("profiling", p.text)) and not p.requires_opt_out:
                out.append(f"purpose {p.text!r} involves automated processing and needs an opt-out")
        if self.sensitive_items(rules) and not (self.special_category_basis or "").strip():
            out.append("special-category data items need special_category_basis (e.g. 'explicit consent')")
        unknown = set(self.more_info_links) - set(SECTION_IDS)
        if unknown:
            out.append(f"more_info links for unknown sections: {sorted(unknown)}")
        return out

    def sensitive_items(self, rules: Rules | None = None) -> list[str]:
        spec = (rules or Rules.default())["GDPR3"]
        return [d for d in self.data_items if any(True for _ in spec.finditer("sensitive_data", d))]

    def more_info(self, section_id: str) -> str:
        return self.more_info_links.get(section_id, f"#more-{section_id}")


@dataclass(frozen=True)
class Control:
    kind: str  # opt_in | opt_out
    text: str
    url: str


@dataclass(frozen=True)
class RenderedSection:
    section_id: str
    rule_id: str
    title: str
    icon_id: str
    icon_alt: str
    statements: tuple[str, ...]
    controls: tuple[Control, ...]
    more_info_url: str
    seal: Seal | None = None

    @property
    def text(self) -> str:
        """Statements plus control labels: the section text a reader sees, minus the link."""
        return " ".join(self.statements + tuple(c.text for c in self.controls))

    @property
    def body_text(self) -> str:
        """The section body exactly as ingestion extracts it from either rendering."""
        paragraphs = [" ".join(self.statements)] + [c.text for c in self.controls] + [MORE_INFO_TEXT]
        return "\n\n".join(_clean(p) for p in paragraphs)


@dataclass(frozen=True)
class SectionCheck:
    stats: TextStats
    passed: bool
    problems: tuple[str, ...]


@dataclass(frozen=True)
class RenderedPolicy:
    title: str
    sections: tuple[RenderedSection, ...]
    markdown: str
    html: str
    checks: tuple[SectionCheck, ...]
    report: Report


def validate_section_text(text: str, policy: ExclusionPolicy | None = None) -> SectionCheck:
    """Pass iff GFI <= 13 and the text has at most 60 words."""
    stats = compute_stats(text, policy)
    problems = []
    if stats.gfi > GFI_MAX:
        problems.append(f"GFI {stats.gfi:.2f} exceeds {GFI_MAX:g}")
    if stats.word_count > SECTION_WORDS_MAX:
        problems.append(f"{stats.word_count} words exceeds {SECTION_WORDS_MAX}")
    return SectionCheck(stats, not problems, tuple(problems))


def _sentence(text: str) -> str:
    text = _clean(text)
    return text if text[-1:] in ".!?" else text + "."


def build_sections(config: PolicyConfig, theme: str = "icons") -> tuple[RenderedSection, ...]:
    optional = [p for p in config.purposes if not p.requires_opt_in]
    opt_in = [p for p in config.purposes if p.requires_opt_in]

    def controls(purposes: list[Purpose], with_opt_in: bool) -> tuple[Control, ...]:
        out = []
        if with_opt_in and purposes:
            out.append(Control("opt_in", OPT_IN_TEXT, config.opt_in_url))
        if any(p.requires_opt_out for p in purposes):
            out.append(Control("opt_out", OPT_OUT_TEXT, config.opt_out_url))
        return tuple(out)

    collect = (
        "If you sign up to use this website's services, we may keep personal information about you.",
        f"This will include your {join_list(config.data_items)}.",
    )
    if optional:
        purpose = (f"This website will use your information to {join_list([_clean(p.text) for p in optional])}.",)
    else:
        purpose = ("This website will use your information to run the services you sign up for.",)
    if opt_in:
        processing = [
            f"We would like to collect {_clean(config.opt_in_data)} to help us to "
            f"{join_list([_clean(p.text) for p in opt_in])}."
        ]
    else:
        processing = ["We only use your information with your consent, or to meet our contract with you."]
    sensitive = config.sensitive_items()
    if sensitive:
        processing.append(f"We only use your {join_list(sensitive)} with your {_clean(config.special_category_basis or '')}.")
        if opt_in:
            processing.append("We use the rest of your data to meet our contract with you.")
    contact = [
        "If you have any questions or comments about this privacy policy, or the data collected, "
        f"email {config.contact.email}."
    ]
    if config.contact.phone:
        contact.append(f"You can also call us on {_clean(config.contact.phone)}.")
    if config.contact.dpo_name:
        contact.append(f"Our data protection officer is {_clean(config.contact.dpo_name)}.")
    if config.contact.access_request_timescale:
        contact.append(f"We will reply to requests for your data within {_clean(config.contact.access_request_timescale)}.")
    trust = (_clean(config.security_statement), _clean(config.enforcement_statement))

    bodies = {
        "collect": (collect, ()),
        "purpose": (purpose, controls(optional, with_opt_in=False)),
        "processing": (tuple(processing), controls(opt_in, with_opt_in=True)),
        "retention": ((_clean(config.retention_statement),), ()),
        "contact": (tuple(contact), ()),
        "trust": (trust, ()),
    }
    sections = []
    for sid in SECTION_IDS:
        statements, ctrls = bodies[sid]
        sections.append(
            RenderedSection(
                section_id=sid,
                rule_id=SECTION_RULES[sid],
                title=SECTION_TITLES[sid],
                icon_id=sid,
                icon_alt=f"{SECTION_TITLES[sid]} icon",
                statements=statements,
                controls=ctrls,
                more_info_url=config.more_info(sid),
                seal=config.seal if sid == "trust" else None,
            )
        )
    return tuple(sections)


def _icon_src(theme: str, icon_id: str) -> str:
    return f"{theme.rstrip('/')}/{icon_id}.svg"


_MD_SPECIAL_RE = re.compile(r"([\\`*_\[\]<>#!])")


def _md_escape(text: str) -> str:
    return _MD_SPECIAL_RE.sub(r"\\\1", text)


def _md_url(url: str) -> str:
    return url.replace(" ", "%20").replace(")", "%29").replace("(", "%28")


def render_markdown(title: str, sections: tuple[RenderedSection, ...], theme: str = "icons") -> str:
    lines = [f"# {_md_escape(title)}", ""]
    for sec in sections:
        icon = f"![{_md_escape(sec.icon_alt)}]({_md_url(_icon_src(theme, sec.icon_id))})"
        lines += [f"## {icon} {_md_escape(sec.title)}", ""]
        lines += [_md_escape(" ".join(sec.statements)), ""]
        if sec.seal is not None:
            lines += [f"![{_md_escape(sec.seal.alt)}]({_md_url(sec.seal.src)})", ""]
        for ctrl in sec.controls:
            lines += [f"[{ctrl.text}]({_md_url(ctrl.url)})", ""]
        lines += [f"[{MORE_INFO_TEXT}]({_md_url(sec.more_info_url)})", ""]
    return "\n".join(lines)


_STYLE = """\
body {{ font-family: sans-serif; max-width: 40em; margin: 2em auto; line-height: 1.5; }}
.policy-section {{ border: 1px solid #999999; background: {background}; padding: 0.5em 1em; margin: 1em 0; }}
.policy-section h2 img.icon {{ width: 1.5em; height: 1.5em; vertical-align: middle; margin-right: 0.3em; }}
.control {{ font-weight: bold; }}
"""


def render_html(
    title: str, sections: tuple[RenderedSection, ...], theme: str = "icons", background: str = BOX_BACKGROUND
) -> str:
    esc = html.escape
    out = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{esc(title)}</title>",
        "<style>",
        _STYLE.format(background=background).rstrip("\n"),
        "</style>",
        "</head>",
        "<body>",
        "<main>",
        f"<h1>{esc(title)}</h1>",
    ]
    for sec in sections:
        out += [
            f'<section class="policy-section" id="{esc(sec.section_id)}">',
            f'<h2><img class="icon" src="{esc(_icon_src(theme, sec.icon_id))}" alt="{esc(sec.icon_alt)}"> {esc(sec.title)}</h2>',
            f"<p>{esc(' '.join(sec.statements))}</p>",
        ]
        if sec.seal is not None:
            out.append(f'<p><img class="seal" src="{esc(sec.seal.src)}" alt="{esc(sec.seal.alt)}"></p>')
        for ctrl in sec.controls:
            kind = ctrl.kind.replace("_", "-")
            out.append(f'<p><a class="control {kind}" href="{esc(ctrl.url)}">{esc(ctrl.text)}</a></p>')
        out.append(f'<p><a class="more-info" href="{esc(sec.more_info_url)}">{MORE_INFO_TEXT}</a></p>')
        out.append("</section>")
    out += ["</main>", "</body>", "</html>", ""]
    return "\n".join(out)


def generate(
    config: PolicyConfig,
    theme: str = "icons",
    rules: Rules | None = None,
    background: str = BOX_BACKGROUND,
) -> RenderedPolicy:
    """Render the policy; raises ValidationFailed unless every check passes."""
    rules = rules or Rules.default()
    problems = config.problems(rules)
    if problems:
        raise ValidationFailed(problems)
    title = f"{_clean(config.company_name)} privacy policy"
    sections = build_sections(config, theme)
    checks = []
    for sec in sections:
        check = validate_section_text(sec.body_text)
        checks.append(check)
        problems += [f"section '{sec.title}': {p}" for p in check.problems]
    markdown = render_markdown(title, sections, theme)
    rendered_html = render_html(title, sections, theme, background)
    report = analyze(parse_markdown(markdown, "generated.md"), rules)
    if report.verdict != "compliant":
        failing = [f"{f.rule_id}: {f.message}" for f in report.findings if f.rule_id.startswith("GDPR") and not f.satisfied]
        problems += [f"generated policy is not compliant ({m})" for m in failing]
    if problems:
        raise ValidationFailed(problems)
    return RenderedPolicy(title, sections, markdown, rendered_html, tuple(checks), report)


def config_from_entries(entries: list[tuple[str, str, int]], source: str = "<config>") -> PolicyConfig:
    single: dict[str, str] = {}
    data_items: list[str] = []
    purposes: list[Purpose] = []
    more_info: dict[str, str] = {}
    seal = None
    singles = {
        "company_name", "retention", "email", "phone", "dpo_name", "access_request_timescale",
        "security", "enforcement", "opt_in_data", "special_category_basis", "opt_in_url", "opt_out_url",
    }
    for key, value, line in entries:
        if key == "data_item":
            data_items.append(value)
        elif key == "purpose":
            text, _, flags = value.partition("|")
            names = {f.strip().lower() for f in flags.split(",") if f.strip()}
            bad = names - {"opt_in", "opt_out"}
            if bad:
                raise KVError(f"unknown purpose flag(s) {sorted(bad)}; use opt_in, opt_out", line, source)
            purposes.append(Purpose(text.strip(), "opt_in" in names, "opt_out" in names))
        elif key.startswith("more_info."):
            more_info[key.split(".", 1)[1]] = value
        elif key == "seal":
            src, sep, alt = value.partition("|")
            if not sep or not alt.strip():
                raise KVError("seal needs 'path | alt text'", line, source)
            seal = Seal(src.strip(), alt.strip())
        elif key in singles:
            if key in single:
                raise KVError(f"{key} given twice", line, source)
            single[key] = value
        else:
            raise KVError(f"unknown key {key!r}", line, source)
    for required in ("company_name", "retention", "email"):
        if required not in single:
            raise KVError(f"missing required key {required!r}", None, source)
    return PolicyConfig(
        company_name=single["company_name"],
        data_items=tuple(data_items),
        purposes=tuple(purposes),
        retention_statement=single["retention"],
        contact=Contact(
            email=single["email"],
            phone=single.get("phone") or None,
            dpo_name=single.get("dpo_name") or None,
            access_request_timescale=single.get("access_request_timescale") or None,
        ),
        security_statement=single.get("security", DEFAULT_SECURITY),
        enforcement_statement=single.get("enforcement", DEFAULT_ENFORCEMENT),
        seal=seal,
        more_info_links=more_info,
        opt_in_data=single.get("opt_in_data", "all order information"),
        special_category_basis=single.get("special_category_basis") or None,
        opt_in_url=single.get("opt_in_url", "#opt-in"),
        opt_out_url=single.get("opt_out_url", "#opt-out"),
    )


def parse_config(text: str, source: str = "<config>") -> PolicyConfig:
    return config_from_entries(parse_kv(text, source), source)


def load_config(path: str | Path) -> PolicyConfig:
    return config_from_entries(read_kv(path), str(path))


def rendered_document(policy: RenderedPolicy) -> Document:
    return parse_markdown(policy.markdown, "generated.md")
