"""Turn files, URLs or stdin into :class:`~policylint.document.Document` objects.

Format resolution for ``format_hint="auto"`` is fixed:

1. file extension: ``.md``/``.markdown`` -> markdown, ``.html``/``.htm``/``.xhtml`` -> html;
2. content sniffing: a leading ``<`` followed by a known tag -> html;
   an ATX heading line (``# Title``) or an inline ``[text](url)`` link -> markdown;
3. otherwise plain text.

HTML boilerplate is removed by tag: ``script``, ``style``, ``nav``, ``header``,
``footer``, ``aside``, ``noscript``, ``template`` and ``head`` contents never reach
the body. Headings become sections and are kept out of the body text;
paragraphs are joined with a blank line so they never merge into one sentence.
"""

from __future__ import annotations

import hashlib
import os
import re
import sys
import tempfile
import unicodedata
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import NamedTuple
from urllib.parse import urljoin

from . import __version__
from .document import Document, Image, Link, Marker, Section
from .textmetrics import tokenize

CACHE_ENV = "POLICYLINT_CACHE_DIR"

_MARKER_PATTERNS = (
    ("opt_in", re.compile(r"\bopt[\s-]?in(?:\s+here)?\b", re.IGNORECASE)),
    (
        "opt_out",
        re.compile(
            r"\bopt[\s-]?out(?:\s+here)?\b|\bunsubscribe\b|\bwithdraw (?:your )?consent\b"
            r"|\bdo not sell my (?:personal )?(?:data|information)\b",
            re.IGNORECASE,
        ),
    ),
)
_POLICY_LINK_RE = re.compile(r"\bprivacy\b|\bdata protection\b", re.IGNORECASE)


class IngestError(Exception):
    """Base class for failures that stop a source from becoming a Document."""


class UnreadableSource(IngestError):
    pass


class FetchFailed(IngestError):
    def __init__(self, url: str, status: int | None, reason: str):
        self.url = url
        self.status = status
        detail = f"HTTP {status}: {reason}" if status else reason
        super().__init__(f"fetch of {url} failed ({detail})")


class EmptyDocument(IngestError):
    def __init__(self, source_id: str, words: int, minimum: int):
        self.words = words
        super().__init__(
            f"{source_id}: extracted only {words} word(s) (< {minimum}); "
            "extraction probably failed"
        )


@dataclass(frozen=True)
class SourceSpec:
    kind: str  # file | url | stdin
    locator: str = ""
    format_hint: str = "auto"  # auto | text | markdown | html

    def __post_init__(self) -> None:
        if self.kind not in ("file", "url", "stdin"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind != "stdin" and not self.locator:
            raise ValueError("file and url sources need a locator")
        if self.format_hint not in ("auto", "text", "markdown", "html"):
            raise ValueError(f"unknown format hint {self.format_hint!r}")

    @classmethod
    def from_locator(cls, locator: str, format_hint: str = "auto") -> "SourceSpec":
        if locator == "-":
            return cls("stdin", "", format_hint)
        if re.match(r"https?://", locator, re.IGNORECASE):
            return cls("url", locator, format_hint)
        return cls("file", locator, format_hint)

    @property
    def source_id(self) -> str:
        return self.locator or "<stdin>"


@dataclass(frozen=True)
class FetchSettings:
    timeout: float = 10.0
    max_bytes: int = 5_000_000
    user_agent: str = f"policylint/{__version__}"
    allow_network: bool = True
    cache_dir: str | None = None  # falls back to $POLICYLINT_CACHE_DIR
    min_words: int = 10


class Anchor(NamedTuple):
    text: str
    href: str


# -- body assembly -----------------------------------------------------------


@dataclass
class _OpenSection:
    heading: str
    start: int | None = None
    end: int | None = None
    links: list[Link] = field(default_factory=list)


class _Collector:
    """Accumulates normalized body text with spans for sections, links and images."""

    def __init__(self) -> None:
        self._parts: list[str] = []
        self.length = 0
        self._sep: str | None = None
        self.sections: list[_OpenSection] = []
        self.links: list[Link] = []
        self.images: list[Image] = []
        self.controls: list[tuple[int, int]] = []
        self._anchor: list | None = None  # [href, start, end]
        self._control_depth = 0
        self._control_span: list | None = None

    @property
    def body(self) -> str:
        return "".join(self._parts)

    def text(self, raw: str) -> None:
        if not raw:
            return
        raw = unicodedata.normalize("NFC", raw)
        if raw[0].isspace() and self.length and self._sep is None:
            self._sep = " "
        core = " ".join(raw.split())
        if not core:
            return
        if self._sep and self.length:
            self._parts.append(self._sep)
            self.length += len(self._sep)
        start = self.length
        self._parts.append(core)
        self.length += len(core)
        self._sep = " " if raw[-1].isspace() else None
        for span in (self._anchor, self._control_span):
            if span is not None:
                if span[1] is None:
                    span[1] = start
                span[2] = self.length
        if self.sections:
            sec = self.sections[-1]
            if sec.start is None:
                sec.start = start
            sec.end = self.length

    def paragraph(self) -> None:
        if self.length:
            self._sep = "\n\n"

    def heading(self, text: str) -> None:
        self.paragraph()
        self.sections.append(_OpenSection(" ".join(unicodedata.normalize("NFC", text).split())))

    def start_link(self, href: str) -> None:
        self._anchor = [href, None, None]

    def end_link(self) -> None:
        if self._anchor is None:
            return
        href, start, end = self._anchor
        self._anchor = None
        if start is None:
            return
        link = Link(self.body[start:end], href, start, end)
        self.links.append(link)
        if self.sections:
            self.sections[-1].links.append(link)

    def start_control(self) -> None:
        if self._control_depth == 0:
            self._control_span = [None, None, None]
        self._control_depth += 1

    def end_control(self) -> None:
        if self._control_depth == 0:
            return
        self._control_depth -= 1
        if self._control_depth == 0 and self._control_span is not None:
            _, start, end = self._control_span
            if start is not None:
                self.controls.append((start, end))
            self._control_span = None

    def image(self, alt: str, src: str, role: str) -> None:
        self.images.append(Image(" ".join(alt.split()), src, self.length, role))

    def finish(self, source_id: str, fmt: str, marker_scope: str = "body") -> Document:
        body = self.body
        sections = []
        for sec in self.sections:
            start = sec.start if sec.start is not None else min(sec.end or self.length, self.length)
            end = sec.end if sec.end is not None else start
            sections.append(Section(sec.heading, start, end, tuple(sec.links)))
        # empty sections sit at the offset where the next content began
        fixed = []
        for i, sec in enumerate(sections):
            if sec.start == sec.end and self.sections[i].start is None:
                nxt = next((s.start for s in sections[i + 1:] if s.start != s.end), len(body))
                prev_end = fixed[-1].end if fixed else 0
                pos = max(prev_end, min(nxt, len(body)))
                sec = Section(sec.heading, pos, pos, sec.links)
            fixed.append(sec)
        if marker_scope == "body":
            markers = find_markers(body)
        else:
            markers = []
            for start, end in sorted(set(self.controls + [(l.start, l.end) for l in self.links])):
                markers += find_markers(body, start, end)
            markers = sorted(set(markers), key=lambda m: (m.start, m.end))
        return Document(
            source_id=source_id,
            body=body,
            format=fmt,
            sections=tuple(fixed),
            links=tuple(self.links),
            images=tuple(self.images),
            interactive_markers=tuple(markers),
        )


def find_markers(body: str, start: int = 0, end: int | None = None) -> list[Marker]:
    """Opt-in/opt-out phrases within ``body[start:end]``."""
    end = len(body) if end is None else end
    found = []
    for kind, pattern in _MARKER_PATTERNS:
        for m in pattern.finditer(body, start, end):
            found.append(Marker(m.start(), m.end(), kind))
    return sorted(found, key=lambda m: (m.start, m.end))


def _image_role(*hints: str) -> str:
    joined = " ".join(hints).lower()
    for role in ("seal", "icon", "logo"):
        if role in joined:
            return role
    return "image"


# -- plain text ----------------------------------------------------------------


def parse_text(text: str, source_id: str = "<text>") -> Document:
    col = _Collector()
    for para in re.split(r"\n[ \t]*\n", text):
        col.paragraph()
        col.text(para)
    return col.finish(source_id, "text")


def from_text(body: str, source_id: str = "<text>") -> Document:
    """Wrap raw text as a Document without the minimum-length check."""
    return parse_text(body, source_id)


# -- markdown --------------------------------------------------------------------

_MD_INLINE_RE = re.compile(
    r"(?<!\\)!\[(?P<alt>[^\]]*)\]\((?P<src>[^)\s]*)(?:\s+\"[^\"]*\")?\)"
    r"|(?<![\\!])\[(?P<text>[^\]]+)\]\((?P<href>[^)\s]*)(?:\s+\"[^\"]*\")?\)"
    r"|<(?P<auto>https?://[^>\s]+)>"
)
_MD_CLEAN_RE = re.compile(r"\\([\\`*_{}\[\]()#+\-.!<>|])|(\*\*|__|\*|`)|<[^>\n]+>")
_MD_HEADING_RE = re.compile(r"^\s{0,3}(#{1,6})\s+(.*?)\s*#*\s*$")
_MD_RULE_RE = re.compile(r"^\s{0,3}([-*_])(?:\s*\1){2,}\s*$")
_MD_ITEM_RE = re.compile(r"^\s*(?:[-*+]|\d+[.)])\s+(.*)$")
_MD_FENCE_RE = re.compile(r"^\s{0,3}(```|~~~)")


def _md_clean(segment: str) -> str:
    return _MD_CLEAN_RE.sub(lambda m: m.group(1) or "", segment)


def _md_inline(col: _Collector, line: str) -> None:
    pos = 0
    for m in _MD_INLINE_RE.finditer(line):
        col.text(_md_clean(line[pos:m.start()]))
        if m.group("src") is not None:
            alt = _md_clean(m.group("alt"))
            col.image(alt, m.group("src"), _image_role(alt, m.group("src")))
        elif m.group("href") is not None:
            col.start_link(m.group("href"))
            col.text(_md_clean(m.group("text")))
            col.end_link()
        else:
            col.start_link(m.group("auto"))
            col.text(m.group("auto"))
            col.end_link()
        pos = m.end()
    col.text(_md_clean(line[pos:]))


def parse_markdown(text: str, source_id: str = "<markdown>") -> Document:
    col = _Collector()
    in_fence = False
    for line in text.splitlines():
        if _MD_FENCE_RE.match(line):
            in_fence = not in_fence
            col.paragraph()
            continue
        if in_fence:
            continue
        if not line.strip() or _MD_RULE_RE.match(line):
            col.paragraph()
            continue
        heading = _MD_HEADING_RE.match(line)
        if heading:
            raw = heading.group(2)
            for m in _MD_INLINE_RE.finditer(raw):
                if m.group("src") is not None:
                    alt = _md_clean(m.group("alt"))
                    col.image(alt, m.group("src"), _image_role(alt, m.group("src")))
            title = _MD_INLINE_RE.sub(lambda m: m.group("text") or m.group("auto") or "", raw)
            col.heading(_md_clean(title))
            continue
        item = _MD_ITEM_RE.match(line)
        if item:
            col.paragraph()
            line = item.group(1)
        line = re.sub(r"^\s*>\s?", "", line)
        _md_inline(col, line + "\n")
    return col.finish(source_id, "markdown")


# -- html ------------------------------------------------------------------------

_SKIP_TAGS = frozenset({"script", "style", "nav", "header", "footer", "aside", "noscript", "template", "head"})
_BLOCK_TAGS = frozenset(
    {
        "p", "div", "section", "article", "main", "li", "ul", "ol", "table", "tr", "td", "th",
        "blockquote", "form", "dl", "dt", "dd", "pre", "figure", "figcaption", "address",
        "fieldset", "details", "body", "html", "hr",
    }
)
_HEADING_TAGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})
_CONTROL_TAGS = frozenset({"button", "label", "summary", "option"})
_VOID_TAGS = frozenset({"img", "input", "br", "hr", "meta", "link", "area", "base", "col", "embed", "source", "track", "wbr"})


class _HTMLExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.col = _Collector()
        self._skip = 0
        self._heading: list[str] | None = None

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        a = {k: v or "" for k, v in attrs}
        if self._skip:
            if tag in _SKIP_TAGS:
                self._skip += 1
            return
        if tag in _SKIP_TAGS:
            self._skip = 1
            return
        if tag in _HEADING_TAGS:
            self.col.paragraph()
            self._heading = []
        elif tag in _BLOCK_TAGS:
            self.col.paragraph()
        elif tag == "br":
            self.col.text(" ")
        elif tag == "a" and self._heading is None:
            self.col.start_link(a.get("href", ""))
        elif tag in _CONTROL_TAGS:
            self.col.start_control()
        elif tag == "img":
            alt = a.get("alt", "")
            self.col.image(alt, a.get("src", ""), _image_role(a.get("class", ""), a.get("id", ""), a.get("src", ""), alt))
        elif tag == "input" and a.get("type", "").lower() in ("submit", "button", "reset") and a.get("value"):
            self.col.start_control()
            self.col.text(" " + a["value"] + " ")
            self.col.end_control()

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self.handle_starttag(tag, attrs)
        if tag not in _VOID_TAGS:
            self.handle_endtag(tag)

    def handle_endtag(self, tag: str) -> None:
        if self._skip:
            if tag in _SKIP_TAGS:
                self._skip -= 1
            return
        if tag in _HEADING_TAGS and self._heading is not None:
            self.col.heading("".join(self._heading))
            self._heading = None
        elif tag in _BLOCK_TAGS:
            self.col.paragraph()
        elif tag == "a":
            self.col.end_link()
        elif tag in _CONTROL_TAGS:
            self.col.end_control()

    def handle_data(self, data: str) -> None:
        if self._skip:
            return
        if self._heading is not None:
            self._heading.append(data)
        else:
            self.col.text(data)


def parse_html(text: str, source_id: str = "<html>") -> Document:
    parser = _HTMLExtractor()
    parser.feed(text)
    parser.close()
    return parser.col.finish(source_id, "html", marker_scope="controls")


class _AnchorParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.anchors: list[Anchor] = []
        self._open: tuple[str, list[str]] | None = None

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            self._open = (dict(attrs).get("href") or "", [])

    def handle_endtag(self, tag):
        if tag == "a" and self._open is not None:
            href, parts = self._open
            self.anchors.append(Anchor(" ".join("".join(parts).split()), href))
            self._open = None

    def handle_data(self, data):
        if self._open is not None:
            self._open[1].append(data)


def discover_policy_link(landing_page_html: str, base_url: str | None = None) -> Anchor | None:
    """First anchor, in document order, whose text names a privacy policy."""
    parser = _AnchorParser()
    parser.feed(landing_page_html)
    parser.close()
    for anchor in parser.anchors:
        if _POLICY_LINK_RE.search(anchor.text):
            href = urljoin(base_url, anchor.href) if base_url else anchor.href
            return Anchor(anchor.text, href)
    return None


# -- loading ---------------------------------------------------------------------

_HTML_SNIFF_RE = re.compile(
    r"\A\s*<(?:!doctype\s+html|html|head|body|div|p|h[1-6]|section|article|main|!--)\b",
    re.IGNORECASE,
)
_MD_SNIFF_RE = re.compile(r"^\s{0,3}#{1,6}\s+\S|\[[^\]]+\]\([^)\s]+\)", re.MULTILINE)


def resolve_format(format_hint: str, name: str, text: str) -> str:
    if format_hint != "auto":
        return format_hint
    suffix = Path(name.split("?", 1)[0]).suffix.lower()
    if suffix in (".md", ".markdown", ".mdown"):
        return "markdown"
    if suffix in (".html", ".htm", ".xhtml"):
        return "html"
    if _HTML_SNIFF_RE.match(text):
        return "html"
    if _MD_SNIFF_RE.search(text):
        return "markdown"
    return "text"


def parse(text: str, fmt: str, source_id: str) -> Document:
    if fmt == "html":
        return parse_html(text, source_id)
    if fmt == "markdown":
        return parse_markdown(text, source_id)
    return parse_text(text, source_id)


def _decode(data: bytes, charset: str | None = None) -> str:
    for enc in filter(None, (charset, "utf-8-sig")):
        try:
            return data.decode(enc)
        except (LookupError, UnicodeDecodeError):
            continue
    return data.decode("cp1252", errors="replace")


class _LimitedRedirects(urllib.request.HTTPRedirectHandler):
    max_redirections = 5


def _cache_path(url: str, settings: FetchSettings) -> Path | None:
    root = settings.cache_dir or os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / (hashlib.sha256(url.encode("utf-8")).hexdigest() + ".txt")


def fetch(url: str, settings: FetchSettings | None = None) -> str:
    """GET ``url`` (at most 5 redirects) and return decoded text, using the on-disk cache if set."""
    settings = settings or FetchSettings()
    cached = _cache_path(url, settings)
    if cached is not None and cached.is_file():
        return cached.read_text(encoding="utf-8")
    if not settings.allow_network:
        raise FetchFailed(url, None, "network access disabled")
    opener = urllib.request.build_opener(_LimitedRedirects)
    request = urllib.request.Request(url, headers={"User-Agent": settings.user_agent}, method="GET")
    try:
        with opener.open(request, timeout=settings.timeout) as resp:
            data = resp.read(settings.max_bytes + 1)
            charset = resp.headers.get_content_charset()
    except urllib.error.HTTPError as exc:
        raise FetchFailed(url, exc.code, str(exc.reason)) from exc
    except (urllib.error.URLError, OSError, ValueError) as exc:
        reason = getattr(exc, "reason", exc)
        raise FetchFailed(url, None, str(reason)) from exc
    if len(data) > settings.max_bytes:
        raise FetchFailed(url, None, f"response exceeds {settings.max_bytes} bytes")
    text = _decode(data, charset)
    if cached is not None:
        cached.parent.mkdir(parents=True, exist_ok=True)
        # write-then-rename keeps concurrent writers from exposing partial files
        fd, tmp = tempfile.mkstemp(dir=cached.parent, prefix=".fetch-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, cached)
    return text


def read_source(src: SourceSpec, settings: FetchSettings | None = None) -> str:
    settings = settings or FetchSettings()
    if src.kind == "url":
        return fetch(src.locator, settings)
    try:
        if src.kind == "stdin":
            data = sys.stdin.buffer.read()
        else:
            data = Path(src.locator).read_bytes()
    except OSError as exc:
        raise UnreadableSource(f"{src.source_id}: {exc.strerror or exc}") from exc
    return _decode(data)


def load(src: SourceSpec, settings: FetchSettings | None = None) -> Document:
    """Read, extract and normalize one source."""
    settings = settings or FetchSettings()
    text = read_source(src, settings)
    name = src.locator if src.kind != "stdin" else ""
    doc = parse(text, resolve_format(src.format_hint, name, text), src.source_id)
    words = len(tokenize(doc.body).words)
    if words < settings.min_words:
        raise EmptyDocument(src.source_id, words, settings.min_words)
    return doc


def concatenate(docs: list[Document], source_id: str | None = None) -> Document:
    """Join several pages (e.g. a tabbed policy) into one Document."""
    if not docs:
        raise ValueError("nothing to concatenate")
    parts, sections, links, images, markers = [], [], [], [], []
    offset = 0
    for doc in docs:
        if parts:
            parts.append("\n\n")
            offset += 2
        parts.append(doc.body)

        def shift(link: Link) -> Link:
            return Link(link.text, link.target, link.start + offset, link.end + offset)

        sections += [Section(s.heading, s.start + offset, s.end + offset, tuple(map(shift, s.links))) for s in doc.sections]
        links += [shift(l) for l in doc.links]
        images += [Image(i.alt, i.src, i.position + offset, i.role) for i in doc.images]
        markers += [Marker(m.start + offset, m.end + offset, m.kind) for m in doc.interactive_markers]
        offset += len(doc.body)
    formats = {d.format for d in docs}
    return Document(
        source_id=source_id or "+".join(d.source_id for d in docs),
        body="".join(parts),
        format=formats.pop() if len(formats) == 1 else "mixed",
        sections=tuple(sections),
        links=tuple(links),
        images=tuple(images),
        interactive_markers=tuple(markers),
    )
