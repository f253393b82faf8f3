import io
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from policylint.document import Document, Section
from policylint.ingest import (
    EmptyDocument,
    FetchFailed,
    FetchSettings,
    SourceSpec,
    UnreadableSource,
    concatenate,
    discover_policy_link,
    fetch,
    from_text,
    load,
    parse_html,
    parse_markdown,
    resolve_format,
)

from conftest import FIXTURES

POLICY = (
    "<html><body><main><h1>Privacy</h1>"
    "<p>We collect your name and email address to send you receipts.</p>"
    "<p>We delete your data after 12 months.</p></main></body></html>"
)


def spans_are_valid(doc: Document):
    n = len(doc.body)
    for s in doc.sections:
        assert 0 <= s.start <= s.end <= n
    for l in doc.links:
        assert doc.body[l.start:l.end] == l.text
    for m in doc.interactive_markers:
        assert 0 <= m.start < m.end <= n
    for i in doc.images:
        assert 0 <= i.position <= n


# -- plain text and markdown ---------------------------------------------------------


def test_template_rows_with_headings_give_six_sections():
    doc = load(SourceSpec("file", str(FIXTURES / "template_rows" / "combined.md")))
    assert doc.format == "markdown"
    assert [s.heading for s in doc.sections] == ["GDPR1", "GDPR2", "GDPR3", "GDPR4", "GDPR5", "GDPR6D"]
    assert doc.section_text(doc.sections[2]).startswith("We would like to collect")
    assert "#" not in doc.body


def test_headings_in_a_txt_file_are_sniffed_as_markdown(tmp_path):
    path = tmp_path / "policy.txt"
    path.write_text((FIXTURES / "template_rows" / "combined.md").read_text(encoding="utf-8"), encoding="utf-8")
    assert len(load(SourceSpec("file", str(path))).sections) == 6


def test_markdown_more_information_links_per_section():
    doc = load(SourceSpec("file", str(FIXTURES / "markdown" / "sections.md")))
    assert len(doc.sections) == 3
    for section in doc.sections:
        assert [l.text for l in section.links] == ["More information"]
    assert doc.sections[1].links[0].target == "https://example.com/privacy/why"
    assert "*" not in doc.body and "Really." in doc.body
    spans_are_valid(doc)


def test_markdown_images_and_escapes():
    doc = parse_markdown("## ![Seal of trust](seal.png) Trust\n\nWe keep 5\\*3 \\[things\\] safe.\n")
    assert doc.sections[0].heading == "Trust"
    assert doc.images[0].alt == "Seal of trust" and doc.images[0].role == "seal"
    assert doc.body == "We keep 5*3 [things] safe."


def test_plain_text_paragraphs_do_not_merge():
    doc = from_text("First paragraph without a stop\n\nSecond   paragraph\nwraps here.")
    assert doc.body == "First paragraph without a stop\n\nSecond paragraph wraps here."
    assert doc.format == "text"


def test_text_markers_come_from_the_body():
    doc = from_text("Opt in here to get offers. You can unsubscribe at any time.")
    assert [(m.kind, doc.body[m.start:m.end]) for m in doc.interactive_markers] == [
        ("opt_in", "Opt in here"),
        ("opt_out", "unsubscribe"),
    ]


def test_unicode_is_normalized():
    doc = from_text("Café data is kept for a year.")
    assert doc.body.startswith("Café ")


# -- html ------------------------------------------------------------------------------


def test_html_boilerplate_is_removed():
    doc = load(SourceSpec("file", str(FIXTURES / "html" / "policy.html")))
    assert doc.format == "html"
    for gone in ("tracking", "Shop", "cookie policy", "Copyright", "Unsubscribe", "Help"):
        assert gone not in doc.body
    assert "We collect your name, email address and phone number when you order." in doc.body
    assert "receipts & delivery" in doc.body
    spans_are_valid(doc)


def test_html_structure_is_recorded():
    doc = load(SourceSpec("file", str(FIXTURES / "html" / "policy.html")))
    assert [s.heading for s in doc.sections] == ["Privacy policy", "What we collect", "Why we need it", "How long we keep it"]
    assert [l.target for l in doc.sections[1].links] == ["/privacy/collect"]
    assert [(i.alt, i.role) for i in doc.images] == [("Collection icon", "icon")]
    assert [(m.kind, doc.body[m.start:m.end]) for m in doc.interactive_markers] == [("opt_out", "Opt out")]


def test_html_markers_only_come_from_controls():
    doc = parse_html("<p>You may opt out by writing to us about your data.</p><p><a href='/x'>Opt in here</a></p>")
    assert [m.kind for m in doc.interactive_markers] == ["opt_in"]


def test_nav_and_footer_only_page_is_empty(tmp_path):
    with pytest.raises(EmptyDocument) as info:
        load(SourceSpec("file", str(FIXTURES / "html" / "nav_only.html")))
    assert info.value.words == 0


def test_short_extraction_threshold_is_configurable(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text("We keep your name.", encoding="utf-8")
    with pytest.raises(EmptyDocument):
        load(SourceSpec("file", str(path)))
    assert load(SourceSpec("file", str(path)), FetchSettings(min_words=4)).body == "We keep your name."


def test_missing_file_is_unreadable(tmp_path):
    with pytest.raises(UnreadableSource):
        load(SourceSpec("file", str(tmp_path / "nope.txt")))


def test_stdin_source(monkeypatch):
    data = b"We keep your name and email address for twelve months only."
    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(data)))
    doc = load(SourceSpec.from_locator("-"))
    assert doc.source_id == "<stdin>" and doc.body == data.decode()


def test_source_spec_validation():
    with pytest.raises(ValueError):
        SourceSpec("file", "")
    with pytest.raises(ValueError):
        SourceSpec("ftp", "x")
    assert SourceSpec.from_locator("https://example.com").kind == "url"


@pytest.mark.parametrize(
    "hint, name, text, expected",
    [
        ("auto", "a.md", "<p>x</p>", "markdown"),
        ("auto", "a.htm", "plain", "html"),
        ("auto", "a.txt", "  <!DOCTYPE html><html>", "html"),
        ("auto", "a.txt", "<div>x</div>", "html"),
        ("auto", "a.txt", "# Heading\nbody", "markdown"),
        ("auto", "a.txt", "see [this](http://x)", "markdown"),
        ("auto", "a.txt", "<3 plain text", "text"),
        ("text", "a.html", "<html>", "text"),
    ],
)
def test_format_resolution_order(hint, name, text, expected):
    assert resolve_format(hint, name, text) == expected


@given(st.text(alphabet=st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=300))
def test_extraction_is_deterministic_and_spans_valid(text):
    for parser in (from_text, parse_markdown, parse_html):
        a, b = parser(text), parser(text)
        assert a == b
        spans_are_valid(a)


def test_concatenate_shifts_spans():
    a = parse_markdown("# One\n\nWe keep your name.\n\n[More information](/a)\n")
    b = parse_markdown("# Two\n\nWe delete it after a year.\n\n[Opt out here](/b)\n")
    doc = concatenate([a, b])
    assert doc.body == a.body + "\n\n" + b.body
    assert [s.heading for s in doc.sections] == ["One", "Two"]
    assert doc.body[doc.links[1].start:doc.links[1].end] == "Opt out here"
    assert doc.body[doc.interactive_markers[0].start:doc.interactive_markers[0].end] == "Opt out here"
    spans_are_valid(doc)


def test_document_rejects_bad_spans():
    with pytest.raises(ValueError):
        Document("x", "short", sections=(Section("a", 0, 50),))
    with pytest.raises(ValueError):
        Document("x", "0123456789", sections=(Section("a", 0, 6), Section("b", 4, 8)))


# -- policy link discovery ---------------------------------------------------------------


def test_discover_first_privacy_link():
    html = (FIXTURES / "html" / "landing.html").read_text(encoding="utf-8")
    anchor = discover_policy_link(html)
    assert anchor.text == "Privacy" and anchor.href == "/legal/privacy.html"
    assert discover_policy_link(html, "https://shop.example/home/").href == "https://shop.example/legal/privacy.html"


def test_discover_footer_privacy_policy():
    anchor = discover_policy_link('<footer><a href="/p">Privacy Policy</a></footer>')
    assert anchor.href == "/p"


def test_discover_none():
    assert discover_policy_link((FIXTURES / "html" / "landing_none.html").read_text(encoding="utf-8")) is None


# -- fetching ------------------------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    hits: list = []

    def do_GET(self):
        _Handler.hits.append((self.path, self.headers.get("User-Agent")))
        if self.path == "/policy":
            body = POLICY.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif self.path.startswith("/hop"):
            n = int(self.path[4:] or 0)
            self.send_response(302)
            self.send_header("Location", "/policy" if n == 0 else f"/hop{n - 1}")
            self.end_headers()
        else:
            self.send_response(404)
            self.end_headers()

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.hits = []
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


def test_fetch_url(server):
    doc = load(SourceSpec("url", server + "/policy"), FetchSettings(user_agent="test-agent/1"))
    assert doc.format == "html"
    assert doc.body.startswith("We collect your name")
    assert _Handler.hits == [("/policy", "test-agent/1")]


def test_fetch_failure_carries_status(server):
    with pytest.raises(FetchFailed) as info:
        fetch(server + "/missing")
    assert info.value.status == 404


def test_redirects_are_followed_up_to_five(server):
    assert "12 months" in fetch(server + "/hop4")
    with pytest.raises(FetchFailed):
        fetch(server + "/hop6")


def test_response_size_cap(server):
    with pytest.raises(FetchFailed, match="exceeds"):
        fetch(server + "/policy", FetchSettings(max_bytes=50))


def test_network_can_be_disabled(server):
    with pytest.raises(FetchFailed, match="disabled"):
        fetch(server + "/policy", FetchSettings(allow_network=False))
    assert _Handler.hits == []


def test_fetch_cache(server, tmp_path, monkeypatch):
    monkeypatch.setenv("POLICYLINT_CACHE_DIR", str(tmp_path))
    first = fetch(server + "/policy")
    second = fetch(server + "/policy", FetchSettings(allow_network=False))
    assert first == second
    assert len(_Handler.hits) == 1
    assert [p.suffix for p in tmp_path.iterdir()] == [".txt"]
    assert not any(p.name.startswith(".fetch-") for p in tmp_path.iterdir())


def test_unreachable_host():
    with pytest.raises(FetchFailed):
        fetch("http://127.0.0.1:9/", FetchSettings(timeout=2))
