"""Tokenization and Gunning Fog readability statistics.

The tokenizer is deliberately simple and deterministic:

* sentences end at ``.``, ``!`` or ``?`` (plus any closing quotes or
  brackets) when followed by whitespace and an uppercase letter, or by the
  end of the text; a blank line always ends a sentence;
* a small guard list of abbreviations (``e.g.``, ``etc.``, ``Mr.`` ...)
  never ends a sentence;
* words are maximal runs of letters/digits joined by internal apostrophes
  or hyphens. URLs and e-mail addresses are single tokens.

Syllables are counted with a vowel-group heuristic. A word is *complex*
when it has three or more syllables and none of the enabled exclusions
(proper nouns, short-part compounds, inflectional suffixes) applies.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "ABBREVIATIONS",
    "ExclusionPolicy",
    "TextStats",
    "TokenizedText",
    "Word",
    "classify_complex",
    "compute_stats",
    "count_syllables",
    "gunning_fog",
    "tokenize",
]

ABBREVIATIONS = frozenset(
    {
        "e.g", "i.e", "etc", "mr", "mrs", "ms", "dr", "prof", "st", "jr",
        "sr", "vs", "inc", "ltd", "co", "no", "approx", "dept", "fig",
        "cf", "al", "corp", "plc", "u.k", "u.s",
    }
)

_URL = r"(?:https?://|www\.)[^\s<>\"']*[^\s<>\"'.,;:!?)\]]"
_EMAIL = r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+"
_DOTTED = r"(?:[^\W\d_]\.){2,}"
_WORD = r"[^\W_]+(?:['’-][^\W_]+)*"
_TOKEN_RE = re.compile(
    f"(?P<url>{_URL})|(?P<email>{_EMAIL})|(?P<dotted>{_DOTTED})|(?P<word>{_WORD})"
)
# terminal punctuation plus trailing closers
_TERMINAL_RE = re.compile(r"[.!?]+[\"'’”)\]]*")
_PARAGRAPH_RE = re.compile(r"\n[ \t]*\n\s*")
_SPACE_RE = re.compile(r"\s*")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")
_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class Word:
    start: int
    end: int
    text: str
    lower: str
    syllables: int
    proper_noun: bool
    hyphenated: bool
    kind: str = "word"  # word | number | url | email


@dataclass(frozen=True)
class TokenizedText:
    text: str
    sentences: tuple[tuple[int, int], ...]
    words: tuple[Word, ...]
    # index of the sentence holding each word
    word_sentence: tuple[int, ...]

    def sentence_words(self, index: int) -> list[Word]:
        return [w for w, s in zip(self.words, self.word_sentence) if s == index]

    def sentence_of(self, offset: int) -> int:
        """Index of the sentence containing (or preceding) ``offset``."""
        starts = [s for s, _ in self.sentences]
        return max(0, bisect_right(starts, offset) - 1)


@dataclass(frozen=True)
class ExclusionPolicy:
    """Which classical Gunning exclusions apply when flagging complex words."""

    proper_nouns: bool = True
    compounds: bool = True
    suffixes: bool = True

    @classmethod
    def none(cls) -> "ExclusionPolicy":
        return cls(False, False, False)

    @classmethod
    def parse(cls, spec: str, base: "ExclusionPolicy | None" = None) -> "ExclusionPolicy":
        """Parse toggles such as ``"proper_nouns=off,suffixes=on"``.

        ``all`` and ``none`` switch every exclusion on or off; a bare name
        turns one on and ``-name`` turns it off.
        """
        values = dict(vars(base or cls()))
        for raw in spec.split(","):
            item = raw.strip().lower()
            if not item:
                continue
            if item in ("all", "none"):
                values = dict.fromkeys(values, item == "all")
                continue
            if "=" in item:
                name, _, flag = item.partition("=")
                name, flag = name.strip(), flag.strip()
                if flag in ("on", "true", "yes", "1"):
                    state = True
                elif flag in ("off", "false", "no", "0"):
                    state = False
                else:
                    raise ValueError(f"bad exclusion toggle value: {raw.strip()!r}")
            elif item.startswith("-"):
                name, state = item[1:], False
            else:
                name, state = item.lstrip("+"), True
            if name not in values:
                raise ValueError(f"unknown exclusion {name!r}; expected one of {sorted(values)}")
            values[name] = state
        return cls(**values)


@dataclass(frozen=True)
class TextStats:
    word_count: int
    sentence_count: int
    complex_word_count: int
    gfi: float
    complex_ratio: float

    @classmethod
    def from_counts(cls, words: int, sentences: int, complex_words: int) -> "TextStats":
        if min(words, sentences, complex_words) < 0:
            raise ValueError("counts must be non-negative")
        if complex_words > words:
            raise ValueError("complex_words cannot exceed words")
        ratio = complex_words / words if words else 0.0
        return cls(words, sentences, complex_words, gunning_fog(words, sentences, complex_words), ratio)

    @property
    def complex_percent(self) -> float:
        return 100.0 * self.complex_ratio


def gunning_fog(words: int, sentences: int, complex_words: int) -> float:
    """0.4 * (words per sentence + 100 * complex-word share); 0 when degenerate."""
    if words <= 0 or sentences <= 0:
        return 0.0
    return 0.4 * (words / sentences + 100.0 * complex_words / words)


def _letters(word: str) -> str:
    w = word.lower()
    if w.endswith(("'s", "’s")):
        w = w[:-2]
    return "".join(ch for ch in w if ch.isalpha())


def _heuristic_syllables(letters: str) -> int:
    count = len(_VOWEL_GROUP_RE.findall(letters))
    # "-le" after a consonant keeps its own syllable (ta-ble, lit-tle)
    consonant_le = len(letters) >= 3 and letters.endswith("le") and letters[-3] not in _VOWELS
    silent_e = letters.endswith("e") and len(letters) >= 2 and letters[-2] not in _VOWELS
    if silent_e and not consonant_le and count > 1:
        count -= 1
    return max(1, count)


def count_syllables(word: str, overrides: Mapping[str, int] | None = None) -> int:
    """Estimate the syllable count of one word token.

    Counts vowel groups (``y`` included), drops a silent trailing ``e``
    unless that would leave no syllable, and keeps the ``-le`` syllable
    after a consonant. Hyphenated compounds sum their parts; tokens
    containing digits, URLs and e-mail addresses count as one.

    >>> count_syllables("information"), count_syllables("table")
    (4, 2)
    """
    if overrides:
        hit = overrides.get(word.lower())
        if hit is not None:
            return max(1, int(hit))
    if "@" in word or "://" in word or word.lower().startswith("www.") or any(ch.isdigit() for ch in word):
        return 1
    parts = [p for p in re.split(r"-", word) if p]
    if len(parts) > 1:
        return sum(count_syllables(p, overrides) for p in parts)
    letters = _letters(word)
    if not letters:
        return 1
    return _heuristic_syllables(letters)


def _suffix_stem(word: str) -> str | None:
    letters = _letters(word)
    for suffix in ("ing", "es", "ed"):
        if letters.endswith(suffix) and len(letters) > len(suffix) + 1:
            return letters[: -len(suffix)]
    return None


def classify_complex(
    word: Word,
    position: int,
    policy: ExclusionPolicy | None = None,
    overrides: Mapping[str, int] | None = None,
) -> bool:
    """True when ``word`` counts as complex at sentence-relative ``position``."""
    policy = policy or ExclusionPolicy()
    if word.syllables < 3 or word.kind != "word":
        return False
    if policy.proper_nouns and position > 0 and word.text[:1].isupper():
        return False
    if policy.compounds and word.hyphenated:
        parts = [p for p in word.text.split("-") if p]
        if all(count_syllables(p, overrides) < 3 for p in parts):
            return False
    if policy.suffixes and not word.hyphenated:
        stem = _suffix_stem(word.text)
        if stem is not None and _heuristic_syllables(stem) < 3:
            return False
    return True


def _word_kind(match: re.Match) -> str:
    if match.lastgroup in ("url", "email"):
        return match.lastgroup
    if any(ch.isdigit() for ch in match.group()):
        return "number"
    return "word"


def _ends_with_abbreviation(text: str, punct_start: int) -> bool:
    begin = punct_start
    while begin > 0 and not text[begin - 1].isspace():
        begin -= 1
    chunk = text[begin:punct_start].lstrip("\"'(“‘[").lower()
    return chunk in ABBREVIATIONS


def _sentence_breaks(text: str, token_spans: list[tuple[int, int]]) -> list[int]:
    """Offsets at which a new sentence may begin (exclusive ends of the previous one)."""
    breaks: set[int] = set()
    starts = [s for s, _ in token_spans]
    for m in _TERMINAL_RE.finditer(text):
        # periods inside URLs, e-mails and dotted abbreviations are not boundaries
        i = bisect_right(starts, m.start()) - 1
        if i >= 0 and token_spans[i][0] <= m.start() < token_spans[i][1]:
            continue
        gap = _SPACE_RE.match(text, m.end()).end()
        if gap == len(text):
            breaks.add(m.end())
            continue
        if gap == m.end() or not text[gap].isupper():
            continue
        if text[m.start()] == "." and m.group().count(".") == 1 and _ends_with_abbreviation(text, m.start()):
            continue
        breaks.add(m.end())
    for m in _PARAGRAPH_RE.finditer(text):
        breaks.add(m.start())
    return sorted(breaks)


def tokenize(text: str, overrides: Mapping[str, int] | None = None) -> TokenizedText:
    """Split ``text`` into sentence spans and word tokens."""
    matches = list(_TOKEN_RE.finditer(text))
    spans = [(m.start(), m.end()) for m in matches]
    breaks = _sentence_breaks(text, spans)

    # group tokens between consecutive breaks; a sentence needs at least one word
    sentences: list[tuple[int, int]] = []
    word_sentence: list[int] = []
    words: list[Word] = []
    bounds = breaks + [len(text) + 1]
    b = 0
    current: list[re.Match] = []

    def flush(group: list[re.Match]) -> None:
        if not group:
            return
        start = group[0].start()
        end = group[-1].end()
        tail = _TERMINAL_RE.match(text, end)
        if tail:
            end = tail.end()
        idx = len(sentences)
        sentences.append((start, end))
        for pos, m in enumerate(group):
            raw = m.group()
            kind = _word_kind(m)
            words.append(
                Word(
                    start=m.start(),
                    end=m.end(),
                    text=raw,
                    lower=raw.lower(),
                    syllables=count_syllables(raw, overrides),
                    proper_noun=pos > 0 and raw[:1].isupper(),
                    hyphenated=kind == "word" and "-" in raw,
                    kind=kind,
                )
            )
            word_sentence.append(idx)

    for m in matches:
        while m.start() >= bounds[b]:
            flush(current)
            current = []
            b += 1
        current.append(m)
    flush(current)
    return TokenizedText(text, tuple(sentences), tuple(words), tuple(word_sentence))


def compute_stats(
    text: str | TokenizedText,
    policy: ExclusionPolicy | None = None,
    overrides: Mapping[str, int] | None = None,
) -> TextStats:
    """Word, sentence and complex-word counts plus the Gunning Fog Index."""
    tokens = text if isinstance(text, TokenizedText) else tokenize(text, overrides)
    complex_words = 0
    position = 0
    previous = -1
    for word, sent in zip(tokens.words, tokens.word_sentence):
        position = position + 1 if sent == previous else 0
        previous = sent
        if classify_complex(word, position, policy, overrides):
            complex_words += 1
    return TextStats.from_counts(len(tokens.words), len(tokens.sentences), complex_words)


def complex_words(text: str, policy: ExclusionPolicy | None = None) -> list[str]:
    """The complex words of ``text`` in order, mainly for diagnostics."""
    tokens = tokenize(text)
    out = []
    previous, position = -1, 0
    for word, sent in zip(tokens.words, tokens.word_sentence):
        position = position + 1 if sent == previous else 0
        previous = sent
        if classify_complex(word, position, policy):
            out.append(word.text)
    return out
