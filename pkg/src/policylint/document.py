"""The normalized policy document shared by ingestion, the detectors and the generator."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Link:
    text: str
    target: str
    start: int
    end: int


@dataclass(frozen=True)
class Image:
    alt: str
    src: str
    # zero-width anchor in the body where the image appeared
    position: int
    role: str = "image"  # image | icon | seal | logo


@dataclass(frozen=True)
class Marker:
    """An opt-in or opt-out control found in the document."""

    start: int
    end: int
    kind: str  # opt_in | opt_out


@dataclass(frozen=True)
class Section:
    heading: str
    start: int
    end: int
    links: tuple[Link, ...] = ()


@dataclass(frozen=True)
class Document:
    source_id: str
    body: str
    format: str = "text"  # text | markdown | html
    sections: tuple[Section, ...] = ()
    links: tuple[Link, ...] = ()
    images: tuple[Image, ...] = ()
    interactive_markers: tuple[Marker, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.body)
        spans = [(s.start, s.end) for s in self.sections]
        spans += [(l.start, l.end) for l in self.links]
        spans += [(m.start, m.end) for m in self.interactive_markers]
        spans += [(i.position, i.position) for i in self.images]
        for start, end in spans:
            if not 0 <= start <= end <= n:
                raise ValueError(f"span ({start}, {end}) outside body of length {n}")
        for a, b in zip(self.sections, self.sections[1:]):
            if b.start < a.end:
                raise ValueError("sections must be ordered and non-overlapping")

    def section_text(self, section: Section) -> str:
        return self.body[section.start : section.end]
