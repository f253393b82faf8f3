"""Flat ``key = value`` files with ``#`` comments and repeatable keys."""

from __future__ import annotations

from pathlib import Path


class KVError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def parse_kv(text: str, source: str = "<config>") -> list[tuple[str, str, int]]:
    """Return ``(key, value, line)`` triples in file order."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise KVError(f"expected 'key = value', got {line!r}", lineno, source)
        entries.append((key, value.strip(), lineno))
    return entries


def read_kv(path: str | Path) -> list[tuple[str, str, int]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise KVError(f"cannot read file: {exc.strerror or exc}", source=str(path)) from exc
    return parse_kv(text, str(path))


def parse_bool(value: str, line: int | None = None, source: str = "<config>") -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise KVError(f"expected a boolean, got {value!r}", line, source)
