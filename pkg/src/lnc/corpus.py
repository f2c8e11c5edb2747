"""Loader for fixture languages.

A corpus directory holds ``.sos`` files plus a ``manifest.tsv`` with one
tab-separated line per file: name, relative path, expected outcome (``pass``
or ``fail:<part>``) and a free-text description.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .sos import LanguageDef, ParseError, parse_language

MANIFEST = "manifest.tsv"


class CorpusError(Exception):
    pass


class MissingFile(CorpusError):
    pass


class ManifestMismatch(CorpusError):
    pass


class CorpusParseError(CorpusError):
    """A corpus file does not parse; a defect of the corpus, not a verdict."""

    def __init__(self, path: Path, error: ParseError):
        super().__init__(f"{path}: {error}")
        self.path = path
        self.error = error


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    path: Path
    expected_part: int | None  # None means the language is expected to pass
    description: str
    language: LanguageDef

    @property
    def expected(self) -> str:
        return "pass" if self.expected_part is None else f"fail:{self.expected_part}"


def _parse_expected(text: str, where: str) -> int | None:
    if text == "pass":
        return None
    kind, _, part = text.partition(":")
    if kind == "fail" and part in ("1", "2", "3", "4", "5"):
        return int(part)
    raise ManifestMismatch(f"{where}: expected 'pass' or 'fail:<1-5>', got {text!r}")


def load_corpus(directory) -> list[CorpusEntry]:
    """Load every manifest entry of ``directory`` in manifest order."""
    root = Path(directory)
    if not root.is_dir():
        raise MissingFile(f"{root}: not a directory")
    manifest = root / MANIFEST
    on_disk = {p.relative_to(root).as_posix() for p in root.rglob("*.sos")}
    if not manifest.exists():
        if on_disk:
            raise ManifestMismatch(f"{root}: .sos files present but no {MANIFEST}")
        return []

    entries = []
    listed = set()
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        where = f"{manifest}:{lineno}"
        fields = line.split("\t")
        if len(fields) != 4:
            raise ManifestMismatch(f"{where}: expected 4 tab-separated fields, got {len(fields)}")
        name, rel, expected, description = fields
        path = root / rel
        if not path.is_file():
            raise MissingFile(f"{where}: {rel} does not exist")
        try:
            language = parse_language(path.read_text(encoding="utf-8"))
        except ParseError as err:
            raise CorpusParseError(path, err) from None
        listed.add(Path(rel).as_posix())
        entries.append(CorpusEntry(name, path, _parse_expected(expected, where), description, language))

    unlisted = sorted(on_disk - listed)
    if unlisted:
        raise ManifestMismatch(f"{root}: files missing from {MANIFEST}: {', '.join(unlisted)}")
    return entries
