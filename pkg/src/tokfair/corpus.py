"""Line-aligned parallel corpora (FLORES layout: one ``<code>.txt`` per language)."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import AlignmentError, ConfigError, CorpusEncodingError, FormatError


@dataclass(frozen=True)
class ParallelCorpus:
    ref_code: str
    languages: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if self.ref_code not in self.languages:
            raise ConfigError(f"reference {self.ref_code!r} missing from corpus")
        counts = {c: len(s) for c, s in self.languages.items()}
        if len(set(counts.values())) > 1:
            raise AlignmentError(f"unequal line counts: {counts}")

    @property
    def n_lines(self) -> int:
        return len(self.languages[self.ref_code])

    @property
    def codes(self) -> list[str]:
        return list(self.languages)

    def __getitem__(self, code: str) -> tuple[str, ...]:
        return self.languages[code]

    def __contains__(self, code: str) -> bool:
        return code in self.languages

    @classmethod
    def from_lists(cls, ref_code: str, languages: Mapping[str, Sequence[str]]) -> ParallelCorpus:
        return cls(ref_code, {c: tuple(s) for c, s in languages.items()})

    def concat(self, other: ParallelCorpus) -> ParallelCorpus:
        if other.ref_code != self.ref_code or set(other.languages) != set(self.languages):
            raise ConfigError("corpora cover different languages")
        return ParallelCorpus(self.ref_code, {c: s + other.languages[c] for c, s in self.languages.items()})

    def select(self, indices: Sequence[int]) -> ParallelCorpus:
        return ParallelCorpus(self.ref_code, {c: tuple(s[i] for i in indices) for c, s in self.languages.items()})


def read_lines(path: Path) -> list[str]:
    """Decode a UTF-8 file into lines; CRLF and LF both end a line.

    A final newline does not create an extra empty sentence; interior empty
    lines are kept.
    """
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusEncodingError(f"{path}: invalid UTF-8 at byte offset {e.start}") from None
    if text.startswith("\ufeff"):
        text = text[1:]
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def load_manifest(path: str | Path) -> dict[str, Path]:
    """A JSON object mapping language code to file path (relative to the manifest)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or not all(isinstance(v, str) for v in doc.values()):
        raise FormatError(f"{path}: manifest must map language codes to path strings")
    return {code: (path.parent / p) for code, p in doc.items()}


def load_parallel(
    directory: str | Path,
    codes: Sequence[str],
    ref_code: str,
    manifest: Mapping[str, Path] | None = None,
) -> ParallelCorpus:
    """Load ``<code>.txt`` for every code (plus the reference) and check alignment."""
    directory = Path(directory)
    manifest = manifest or {}
    wanted = [ref_code] + [c for c in dict.fromkeys(codes) if c != ref_code]
    languages = {}
    for code in wanted:
        path = Path(manifest[code]) if code in manifest else directory / f"{code}.txt"
        if not path.is_file():
            raise FileNotFoundError(f"no corpus file for {code}: {path}")
        languages[code] = tuple(read_lines(path))
    counts = {c: len(s) for c, s in languages.items()}
    if len(set(counts.values())) > 1:
        detail = ", ".join(f"{c}.txt={n}" for c, n in counts.items() if n != counts[ref_code])
        raise AlignmentError(
            f"line counts differ from reference {ref_code}.txt={counts[ref_code]}: {detail}"
        )
    return ParallelCorpus(ref_code, languages)


def subsample(corpus: ParallelCorpus, n: int, seed: int = 0) -> ParallelCorpus:
    """Pick the same ``n`` line indices in every language, kept in file order."""
    if not 1 <= n <= corpus.n_lines:
        raise ValueError(f"sample size must be in [1, {corpus.n_lines}], got {n}")
    if n == corpus.n_lines:
        return corpus
    indices = sorted(random.Random(seed).sample(range(corpus.n_lines), n))
    return corpus.select(indices)
