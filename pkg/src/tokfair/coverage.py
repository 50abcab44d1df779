"""Character coverage of vocabularies and byte-fallback (mojibake) diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DecodeError
from .registry import LanguageProfile, char_set
from .tokenizers import ByteRemapTable, Kind, TokenizerModel, token_bytes, tokenize


@dataclass(frozen=True)
class CoverageResult:
    code: str
    missing: int
    total: int
    missing_chars: tuple[str, ...] = ()

    @property
    def proportion(self) -> float:
        return self.missing / self.total


def surface_forms(model: TokenizerModel, ch: str) -> list[str]:
    """Vocabulary spellings under which ``ch`` counts as a standalone token."""
    if model.kind is Kind.BYTE_BPE:
        return [model.byte_remap.encode(ch.encode("utf-8"))]
    if model.kind is Kind.WORDPIECE:
        return [ch, model.continuation_prefix + ch]
    return [ch, model.boundary_marker + ch]


def missing_char_proportion(model: TokenizerModel, profile: LanguageProfile) -> CoverageResult:
    universe = char_set(profile)
    if not universe:
        raise ValueError(f"{profile.code}: empty character universe")
    vocab = model.vocab
    missing = tuple(
        chr(cp) for cp in universe if not any(f in vocab for f in surface_forms(model, chr(cp)))
    )
    return CoverageResult(profile.code, len(missing), len(universe), missing)


def _text_to_bytes(token_text: str) -> bytes | None:
    inverse = ByteRemapTable.standard().inverse
    out = bytearray()
    for ch in token_text:
        cp = ord(ch)
        if cp <= 0xFF:
            out.append(cp)
        elif ch in inverse:
            out.append(inverse[ch])
        else:
            return None
    return bytes(out)


def detect_mojibake(token_text: str) -> str | None:
    """Recover text whose UTF-8 bytes were rendered one byte per character.

    Characters up to U+00FF stand for their Latin-1 byte; the shifted
    characters of the byte remap table stand for their byte. The result is
    returned only when the bytes are valid UTF-8 and contain at least one
    multi-byte character.
    """
    data = _text_to_bytes(token_text)
    if data is None:
        return None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return None
    if all(ord(c) < 0x80 for c in text):
        return None
    return text


def is_ambiguous(model: TokenizerModel, token_text: str) -> bool:
    """True when a recovered token could also be genuine text.

    Byte-level tokens are byte sequences by construction, so their recovery
    is certain. Tokens of text vocabularies that stay within Latin-1 may be
    either real Latin-1 text or mis-decoded UTF-8.
    """
    return model.kind is not Kind.BYTE_BPE and all(ord(c) <= 0xFF for c in token_text)


_LEAD_SECOND = {0xE0: (0xA0, 0xBF), 0xED: (0x80, 0x9F), 0xF0: (0x90, 0xBF), 0xF4: (0x80, 0x8F)}


def _utf8_need(lead: int) -> int:
    if 0xC2 <= lead <= 0xDF:
        return 2
    if 0xE0 <= lead <= 0xEF:
        return 3
    if 0xF0 <= lead <= 0xF4:
        return 4
    return 0


def is_char_fragment(data: bytes) -> bool:
    """True when ``data`` is a strict substring of one codepoint's UTF-8 encoding."""
    n = len(data)
    if not 1 <= n <= 3:
        return False
    if all(0x80 <= b <= 0xBF for b in data):
        return True  # suffix or infix of some multi-byte character
    need = _utf8_need(data[0])
    if need == 0 or n >= need:
        return False
    if not all(0x80 <= b <= 0xBF for b in data[1:]):
        return False
    if n >= 2 and data[0] in _LEAD_SECOND:
        lo, hi = _LEAD_SECOND[data[0]]
        return lo <= data[1] <= hi
    return True


@dataclass(frozen=True)
class TokenInspection:
    token: str
    id: int
    raw_bytes: bytes
    recovered: str | None
    fragment_of_char: bool
    ambiguous: bool = False

    def as_dict(self) -> dict:
        return {
            "token": self.token,
            "id": self.id,
            "raw_bytes": self.raw_bytes.hex(" ").upper(),
            "recovered": self.recovered,
            "fragment_of_char": self.fragment_of_char,
            "ambiguous": self.ambiguous,
        }


def inspect(model: TokenizerModel, text: str) -> list[TokenInspection]:
    seq = tokenize(model, text)
    records = []
    for tok, tid in zip(seq.tokens, seq.ids):
        try:
            raw = token_bytes(model, tok)
        except DecodeError:
            raw = tok.encode("utf-8")
        recovered = detect_mojibake(tok)
        records.append(
            TokenInspection(
                token=tok,
                id=tid,
                raw_bytes=raw,
                recovered=recovered,
                fragment_of_char=is_char_fragment(raw),
                ambiguous=recovered is not None and is_ambiguous(model, tok),
            )
        )
    return records


def format_dump(records: list[TokenInspection]) -> str:
    """Aligned, human-readable listing of :func:`inspect` output."""
    rows = [("#", "token", "id", "bytes", "recovered", "frag")]
    for i, r in enumerate(records):
        rows.append(
            (
                str(i),
                repr(r.token),
                str(r.id),
                r.raw_bytes.hex(" ").upper(),
                (r.recovered or "") + (" (?)" if r.ambiguous else ""),
                "yes" if r.fragment_of_char else "",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows) + "\n"
