"""Subword tokenizers: byte-level BPE, WordPiece and boundary-marker greedy.

Models are read from a neutral JSON file::

    {
      "name": "toy",
      "kind": "byte_bpe",                 # or "wordpiece", "boundary_greedy"
      "vocab": {"h": 0, "e": 1, "he": 256},
      "merges": [["h", "e"]],             # byte_bpe only, rank = position
      "unk_token": "[UNK]",
      "specials": ["<|endoftext|>"],
      "lowercase": false,
      "normalize": "none"                 # or "nfc", "nfkc"
    }

Byte-level token strings are stored in their printable remapped form (a
space byte is ``"Ġ"``), other kinds store raw text.
"""

from __future__ import annotations

import enum
import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import _kernels
from .errors import DecodeError, FormatError, IntegrityError

DEFAULT_PRETOKENIZE = r" ?\S+|\s+(?!\S)|\s+"
BYTE_FALLBACK_RE = re.compile(r"<0x([0-9A-Fa-f]{2})>")


class Kind(str, enum.Enum):
    BYTE_BPE = "byte_bpe"
    WORDPIECE = "wordpiece"
    BOUNDARY_GREEDY = "boundary_greedy"

    @classmethod
    def parse(cls, value: str) -> Kind:
        key = re.sub(r"[^a-z]", "", str(value).lower())
        for kind in cls:
            if kind.value.replace("_", "") == key:
                return kind
        raise FormatError(f"unknown tokenizer kind: {value!r}")


@dataclass(frozen=True)
class ByteRemapTable:
    """Bijection between the 256 byte values and printable characters.

    Printable Latin-1 bytes keep their own codepoint; the remaining 68
    (controls, space, DEL, NBSP, soft hyphen) are shifted to U+0100 and up,
    in byte order.
    """

    forward: tuple[str, ...]
    inverse: Mapping[str, int]

    @classmethod
    @lru_cache(maxsize=None)
    def standard(cls) -> ByteRemapTable:
        keep = (
            list(range(ord("!"), ord("~") + 1))
            + list(range(ord("¡"), ord("¬") + 1))
            + list(range(ord("®"), ord("ÿ") + 1))
        )
        kept = set(keep)
        forward = [""] * 256
        shift = 0
        for b in range(256):
            if b in kept:
                forward[b] = chr(b)
            else:
                forward[b] = chr(256 + shift)
                shift += 1
        return cls(tuple(forward), {ch: b for b, ch in enumerate(forward)})

    @cached_property
    def _encode_table(self) -> dict[int, str]:
        return {b: ch for b, ch in enumerate(self.forward) if ord(ch) != b}

    @cached_property
    def _decode_table(self) -> dict[int, int]:
        # unmapped Latin-1 codepoints go to U+FFFF so the latin-1 encode step rejects them
        table = {cp: 0xFFFF for cp in range(256) if chr(cp) not in self.inverse}
        table.update((ord(ch), b) for ch, b in self.inverse.items())
        return table

    def encode(self, data: bytes) -> str:
        return data.decode("latin-1").translate(self._encode_table)

    def decode(self, text: str) -> bytes:
        try:
            return text.translate(self._decode_table).encode("latin-1")
        except UnicodeEncodeError as e:
            raise DecodeError(f"character {text[e.start]!r} is not in the byte remap table") from None


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[str, ...]
    ids: tuple[int, ...]
    count: int

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, eq=False)
class TokenizerModel:
    kind: Kind
    vocab: Mapping[str, int]
    merges: tuple[tuple[str, str], ...] = ()
    continuation_prefix: str = "##"
    boundary_marker: str = "▁"
    unk_token: str = "[UNK]"
    specials: frozenset[str] = frozenset()
    lowercase: bool = False
    normalize: str = "none"
    name: str = ""
    pretokenize: str = DEFAULT_PRETOKENIZE
    split_punctuation: bool = True
    max_word_chars: int = 100
    byte_fallback: bool = False
    byte_remap: ByteRemapTable | None = None
    _state: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.normalize not in ("none", "nfc", "nfkc"):
            raise FormatError(f"normalize must be none, nfc or nfkc, got {self.normalize!r}")
        ids = list(self.vocab.values())
        if len(set(ids)) != len(ids):
            raise IntegrityError("vocabulary ids are not unique")
        missing = sorted(s for s in self.specials if s not in self.vocab)
        if missing:
            raise IntegrityError(f"special tokens missing from vocab: {missing}")
        if self.kind is Kind.BYTE_BPE:
            if self.byte_remap is None:
                object.__setattr__(self, "byte_remap", ByteRemapTable.standard())
            absent = [ch for ch in self.byte_remap.forward if ch not in self.vocab]
            if absent:
                raise IntegrityError(
                    f"byte-level vocab lacks {len(absent)} single-byte symbols, e.g. {absent[0]!r}"
                )
            for left, right in self.merges:
                if left + right not in self.vocab:
                    raise IntegrityError(f"merge ({left!r}, {right!r}) produces {left + right!r}, absent from vocab")
        elif self.unk_token not in self.vocab:
            raise IntegrityError(f"unk token {self.unk_token!r} missing from vocab")

    # -- lazily built lookup structures ------------------------------------

    @property
    def id_to_token(self) -> dict[int, str]:
        table = self._state.get("id_to_token")
        if table is None:
            table = self._state["id_to_token"] = {i: t for t, i in self.vocab.items()}
        return table

    @property
    def pair_table(self) -> dict[int, tuple[int, int]]:
        table = self._state.get("pair_table")
        if table is None:
            table = {}
            for rank, (left, right) in enumerate(self.merges):
                li, ri = self.vocab.get(left), self.vocab.get(right)
                if li is None or ri is None:
                    continue  # unreachable: every produced symbol is in vocab
                table.setdefault((li << 32) | ri, (rank, self.vocab[left + right]))
            self._state["pair_table"] = table
        return table

    @property
    def max_token_chars(self) -> int:
        n = self._state.get("max_len")
        if n is None:
            n = self._state["max_len"] = max((len(t) for t in self.vocab), default=1)
        return n

    def __len__(self) -> int:
        return len(self.vocab)


# -- core algorithms --------------------------------------------------------


def apply_bpe(merges: Sequence[tuple[str, str]], symbols: Sequence[str]) -> list[str]:
    """Merge adjacent symbols by rank until no ranked pair is left.

    Each round merges exactly one pair: the lowest-ranked one, leftmost on
    ties. Duplicate merges keep their first rank.
    """
    intern: dict[str, int] = {}

    def sid(s):
        i = intern.get(s)
        if i is None:
            i = intern[s] = len(intern)
        return i

    ids = [sid(s) for s in symbols]
    table: dict[int, tuple[int, int]] = {}
    for rank, (left, right) in enumerate(merges):
        table.setdefault((sid(left) << 32) | sid(right), (rank, sid(left + right)))
    names = list(intern)
    return [names[i] for i in _kernels.merge_ids(ids, table)]


def wordpiece_match(model: TokenizerModel, word: str) -> list[str]:
    """Greedy longest-prefix segmentation of one whitespace-free word."""
    if len(word) > model.max_word_chars:
        return [model.unk_token]
    vocab = model.vocab
    prefix = model.continuation_prefix
    pieces = []
    start = 0
    n = len(word)
    while start < n:
        end = n
        piece = None
        while end > start:
            cand = word[start:end]
            if start > 0:
                cand = prefix + cand
            if cand in vocab:
                piece = cand
                break
            end -= 1
        if piece is None:
            return [model.unk_token]
        pieces.append(piece)
        start = end
    return pieces


def _is_punctuation(ch: str) -> bool:
    cp = ord(ch)
    if 33 <= cp <= 47 or 58 <= cp <= 64 or 91 <= cp <= 96 or 123 <= cp <= 126:
        return True
    return unicodedata.category(ch).startswith("P")


def _is_cjk(cp: int) -> bool:
    return (
        0x4E00 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0x20000 <= cp <= 0x2A6DF
        or 0x2A700 <= cp <= 0x2CEAF
        or 0xF900 <= cp <= 0xFAFF
        or 0x2F800 <= cp <= 0x2FA1F
    )


def split_words(text: str, split_punctuation: bool = True) -> list[str]:
    """Whitespace split; punctuation and CJK ideographs become their own words."""
    words = []
    for chunk in text.split():
        if not split_punctuation:
            words.append(chunk)
            continue
        buf = []
        for ch in chunk:
            if _is_punctuation(ch) or _is_cjk(ord(ch)):
                if buf:
                    words.append("".join(buf))
                    buf = []
                words.append(ch)
            else:
                buf.append(ch)
        if buf:
            words.append("".join(buf))
    return words


def _prepare(model: TokenizerModel, text: str) -> str:
    if model.normalize != "none":
        text = unicodedata.normalize(model.normalize.upper(), text)
    if model.lowercase:
        text = text.lower()
    return text


def pretokenize(model: TokenizerModel, text: str) -> list[str]:
    """Byte-level chunks; non-initial words carry their leading space."""
    pattern = model._state.get("pattern")
    if pattern is None:
        pattern = model._state["pattern"] = re.compile(model.pretokenize)
    return pattern.findall(text)


CHUNK_CACHE_MAX = 200_000


def _bpe_table(model: TokenizerModel):
    table = model._state.get("bpe_table")
    if table is None:
        byte_ids = [model.vocab[ch] for ch in model.byte_remap.forward]
        table = model._state["bpe_table"] = _kernels.BPETable(model.pair_table, byte_ids)
    return table


def _greedy_word(model: TokenizerModel, word: str) -> list[str]:
    vocab = model.vocab
    maxlen = model.max_token_chars
    out = []
    i = 0
    n = len(word)
    while i < n:
        j = min(n, i + maxlen)
        while j > i and word[i:j] not in vocab:
            j -= 1
        if j > i:
            out.append(word[i:j])
            i = j
            continue
        ch = word[i]
        byte_toks = [f"<0x{b:02X}>" for b in ch.encode("utf-8")]
        if model.byte_fallback and all(t in vocab for t in byte_toks):
            out.extend(byte_toks)
        else:
            out.append(model.unk_token)
        i += 1
    return out


def tokenize(model: TokenizerModel, text: str) -> TokenSeq:
    """Segment ``text``; specials are never injected and never counted."""
    text = _prepare(model, text)
    if model.kind is Kind.BYTE_BPE:
        cache = model._state.setdefault("chunk_cache", {})
        ids = _bpe_table(model).encode_chunks(pretokenize(model, text), cache, CHUNK_CACHE_MAX)
        names = model.id_to_token
        tokens = [names[i] for i in ids]
    else:
        tokens = []
        if model.kind is Kind.WORDPIECE:
            for word in split_words(text, model.split_punctuation):
                tokens.extend(wordpiece_match(model, word))
        else:
            for word in text.split():
                tokens.extend(_greedy_word(model, model.boundary_marker + word))
        vocab = model.vocab
        ids = [vocab[t] for t in tokens]
    specials = model.specials
    count = len(tokens) - sum(1 for t in tokens if t in specials) if specials else len(tokens)
    return TokenSeq(tuple(tokens), tuple(ids), count)


def token_bytes(model: TokenizerModel, token: str) -> bytes:
    """Bytes a single token stands for (prefixes and markers resolved)."""
    if model.kind is Kind.BYTE_BPE:
        return model.byte_remap.decode(token)
    if model.kind is Kind.WORDPIECE:
        if token.startswith(model.continuation_prefix) and token != model.continuation_prefix:
            token = token[len(model.continuation_prefix):]
        return token.encode("utf-8")
    m = BYTE_FALLBACK_RE.fullmatch(token)
    if m:
        return bytes([int(m.group(1), 16)])
    return token.replace(model.boundary_marker, " ").encode("utf-8")


def detokenize(model: TokenizerModel, seq: TokenSeq | Iterable[str]) -> str:
    """Inverse of :func:`tokenize`.

    Byte-level models are lossless. WordPiece rejoins words with single
    spaces (so split punctuation comes back space-separated) and boundary
    models rebuild spaces from markers; ``unk_token`` stays literal.
    """
    tokens = seq.tokens if isinstance(seq, TokenSeq) else tuple(seq)
    if model.kind is Kind.BYTE_BPE:
        data = model.byte_remap.decode("".join(tokens))
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DecodeError(f"token bytes are not valid UTF-8 at offset {e.start}") from None
    if model.kind is Kind.WORDPIECE:
        prefix = model.continuation_prefix
        words: list[str] = []
        for t in tokens:
            if words and t.startswith(prefix) and t != prefix:
                words[-1] += t[len(prefix):]
            else:
                words.append(t)
        return " ".join(words)
    buf = bytearray()
    for t in tokens:
        buf += token_bytes(model, t)
    text = buf.decode("utf-8", errors="replace")
    return text[1:] if text.startswith(" ") else text


# -- model files -------------------------------------------------------------


def _parse_merges(raw, source: str) -> tuple[tuple[str, str], ...]:
    merges = []
    for i, m in enumerate(raw or []):
        if isinstance(m, str):
            parts = m.split(" ")
        else:
            parts = list(m) if isinstance(m, (list, tuple)) else None
        if not parts or len(parts) != 2 or not all(isinstance(p, str) and p for p in parts):
            raise FormatError(f"{source}: merges[{i}] must be a pair of non-empty strings")
        merges.append((parts[0], parts[1]))
    return tuple(merges)


def model_from_dict(doc: Mapping, source: str = "<model>") -> TokenizerModel:
    if not isinstance(doc, Mapping):
        raise FormatError(f"{source}: expected a JSON object")
    if "kind" not in doc:
        raise FormatError(f"{source}: missing field 'kind'")
    kind = Kind.parse(doc["kind"])
    vocab = doc.get("vocab")
    if isinstance(vocab, list):
        vocab = {t: i for i, t in enumerate(vocab)}
    if not isinstance(vocab, Mapping) or not vocab:
        raise FormatError(f"{source}: 'vocab' must be a non-empty object or list")
    for t, i in vocab.items():
        if not isinstance(i, int) or isinstance(i, bool) or i < 0:
            raise FormatError(f"{source}: vocab[{t!r}] must be a non-negative integer id")
    kwargs = {
        "kind": kind,
        "vocab": dict(vocab),
        "merges": _parse_merges(doc.get("merges"), source) if kind is Kind.BYTE_BPE else (),
        "specials": frozenset(doc.get("specials", ())),
        "lowercase": bool(doc.get("lowercase", False)),
        "normalize": str(doc.get("normalize", "none")).lower(),
        "name": str(doc.get("name", "")),
    }
    for key in ("continuation_prefix", "boundary_marker", "unk_token", "pretokenize"):
        if key in doc:
            kwargs[key] = str(doc[key])
    for key in ("split_punctuation", "byte_fallback"):
        if key in doc:
            kwargs[key] = bool(doc[key])
    if "max_word_chars" in doc:
        kwargs["max_word_chars"] = int(doc["max_word_chars"])
    try:
        return TokenizerModel(**kwargs)
    except IntegrityError as e:
        raise IntegrityError(f"{source}: {e}") from None


def load_tokenizer(path: str | Path) -> TokenizerModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    model = model_from_dict(doc, str(path))
    if not model.name:
        object.__setattr__(model, "name", path.stem)
    return model


def model_to_dict(model: TokenizerModel) -> dict:
    doc = {
        "name": model.name,
        "kind": model.kind.value,
        "vocab": dict(sorted(model.vocab.items(), key=lambda kv: kv[1])),
    }
    if model.kind is Kind.BYTE_BPE:
        doc["merges"] = [list(m) for m in model.merges]
        if model.pretokenize != DEFAULT_PRETOKENIZE:
            doc["pretokenize"] = model.pretokenize
    else:
        doc["unk_token"] = model.unk_token
    if model.kind is Kind.WORDPIECE:
        doc["continuation_prefix"] = model.continuation_prefix
        doc["split_punctuation"] = model.split_punctuation
        doc["max_word_chars"] = model.max_word_chars
    if model.kind is Kind.BOUNDARY_GREEDY:
        doc["boundary_marker"] = model.boundary_marker
        doc["byte_fallback"] = model.byte_fallback
    doc["specials"] = sorted(model.specials)
    doc["lowercase"] = model.lowercase
    doc["normalize"] = model.normalize
    return doc


def save_tokenizer(model: TokenizerModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
