"""Converters from common public vocabulary dumps to the toolkit's model format.

Conversion covers segmentation only (vocabulary, merges, markers). Options
that a source tokenizer applies outside segmentation, such as accent
stripping, must be matched by the caller.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FormatError
from .tokenizers import Kind, TokenizerModel

BERT_SPECIALS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


def wordpiece_from_vocab_txt(path: str | Path, name: str = "", lowercase: bool = False) -> TokenizerModel:
    """BERT-style ``vocab.txt``: one token per line, id = line number."""
    path = Path(path)
    vocab: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for i, line in enumerate(f):
            tok = line.rstrip("\r\n")
            if tok in vocab:
                continue  # some published vocabularies repeat entries; keep the first id
            vocab[tok] = i
    if not vocab:
        raise FormatError(f"{path}: empty vocabulary")
    specials = frozenset(t for t in BERT_SPECIALS if t in vocab)
    return TokenizerModel(Kind.WORDPIECE, vocab, specials=specials, lowercase=lowercase,
                          name=name or path.parent.name or path.stem)


def _read_merges_txt(path: Path) -> list[tuple[str, str]]:
    merges = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#version"):
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected two space-separated symbols")
            merges.append((parts[0], parts[1]))
    return merges


def byte_bpe_from_gpt2(vocab_json: str | Path, merges_txt: str | Path, name: str = "") -> TokenizerModel:
    """GPT-2 style ``vocab.json`` plus ``merges.txt``."""
    vocab_json = Path(vocab_json)
    try:
        vocab = json.loads(vocab_json.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{vocab_json}:{e.lineno}:{e.colno}: {e.msg}") from None
    merges = _read_merges_txt(Path(merges_txt))
    return TokenizerModel(Kind.BYTE_BPE, vocab, tuple(merges), name=name or vocab_json.parent.name)


def from_hf_tokenizer_json(path: str | Path, name: str = "") -> TokenizerModel:
    """A ``tokenizer.json`` with a WordPiece or byte-level BPE model."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    model = doc.get("model") or {}
    kind = model.get("type")
    name = name or path.parent.name
    added = frozenset(t["content"] for t in doc.get("added_tokens", []) if t.get("special"))
    if kind == "WordPiece":
        vocab = model["vocab"]
        norm = doc.get("normalizer") or {}
        return TokenizerModel(
            Kind.WORDPIECE,
            vocab,
            continuation_prefix=model.get("continuing_subword_prefix", "##"),
            unk_token=model.get("unk_token", "[UNK]"),
            max_word_chars=model.get("max_input_chars_per_word", 100),
            lowercase=bool(norm.get("lowercase", False)),
            specials=frozenset(t for t in added if t in vocab),
            name=name,
        )
    if kind == "BPE":
        vocab = model["vocab"]
        merges = []
        for i, m in enumerate(model.get("merges", [])):
            parts = m.split(" ") if isinstance(m, str) else list(m)
            if len(parts) != 2:
                raise FormatError(f"{path}: merges[{i}] is not a pair")
            merges.append((parts[0], parts[1]))
        return TokenizerModel(Kind.BYTE_BPE, vocab, tuple(merges),
                              specials=frozenset(t for t in added if t in vocab), name=name)
    raise FormatError(f"{path}: unsupported tokenizer model type {kind!r}")
