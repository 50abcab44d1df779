"""Information parity: reference-language NLL over target-language NLL.

Real LLM likelihoods are computed elsewhere and ingested from a
tab-separated file::

    # base=bits
    code	line_index	nll
    eng_Latn	0	41.5
    deu_Latn	0	47.25

``base=nats`` is also accepted and converted to bits. The built-in
:class:`NgramScorer` is a byte-level stand-in that needs no model weights.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import _kernels
from .corpus import ParallelCorpus
from .errors import ConfigError, DataError, EmptyStatisticError, FormatError, UndefinedRatioError

ALPHABET = 256
DEFAULT_ORDER = 3
DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class NLLRecord:
    code: str
    line_index: int
    nll_bits: float


@dataclass(frozen=True)
class IPStat:
    code: str
    corpus_ip: float
    mean_ip: float
    n_used: int
    n_skipped: int


@dataclass(frozen=True, eq=False)
class NgramScorer:
    """Additively smoothed byte n-gram model with a fixed 256-symbol alphabet.

    ``pair_counts`` is keyed by ``(context_key << 8) | byte`` and ``totals``
    by ``context_key``; see :func:`tokfair._kernels.ctx_key`.
    """

    order: int
    alpha: float
    pair_counts: dict = field(default_factory=dict, repr=False)
    totals: dict = field(default_factory=dict, repr=False)
    alphabet_size: int = ALPHABET

    def prob(self, context: bytes, byte: int) -> float:
        context = context[-self.order:] if self.order else b""
        key = _kernels.ctx_key(context, 0, len(context))
        c = self.pair_counts.get((key << 8) | byte, 0)
        return (c + self.alpha) / (self.totals.get(key, 0) + self.alpha * ALPHABET)

    def contexts(self) -> dict[bytes, dict[int, int]]:
        """Readable view: context bytes -> {next byte: count}."""
        out: dict[bytes, dict[int, int]] = {}
        for slot, c in self.pair_counts.items():
            key, byte = slot >> 8, slot & 0xFF
            ctx = key.to_bytes((key.bit_length() + 7) // 8, "big")[1:] if key > 1 else b""
            out.setdefault(ctx, {})[byte] = c
        return out


def _as_bytes(text) -> bytes:
    return text.encode("utf-8") if isinstance(text, str) else bytes(text)


def train_ngram(text, order: int = DEFAULT_ORDER, alpha: float = DEFAULT_ALPHA) -> NgramScorer:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0 <= order <= _kernels.CTX_ORDER_MAX:
        raise ValueError(f"order must be in [0, {_kernels.CTX_ORDER_MAX}]")
    data = _as_bytes(text)
    if order > 0 and not data:
        warnings.warn("empty training text: n-gram scorer is uniform", stacklevel=2)
    scorer = NgramScorer(order, float(alpha))
    _kernels.ngram_count(data, order, scorer.pair_counts, scorer.totals)
    return scorer


def score_nll(scorer: NgramScorer, text) -> float:
    """Total NLL in bits; the first ``order`` bytes see a truncated context."""
    data = _as_bytes(text)
    if not data:
        return 0.0
    return _kernels.ngram_nll(data, scorer.order, scorer.pair_counts, scorer.totals, scorer.alpha)


def train_scorers(
    texts: Mapping[str, bytes | str],
    order: int = DEFAULT_ORDER,
    alpha: float = DEFAULT_ALPHA,
    budget: int | None = None,
) -> dict[str, NgramScorer]:
    """One scorer per language, all trained on the same number of bytes.

    The budget defaults to the smallest training text.
    """
    data = {c: _as_bytes(t) for c, t in texts.items()}
    if budget is None:
        budget = min((len(d) for d in data.values()), default=0)
    return {c: train_ngram(d[:budget], order, alpha) for c, d in data.items()}


def compute_ip(nll_ref: float, nll_lang: float) -> float:
    if nll_lang == 0:
        raise UndefinedRatioError("target NLL is zero; information parity is undefined")
    return nll_ref / nll_lang


def aggregate_ip(code: str, ref_nlls: Sequence[float], lang_nlls: Sequence[float], n_missing: int = 0) -> IPStat:
    pairs = [(r, l) for r, l in zip(ref_nlls, lang_nlls) if l > 0]
    if not pairs:
        raise EmptyStatisticError(f"{code}: every target line has zero NLL")
    ref_total = math.fsum(r for r, _ in pairs)
    if ref_total == 0:
        raise EmptyStatisticError(f"{code}: reference NLL sums to zero")
    return IPStat(
        code=code,
        corpus_ip=ref_total / math.fsum(l for _, l in pairs),
        mean_ip=math.fsum(r / l for r, l in pairs) / len(pairs),
        n_used=len(pairs),
        n_skipped=len(ref_nlls) - len(pairs) + n_missing,
    )


def corpus_ip(scorers: Mapping[str, NgramScorer], corpus: ParallelCorpus, code: str) -> IPStat:
    for c in (code, corpus.ref_code):
        if c not in scorers:
            raise ConfigError(f"no scorer for {c}")
    if code not in corpus:
        raise ConfigError(f"{code} is not in the corpus")
    ref_scorer = scorers[corpus.ref_code]
    ref_nlls = [score_nll(ref_scorer, s) for s in corpus[corpus.ref_code]]
    if code == corpus.ref_code:
        lang_nlls = ref_nlls
    else:
        lang_nlls = [score_nll(scorers[code], s) for s in corpus[code]]
    return aggregate_ip(code, ref_nlls, lang_nlls)


def parse_nll_lines(lines: Sequence[str], source: str = "<nll>") -> list[NLLRecord]:
    header_seen = False
    scale = 1.0
    records = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if not header_seen:
            key, _, value = line.lstrip("#").strip().partition("=")
            if key.strip() != "base" or value.strip() not in ("bits", "nats"):
                raise FormatError(f"{source}:{lineno}: expected header '# base=bits' or '# base=nats'")
            scale = 1.0 if value.strip() == "bits" else 1.0 / math.log(2)
            header_seen = True
            continue
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if parts[:2] == ["code", "line_index"]:
            continue
        if len(parts) != 3:
            raise FormatError(f"{source}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
        try:
            idx = int(parts[1])
            value = float(parts[2])
        except ValueError:
            raise FormatError(f"{source}:{lineno}: bad line index or NLL value") from None
        if idx < 0:
            raise DataError(f"{source}:{lineno}: negative line index {idx}")
        if not math.isfinite(value) or value < 0:
            raise DataError(f"{source}:{lineno}: NLL must be finite and non-negative, got {parts[2]}")
        records.append(NLLRecord(parts[0], idx, value * scale))
    if not header_seen:
        raise FormatError(f"{source}: missing '# base=...' header")
    return records


def ingest_external_nll(path: str | Path) -> list[NLLRecord]:
    path = Path(path)
    return parse_nll_lines(path.read_text(encoding="utf-8").splitlines(), str(path))


def format_nll_records(records: Sequence[NLLRecord]) -> str:
    rows = ["# base=bits", "code\tline_index\tnll"]
    rows += [f"{r.code}\t{r.line_index}\t{r.nll_bits!r}" for r in records]
    return "\n".join(rows) + "\n"


def corpus_ip_from_records(
    records: Sequence[NLLRecord], ref_code: str, code: str, n_lines: int | None = None
) -> IPStat:
    """IP from externally computed NLLs. Lines lacking a partner count as skipped."""
    by_code: dict[str, dict[int, float]] = {}
    for r in records:
        if n_lines is not None and r.line_index >= n_lines:
            raise DataError(f"{r.code} line {r.line_index} is outside the corpus ({n_lines} lines)")
        slot = by_code.setdefault(r.code, {})
        if r.line_index in slot:
            raise DataError(f"duplicate record for {r.code} line {r.line_index}")
        slot[r.line_index] = r.nll_bits
    for c in (ref_code, code):
        if c not in by_code:
            raise ConfigError(f"no NLL records for {c}")
    ref, lang = by_code[ref_code], by_code[code]
    shared = sorted(set(ref) & set(lang))
    missing = len(set(ref) ^ set(lang))
    return aggregate_ip(code, [ref[i] for i in shared], [lang[i] for i in shared], missing)
