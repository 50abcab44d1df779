"""Tokenization parity: token-count premiums of a language over a reference."""

from __future__ import annotations

import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .corpus import ParallelCorpus
from .errors import ConfigError, EmptyStatisticError, TokfairError
from .tokenizers import TokenizerModel, tokenize


@dataclass(frozen=True)
class PremiumSample:
    line_index: int
    len_lang: int
    len_ref: int

    @property
    def skipped(self) -> bool:
        return self.len_ref == 0

    @property
    def exact_ratio(self) -> Fraction | None:
        return None if self.skipped else Fraction(self.len_lang, self.len_ref)

    @property
    def ratio(self) -> float | None:
        return None if self.skipped else self.len_lang / self.len_ref


@dataclass(frozen=True)
class TPStat:
    code: str
    corpus_ratio: float
    mean_ratio: float
    median_ratio: float
    stdev_ratio: float
    n_used: int
    n_skipped: int
    samples: tuple[PremiumSample, ...] = field(default=(), repr=False, compare=False)


def sentence_premium(model: TokenizerModel, s_lang: str, s_ref: str, line_index: int = 0) -> PremiumSample:
    return PremiumSample(line_index, tokenize(model, s_lang).count, tokenize(model, s_ref).count)


def aggregate_premiums(code: str, samples: Sequence[PremiumSample]) -> TPStat:
    """Total-token ratio plus the distribution of per-sentence ratios.

    Sums stay integers and per-sentence ratios stay exact fractions until the
    final conversion, so the result does not depend on sample order.
    """
    used = [s for s in samples if not s.skipped]
    if not used:
        raise EmptyStatisticError(f"{code}: every reference sentence is empty")
    lang_total = sum(s.len_lang for s in used)
    ref_total = sum(s.len_ref for s in used)
    ratios = [s.exact_ratio for s in used]
    return TPStat(
        code=code,
        corpus_ratio=float(Fraction(lang_total, ref_total)),
        mean_ratio=float(sum(ratios, Fraction(0)) / len(ratios)),
        median_ratio=float(statistics.median(ratios)),
        stdev_ratio=float(statistics.pstdev(ratios)),
        n_used=len(used),
        n_skipped=len(samples) - len(used),
        samples=tuple(samples),
    )


def _counts(model: TokenizerModel, sentences: Sequence[str], workers: int) -> list[int]:
    if workers <= 1:
        return [tokenize(model, s).count for s in sentences]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda s: tokenize(model, s).count, sentences))


def corpus_tp(model: TokenizerModel, corpus: ParallelCorpus, code: str, workers: int = 1) -> TPStat:
    if code not in corpus:
        raise ConfigError(f"{code} is not in the corpus")
    ref_counts = _counts(model, corpus[corpus.ref_code], workers)
    lang_counts = ref_counts if code == corpus.ref_code else _counts(model, corpus[code], workers)
    return _from_counts(code, lang_counts, ref_counts)


def _from_counts(code: str, lang_counts: Sequence[int], ref_counts: Sequence[int]) -> TPStat:
    samples = [PremiumSample(i, a, b) for i, (a, b) in enumerate(zip(lang_counts, ref_counts))]
    return aggregate_premiums(code, samples)


@dataclass
class TPReport:
    """Model x language matrix of :class:`TPStat`; failed cells hold the error text."""

    models: list[str]
    codes: list[str]
    cells: dict[tuple[str, str], TPStat | str]

    def __iter__(self):
        for m in self.models:
            for c in self.codes:
                yield m, c, self.cells[(m, c)]

    def errors(self) -> dict[tuple[str, str], str]:
        return {k: v for k, v in self.cells.items() if isinstance(v, str)}


def tp_table(models: Sequence[TokenizerModel], corpus: ParallelCorpus, codes: Sequence[str]) -> TPReport:
    names = []
    for i, m in enumerate(models):
        name = m.name or f"model{i}"
        if name in names:
            name = f"{name}#{i}"
        names.append(name)
    cells: dict[tuple[str, str], TPStat | str] = {}
    for name, model in zip(names, models):
        # reference counts are shared by every language of one model
        ref_counts = _counts(model, corpus[corpus.ref_code], 1)
        for code in codes:
            try:
                if code not in corpus:
                    raise ConfigError(f"{code} is not in the corpus")
                lang_counts = ref_counts if code == corpus.ref_code else _counts(model, corpus[code], 1)
                cells[(name, code)] = _from_counts(code, lang_counts, ref_counts)
            except TokfairError as e:
                cells[(name, code)] = str(e)
    return TPReport(names, list(codes), cells)
