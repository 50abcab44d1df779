"""Pearson correlation of bias metrics against downstream task scores."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InsufficientDataError, UndefinedCorrelationError
from .registry import Registry, Script, Tier, category_label, classify

SMALL_N = 8


@dataclass(frozen=True)
class MetricVector:
    name: str
    values: Mapping[str, float]
    model_name: str = ""

    def __post_init__(self):
        bad = [c for c, v in self.values.items() if not math.isfinite(v)]
        if bad:
            raise ValueError(f"{self.name}: non-finite values for {bad}")


@dataclass(frozen=True)
class ScoreVector:
    task: str
    model_name: str
    values: Mapping[str, float]
    bounded: bool = False

    def __post_init__(self):
        if self.bounded:
            bad = [c for c, v in self.values.items() if not 0.0 <= v <= 1.0]
            if bad:
                raise ValueError(f"{self.task}/{self.model_name}: scores outside [0, 1] for {bad}")


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation, with exactly rounded sums (``math.fsum``)."""
    n = len(x)
    if n != len(y):
        raise ValueError(f"length mismatch: {n} vs {len(y)}")
    if n < 2:
        raise UndefinedCorrelationError("need at least two points")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelationError("correlation with a constant vector is undefined")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


Category = tuple[Script, Tier]


@dataclass(frozen=True)
class CorrelationResult:
    r_overall: float | None
    n_overall: int
    per_category: dict[Category, float | None] = field(default_factory=dict)
    n_per_category: dict[Category, int] = field(default_factory=dict)
    metric: str = ""
    task: str = ""
    model_name: str = ""
    codes: tuple[str, ...] = ()

    def rows(self):
        """(category label, r, n) with the overall row first."""
        yield "overall", self.r_overall, self.n_overall
        for cat, r in self.per_category.items():
            yield category_label(*cat), r, self.n_per_category[cat]


def _safe_pearson(x, y) -> float | None:
    try:
        return pearson(x, y)
    except UndefinedCorrelationError:
        return None


def correlate(
    metric: MetricVector,
    scores: ScoreVector,
    registry: Registry,
    collapse_middle: bool = False,
) -> CorrelationResult:
    """Overall and per script x tier correlation over the shared language codes.

    Categories with fewer than two points, or constant values, are kept
    with ``None`` as their coefficient.
    """
    shared = registry.sort_codes(set(metric.values) & set(scores.values))
    if len(shared) < 2:
        raise InsufficientDataError(
            f"{metric.name} vs {scores.task}: only {len(shared)} shared language(s)"
        )
    xs = [metric.values[c] for c in shared]
    ys = [scores.values[c] for c in shared]
    groups: dict[Category, list[str]] = {}
    for c in shared:
        groups.setdefault(classify(registry, c, collapse_middle), []).append(c)
    order = [(s, t) for s in Script for t in Tier]
    per_cat, n_cat = {}, {}
    for cat in order:
        if cat not in groups:
            continue
        codes = groups[cat]
        per_cat[cat] = _safe_pearson([metric.values[c] for c in codes], [scores.values[c] for c in codes])
        n_cat[cat] = len(codes)
    return CorrelationResult(
        r_overall=_safe_pearson(xs, ys),
        n_overall=len(shared),
        per_category=per_cat,
        n_per_category=n_cat,
        metric=metric.name,
        task=scores.task,
        model_name=scores.model_name or metric.model_name,
        codes=tuple(shared),
    )


def sign_label(r: float | None, expected_sign: str) -> str:
    if expected_sign not in ("positive", "negative"):
        raise ValueError(f"expected sign must be positive or negative, got {expected_sign!r}")
    if r is None:
        return "n/a"
    if r == 0:
        return "neutral"
    return "expected" if (r > 0) == (expected_sign == "positive") else "opposite"


@dataclass(frozen=True)
class SignedCorrelation:
    result: CorrelationResult
    expected_sign: str
    labels: dict[str, str]


def sign_report(result: CorrelationResult, expected_sign: str) -> SignedCorrelation:
    labels = {label: sign_label(r, expected_sign) for label, r, _ in result.rows()}
    return SignedCorrelation(result, expected_sign, labels)


def default_expected_sign(metric_name: str) -> str:
    """Parity premiums should hurt scores; information parity should help."""
    name = metric_name.lower()
    return "negative" if name.startswith("tp") or "missing" in name else "positive"
