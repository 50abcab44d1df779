"""Language metadata: script class, resource tier and character ranges.

A registry is loaded from a JSON document::

    {
      "reference": "eng_Latn",
      "languages": [
        {"code": "hin_Deva", "name": "Hindi", "script": "nonlatin",
         "tier": "high", "ranges": [["0x0900", "0x097F"]], "specials": []}
      ]
    }

Ranges are closed (both ends inclusive). Half-open ranges written the way
Unicode tables often print them, e.g. ``(0x0900, 0x097F + 1)``, must be
stored as ``["0x0900", "0x097F"]``. Specials are codepoints given as hex
strings, integers or one-character strings.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError, FormatError, UnknownLanguageError

DEFAULT_REFERENCE = "eng_Latn"
MAX_CODEPOINT = 0x10FFFF


class Script(str, enum.Enum):
    LATIN = "latin"
    NONLATIN = "nonlatin"

    @property
    def label(self) -> str:
        return "Latin" if self is Script.LATIN else "Non-Latin"


class Tier(str, enum.Enum):
    HIGH = "high"
    MIDDLE = "middle"
    LOW = "low"

    @property
    def label(self) -> str:
        return self.value.capitalize()


def category_label(script: Script, tier: Tier) -> str:
    """``(Script.LATIN, Tier.HIGH)`` -> ``"Latin-High"``."""
    return f"{script.label}-{tier.label}"


@dataclass(frozen=True, order=True)
class CharRange:
    lo: int
    hi: int

    def __post_init__(self):
        for v in (self.lo, self.hi):
            if not 0 <= v <= MAX_CODEPOINT or 0xD800 <= v <= 0xDFFF:
                raise ValueError(f"not a Unicode scalar value: {v:#x}")
        if self.lo > self.hi:
            raise ValueError(f"empty range {self.lo:#x}..{self.hi:#x}")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, cp: int) -> bool:
        return self.lo <= cp <= self.hi

    @classmethod
    def from_half_open(cls, lo: int, stop: int) -> CharRange:
        return cls(lo, stop - 1)


@dataclass(frozen=True)
class LanguageProfile:
    code: str
    script: Script
    tier: Tier
    ranges: tuple[CharRange, ...] = ()
    specials: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        if not self.code:
            raise ValueError("language code must be non-empty")
        ordered = sorted(self.ranges)
        for a, b in zip(ordered, ordered[1:]):
            if b.lo <= a.hi:
                raise ValueError(f"{self.code}: overlapping ranges {a} and {b}")

    @property
    def category(self) -> tuple[Script, Tier]:
        return self.script, self.tier


def char_set(profile: LanguageProfile) -> list[int]:
    """All codepoints of a language's character universe, ascending."""
    cps = set(profile.specials)
    for r in profile.ranges:
        cps.update(range(r.lo, r.hi + 1))
    return sorted(cps)


@dataclass(frozen=True)
class Registry:
    profiles: Mapping[str, LanguageProfile]
    reference: str = DEFAULT_REFERENCE
    order: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.reference not in self.profiles:
            raise ConfigError(f"reference language {self.reference!r} is not in the registry")
        if not self.order:
            object.__setattr__(self, "order", tuple(self.profiles))

    def __contains__(self, code: str) -> bool:
        return code in self.profiles

    def __getitem__(self, code: str) -> LanguageProfile:
        try:
            return self.profiles[code]
        except KeyError:
            raise UnknownLanguageError(code) from None

    def __iter__(self):
        return (self.profiles[c] for c in self.order)

    def __len__(self) -> int:
        return len(self.profiles)

    def sort_codes(self, codes: Iterable[str]) -> list[str]:
        """Registry order first; codes unknown to the registry go last, sorted."""
        rank = {c: i for i, c in enumerate(self.order)}
        return sorted(codes, key=lambda c: (rank.get(c, len(rank)), c))


def classify(registry: Registry, code: str, collapse_middle: bool = False) -> tuple[Script, Tier]:
    """Script and tier of ``code``. With ``collapse_middle`` Middle counts as Low."""
    p = registry[code]
    tier = Tier.LOW if collapse_middle and p.tier is Tier.MIDDLE else p.tier
    return p.script, tier


def _parse_codepoint(value, where: str) -> int:
    if isinstance(value, bool):
        raise FormatError(f"{where}: expected a codepoint, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        if len(value) == 1:
            return ord(value)
        digits = value[2:] if value[:2].lower() in ("0x", "u+") else value
        try:
            return int(digits, 16)
        except ValueError:
            pass
    raise FormatError(f"{where}: expected a codepoint, got {value!r}")


def _parse_profile(entry, where: str) -> LanguageProfile:
    if not isinstance(entry, dict):
        raise FormatError(f"{where}: expected an object")
    try:
        code = entry["code"]
        script = Script(str(entry["script"]).lower().replace("-", ""))
        tier = Tier(str(entry["tier"]).lower())
    except KeyError as e:
        raise FormatError(f"{where}: missing field {e.args[0]!r}") from None
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None
    if not isinstance(code, str) or not code:
        raise FormatError(f"{where}.code: must be a non-empty string")
    where = f"{where} ({code})"
    ranges = []
    for i, pair in enumerate(entry.get("ranges", [])):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise FormatError(f"{where}.ranges[{i}]: expected a [lo, hi] pair")
        lo = _parse_codepoint(pair[0], f"{where}.ranges[{i}]")
        hi = _parse_codepoint(pair[1], f"{where}.ranges[{i}]")
        try:
            ranges.append(CharRange(lo, hi))
        except ValueError as e:
            raise FormatError(f"{where}.ranges[{i}]: {e}") from None
    specials = tuple(
        _parse_codepoint(v, f"{where}.specials[{i}]") for i, v in enumerate(entry.get("specials", []))
    )
    try:
        return LanguageProfile(code, script, tier, tuple(ranges), specials, entry.get("name", ""))
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None


def parse_registry(text: str, source: str = "<registry>") -> Registry:
    if not text.strip():
        raise FormatError(f"{source}: empty registry file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("languages"), list):
        raise FormatError(f"{source}: expected an object with a 'languages' list")
    profiles: dict[str, LanguageProfile] = {}
    for i, entry in enumerate(doc["languages"]):
        p = _parse_profile(entry, f"{source}: languages[{i}]")
        if p.code in profiles:
            raise FormatError(f"{source}: languages[{i}]: duplicate code {p.code!r}")
        profiles[p.code] = p
    reference = doc.get("reference", DEFAULT_REFERENCE)
    return Registry(profiles, reference)


def load_registry(path: str | Path | None = None) -> Registry:
    """Load a registry file; ``None`` loads the bundled default."""
    if path is None:
        text = resources.files("tokfair.data").joinpath("default_registry.json").read_text("utf-8")
        return parse_registry(text, "default_registry.json")
    path = Path(path)
    return parse_registry(path.read_text(encoding="utf-8"), str(path))


def dump_registry(registry: Registry) -> str:
    langs = []
    for p in registry:
        entry = {"code": p.code}
        if p.name:
            entry["name"] = p.name
        entry["script"] = p.script.value
        entry["tier"] = p.tier.value
        entry["ranges"] = [[f"0x{r.lo:04X}", f"0x{r.hi:04X}"] for r in p.ranges]
        entry["specials"] = [f"0x{cp:04X}" for cp in p.specials]
        langs.append(entry)
    return json.dumps({"reference": registry.reference, "languages": langs}, ensure_ascii=False, indent=2) + "\n"
