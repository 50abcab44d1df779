import pytest

from tokfair.errors import ConfigError, FormatError, UnknownLanguageError
from tokfair.registry import (
    CharRange,
    LanguageProfile,
    Registry,
    Script,
    Tier,
    category_label,
    char_set,
    classify,
    dump_registry,
    load_registry,
    parse_registry,
)


@pytest.fixture(scope="module")
def reg():
    return load_registry()


def test_classify_examples(reg):
    assert classify(reg, "deu_Latn") == (Script.LATIN, Tier.HIGH)
    assert classify(reg, "hin_Deva") == (Script.NONLATIN, Tier.HIGH)
    with pytest.raises(UnknownLanguageError):
        classify(reg, "xxx_Xxxx")


def test_collapse_middle(reg):
    middle = [p.code for p in reg if p.tier is Tier.MIDDLE]
    assert middle
    for code in middle:
        assert classify(reg, code, collapse_middle=True)[1] is Tier.LOW
        assert classify(reg, code) == classify(reg, code)


def test_default_registry_shape(reg):
    assert reg.reference == "eng_Latn"
    assert len(reg) == 55
    cats = {p.category for p in reg if p.code != "eng_Latn"}
    assert len(cats) == 6


def test_char_set_sizes(reg):
    assert len(char_set(reg["hin_Deva"])) == 128
    assert len(char_set(reg["arb_Arab"])) == 256
    eng = char_set(reg["eng_Latn"])
    assert len(eng) == 52
    assert eng == sorted(eng)
    empty = LanguageProfile("zzz_Latn", Script.LATIN, Tier.LOW)
    assert char_set(empty) == []


def test_char_set_counts_specials_outside_ranges():
    p = LanguageProfile("x_Latn", Script.LATIN, Tier.LOW, (CharRange(0x61, 0x7A),), (0x62, 0xE9, 0xF1))
    assert len(char_set(p)) == 26 + 2


def test_half_open_normalization():
    assert CharRange.from_half_open(0x0900, 0x097F + 1) == CharRange(0x0900, 0x097F)
    assert len(CharRange(0x41, 0x5A)) == 26


def test_range_validation():
    with pytest.raises(ValueError):
        CharRange(0x50, 0x40)
    with pytest.raises(ValueError):
        CharRange(0, 0x110000)
    with pytest.raises(ValueError):
        LanguageProfile("x", Script.LATIN, Tier.LOW, (CharRange(1, 10), CharRange(5, 20)))


def test_roundtrip(reg):
    again = parse_registry(dump_registry(reg))
    assert [p for p in again] == [p for p in reg]
    assert again.reference == reg.reference


def test_parse_errors():
    with pytest.raises(FormatError):
        parse_registry("")
    with pytest.raises(FormatError):
        parse_registry('{"languages": [}')
    dup = '{"languages": [{"code": "eng_Latn", "script": "latin", "tier": "high"},' \
          ' {"code": "eng_Latn", "script": "latin", "tier": "high"}]}'
    with pytest.raises(FormatError):
        parse_registry(dup)
    with pytest.raises((FormatError, ConfigError)):
        parse_registry('{"reference": "fra_Latn", "languages": [{"code": "eng_Latn", "script": "latin", "tier": "high"}]}')
    with pytest.raises(FormatError):
        parse_registry('{"languages": [{"code": "eng_Latn", "script": "greek", "tier": "high"}]}')


def test_parse_hex_ranges():
    reg = parse_registry('{"languages": [{"code": "eng_Latn", "script": "latin", "tier": "high",'
                         ' "ranges": [["0x41", "0x5A"], ["U+0061", "007A"]], "specials": ["0xE9"]}]}')
    assert len(char_set(reg["eng_Latn"])) == 53


def test_registry_requires_reference():
    with pytest.raises(ConfigError):
        Registry({"deu_Latn": LanguageProfile("deu_Latn", Script.LATIN, Tier.HIGH)})


def test_sort_codes_and_labels(reg):
    assert reg.sort_codes(["zzz", "hin_Deva", "eng_Latn"])[0] == "eng_Latn"
    assert reg.sort_codes(["zzz", "hin_Deva"])[-1] == "zzz"
    assert category_label(Script.NONLATIN, Tier.LOW) == "Non-Latin-Low"
