from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tokfair.corpus import load_parallel
from tokfair.tokenizers import load_tokenizer

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parent / "data"
FIXTURE_CODES = ["eng_Latn", "deu_Latn", "ind_Latn", "rus_Cyrl", "ukr_Cyrl", "hin_Deva"]


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def toy_models():
    return {k: load_tokenizer(DATA / "models" / f"toy_{k}.json") for k in ("bpe", "wp", "sp")}


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_parallel(DATA / "parallel", FIXTURE_CODES[1:], "eng_Latn")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
