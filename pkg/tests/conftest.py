from __future__ import annotations

import pytest

from osgames.fixtures import load_corpus_programs, load_corpus_sources, load_fixture
from osgames.program import load_program

ALLC_SRC = 'fn strategy() {\n    return "C"\n}\n'
ALLD_SRC = 'fn strategy() {\n    return "D"\n}\n'
TFT_SRC = """fn strategy() {
    if len(my_history) == 0 {
        return "C"
    }
    if opp_history[-1] == "D" {
        return "D"
    }
    return "C"
}
"""
CRASHER_SRC = 'fn strategy() {\n    return 1 / 0\n}\n'


@pytest.fixture(scope="session")
def allc():
    return load_program(ALLC_SRC, origin="allc")


@pytest.fixture(scope="session")
def alld():
    return load_program(ALLD_SRC, origin="alld")


@pytest.fixture(scope="session")
def tft():
    return load_program(TFT_SRC, origin="tft")


@pytest.fixture(scope="session")
def crasher():
    return load_program(CRASHER_SRC, origin="crasher")


@pytest.fixture(scope="session")
def ipd_corpus():
    return load_corpus_programs("ipd")


@pytest.fixture(scope="session")
def ipd_sources():
    return load_corpus_sources("ipd")


@pytest.fixture(scope="session")
def comparator():
    return load_fixture("equilibrium/syntactic_comparator.slang")


@pytest.fixture(scope="session")
def lookahead():
    return load_fixture("coin/lookahead.slang")
