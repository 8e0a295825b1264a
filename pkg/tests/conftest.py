import sys

import numpy as np
import pytest

from blid.corpus import Corpus, LabeledWord, Tag


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines after the run.

    The tests also print them live, but default fd-level capture
    swallows that; this hook runs after capture ends.
    """
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICT_LINES", [])
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def tiny_corpus() -> Corpus:
    """Nine words, three per tag, fixed order."""
    items = [
        LabeledWord("asa", Tag.WAL),
        LabeledWord("giddiis", Tag.WAL),
        LabeledWord("kaalletanawu", Tag.WAL),
        LabeledWord("hayassafe", Tag.GOF),
        LabeledWord("hintte", Tag.GOF),
        LabeledWord("ekkide", Tag.GOF),
        LabeledWord("kaallidi", Tag.WAL_GOF),
        LabeledWord("hara", Tag.WAL_GOF),
        LabeledWord("doonan", Tag.WAL_GOF),
    ]
    return Corpus(items=items, name="tiny")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
