import pytest

from mtvaug.synthetic import SyntheticConfig, generate
from mtvaug.textcore import SynonymLexicon


@pytest.fixture(scope="session")
def small_corpus():
    return generate(SyntheticConfig(n_train=240, n_test=160, seed=3))


@pytest.fixture
def toy_lexicon():
    return SynonymLexicon({"a": ["x", "y"], "b": ["z"], "good": ["fine", "nice"]})


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
