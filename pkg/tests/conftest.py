import numpy as np
import pytest

from aquasift.corpus import Corpus, Tweet

FIXTURES = __file__.rsplit("/", 1)[0] + "/fixtures"

_ACCEPTANCE_RESULTS = []


def record_criterion(name: str, passed: bool = True) -> None:
    _ACCEPTANCE_RESULTS.append((name, passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}: {name}")


def make_corpus(texts, labels=None, locations=None, prefix="t"):
    labels = labels or [None] * len(texts)
    locations = locations or [None] * len(texts)
    return Corpus(
        Tweet(id=f"{prefix}{i}", text=text, label=label, location=loc)
        for i, (text, label, loc) in enumerate(zip(texts, labels, locations))
    )


def partitions_equal(expected, actual) -> bool:
    """Same noise set and a bijection between cluster labelings."""
    expected, actual = np.asarray(expected), np.asarray(actual)
    if expected.shape != actual.shape:
        return False
    if not np.array_equal(expected == -1, actual == -1):
        return False
    mapping = {}
    for e, a in zip(expected, actual):
        if e == -1:
            continue
        if e in mapping and mapping[e] != a:
            return False
        mapping[e] = a
    return len(set(mapping.values())) == len(mapping)


@pytest.fixture
def toy_labeled_corpus():
    """Linearly separable two-class corpus with disjoint vocabularies."""
    relevant = [f"alpha beta gamma delta variant{i}" for i in range(5)]
    irrelevant = [f"omega sigma tau phi variant{i}" for i in range(5)]
    return make_corpus(
        relevant + irrelevant,
        labels=["relevant"] * 5 + ["irrelevant"] * 5,
    )
