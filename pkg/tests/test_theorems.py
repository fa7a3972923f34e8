import pytest

from theorems import SUITES, uniqueness


@pytest.mark.parametrize("name", list(SUITES))
def test_implication_suite(name):
    checked, bad, vacuous = SUITES[name]()
    assert checked >= 50
    assert not bad, f"violations at seeds {bad}"
    assert vacuous < checked, "hypothesis never met"


def test_uniqueness_on_planted():
    checked, bad, vacuous = uniqueness()
    assert checked >= 50 and not bad and vacuous == 0
