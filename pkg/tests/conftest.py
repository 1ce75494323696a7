import pytest

from kneadlab import CantorMapSpec, ToyModel, fixture, quadratic


@pytest.fixture
def tent2():
    return fixture("tent2")


@pytest.fixture
def quad2():
    return fixture("quad2")


@pytest.fixture
def quad12():
    return fixture("quad1.2")


@pytest.fixture
def coupled():
    return fixture("coupled")


@pytest.fixture(params=["example3-q", "example3-f", "example3-g"])
def ex3(request):
    return fixture(request.param)


def quad(c, cantor=None):
    return ToyModel(quadratic(c), cantor or CantorMapSpec())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
