from pathlib import Path

import pytest

import whitehead_dgl
from whitehead_dgl.modelfile import load_model

FIXTURES = Path(whitehead_dgl.__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def example_model():
    """The free component of map(S^3, Y; f) from the bundled fixture."""
    return load_model(FIXTURES / "example6_7.dgl")


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
