import pytest
from hypothesis import settings

from hypsteklov.tiling import build_host_graph, generate_tiling

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def host237():
    return build_host_graph(generate_tiling(2, 3, 7, 8))


@pytest.fixture(scope="session")
def host334():
    return build_host_graph(generate_tiling(3, 3, 4, 6))


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
