import pytest

from relproxy.packets import PacketSpec


@pytest.fixture
def rest():
    """Massless packet at rest with unit width."""
    return PacketSpec()


def rel(a, b):
    return abs(a - b) / abs(b)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
