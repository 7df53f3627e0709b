import pytest

REPORT = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[REPORT] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(REPORT, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record one acceptance line; it is echoed now and again in the terminal summary."""

    def record(line: str) -> None:
        print(line)
        request.config.stash[REPORT].append(line)

    return record
