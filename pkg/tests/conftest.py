import os

import pytest

_CRITERIA = pytest.StashKey[list]()


def pytest_collection_modifyitems(config, items):
    if os.environ.get("ACTIVERIS_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow; set ACTIVERIS_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_CRITERIA, [])

    def record(name, ok, detail):
        line = f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
