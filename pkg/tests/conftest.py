import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record an acceptance criterion's outcome for the end-of-run report."""
    name = request.node.get_closest_marker("criterion").args[0]
    entry = {"name": name, "status": "FAIL", "note": ""}
    _CRITERIA.append(entry)
    yield entry
    if entry["status"] == "FAIL" and not entry["note"]:
        entry["note"] = "assertion failed"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for entry in _CRITERIA:
        note = f"  ({entry['note']})" if entry["note"] else ""
        terminalreporter.write_line(f"[{entry['status']}] {entry['name']}{note}")
