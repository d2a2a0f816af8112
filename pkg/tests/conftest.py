import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> list of (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str):
        ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        entries = ACCEPTANCE[n]
        ok = all(p for p, _ in entries)
        failed = [d for p, d in entries if not p]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({len(entries)} checks"
        line += ")" if ok else f"; failing: {'; '.join(failed)})"
        terminalreporter.write_line(line)
