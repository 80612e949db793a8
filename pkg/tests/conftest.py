"""Shared pytest fixtures and the acceptance summary block."""

import pytest

from urbantactics.ingest import Vocabulary


@pytest.fixture
def small_vocab() -> Vocabulary:
    return Vocabulary(
        ("bench", "tree", "planter", "sign", "person"),
        {"shrub": "tree", "seat": "bench"},
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after any run."""
    verdicts: dict[str, bool] = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            ok = outcome == "passed"
            verdicts[name] = verdicts.get(name, True) and ok
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok in verdicts.items():
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")
