from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def corpus_files():
    return sorted((DATA / "corpus").glob("*.foon"))


@pytest.fixture
def kitchen_path():
    return DATA / "kitchen.txt"


@pytest.fixture
def motions_path():
    return DATA / "motions.txt"


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in getattr(rep, "nodeid", "") and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"[{verdict}] {name}")
