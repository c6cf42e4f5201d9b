from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture
def write_scenario(tmp_path):
    """Write ``lines`` to a scenario file in a fresh directory."""

    def write(*lines, name="case.scn"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return write


def pytest_terminal_summary(terminalreporter):
    # one verdict line per acceptance criterion, after the regular report
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
