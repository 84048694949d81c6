import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    lines = [
        line
        for name, mod in list(sys.modules.items())
        if name.rsplit(".", 1)[-1] == "test_acceptance"
        for line in getattr(mod, "RESULTS", [])
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("]", 1)[1]):
            terminalreporter.write_line(line)
