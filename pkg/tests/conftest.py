import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def record_acceptance(name: str, passed: bool) -> None:
    _ACCEPTANCE_RESULTS.append((name, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    reports = []
    for status in ("passed", "failed", "error"):
        reports.extend(terminalreporter.stats.get(status, []))
    lines = []
    for rep in reports:
        if getattr(rep, "when", "call") != "call":
            continue
        if "test_acceptance" not in str(getattr(rep, "nodeid", "")):
            continue
        verdict = "PASS" if rep.passed else "FAIL"
        name = rep.nodeid.split("::")[-1]
        lines.append(f"[{verdict}] {name}")
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
