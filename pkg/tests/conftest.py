from __future__ import annotations

from hypothesis import HealthCheck, settings

# exact arithmetic makes some examples slow; determinism matters more than speed
settings.register_profile(
    "exact",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")



def pytest_configure(config):
    # one line per acceptance criterion, appended by tests/test_acceptance.py
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
