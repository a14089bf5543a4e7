from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    from .acceptance_report import LINES, sort_key

    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(LINES, key=sort_key):
        passed, detail = LINES[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
