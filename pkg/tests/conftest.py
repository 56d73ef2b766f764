"""Shared test configuration and the acceptance-criteria banner."""

from contextlib import contextmanager

from hypothesis import settings

settings.register_profile(
    "calmcheck", deadline=None, derandomize=True, max_examples=150
)
settings.load_profile("calmcheck")

# populated by tests/test_acceptance.py; number -> (description, passed)
RESULTS = {}


@contextmanager
def criterion(number, description):
    """Record pass/fail for one acceptance criterion around its asserts."""
    try:
        yield
    except BaseException:
        RESULTS[number] = (description, False)
        raise
    RESULTS[number] = (description, True)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(RESULTS):
        description, passed = RESULTS[number]
        word = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[criterion {number:02d}] {word} - {description}")
