from __future__ import annotations

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


import pytest  # noqa: E402


@pytest.fixture
def record():
    """record(num, ok, detail): store and print one acceptance line."""
    def _record(num: int, ok: bool, detail: str):
        ACCEPTANCE_RESULTS[num] = (bool(ok), detail)
        print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return _record
