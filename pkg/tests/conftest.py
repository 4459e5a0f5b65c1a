from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from pardce.frontend import parse

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

# criterion number -> (title, passed, detail); filled by test_acceptance.py
_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[number] = (title, passed, detail)

    return record


@pytest.fixture(scope="session")
def motivating_text() -> str:
    return (DATA / "motivating.par").read_text()


@pytest.fixture(scope="session")
def motivating(motivating_text):
    return parse(motivating_text)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  [{detail}]")
