from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gcsl.model import StateValuation, TimedTrace, load_model  # noqa: E402

DATA = resources.files("gcsl") / "data"
GOLDEN = Path(__file__).parent / "golden"

_acceptance: dict[int, tuple[str, str]] = {}


def data_text(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def data_path(name: str) -> str:
    return str(DATA / name)


def make_trace(times, **columns):
    """Trace over instance ``s`` from parallel value lists: make_trace([0, 1], p=[True, False])."""
    samples = []
    for i, t in enumerate(times):
        values = {("s", name): col[i] for name, col in columns.items()}
        samples.append(StateValuation(float(t), values))
    return TimedTrace(tuple(samples))


@pytest.fixture(scope="session")
def fire_model():
    return load_model(data_text("fire.sosm"))


@pytest.fixture(scope="session")
def coin_model():
    return load_model(data_text("coin.sosm"))


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        previous = _acceptance.get(number, (title, "PASS"))[1]
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _acceptance[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"{status}  criterion {number}: {title}")
