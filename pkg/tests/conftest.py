import os
from pathlib import Path

import numpy as np
import pytest

from profilecast.synthetic import write_daily_activity_csv

REFERENCE_ENV = "PROFILECAST_FITBIT_CSV"
REFERENCE_DEFAULT = Path(__file__).resolve().parents[1] / "data" / "dailyActivity_merged.csv"


def reference_csv_path():
    """The public Fitbit dailyActivity export, if available locally."""
    path = Path(os.environ.get(REFERENCE_ENV, REFERENCE_DEFAULT))
    return path if path.is_file() else None


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory):
    return write_daily_activity_csv(tmp_path_factory.mktemp("data") / "dailyActivity_synthetic.csv", seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240515)


_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(number, (title, "PASS", ""))
        if report.outcome == "failed":
            msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
            _criteria[number] = (title, "FAIL", msg.splitlines()[0] if msg else "")
        elif report.outcome == "skipped":
            _criteria[number] = (title, "SKIP", "")
        elif prev[1] == "PASS":
            _criteria[number] = (title, "PASS", "")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, msg = _criteria[number]
        line = f"[{status}] criterion {number}: {title}"
        if msg:
            line += f" -- {msg}"
        terminalreporter.write_line(line)
