from __future__ import annotations

from collections import OrderedDict

import pytest

# criterion id -> (title, outcome); outcome is "PASS", "FAIL" or None while pending
_CRITERIA: "OrderedDict[str, list]" = OrderedDict()


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion checked by this test")


def pytest_collection_modifyitems(session: pytest.Session, config: pytest.Config, items: list) -> None:
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is None:
            continue
        cid, title = marker.args
        item.user_properties.append(("criterion", cid))
        _CRITERIA.setdefault(cid, [title, None])


def pytest_runtest_logreport(report: pytest.TestReport) -> None:
    cid = dict(report.user_properties).get("criterion")
    if cid is None or cid not in _CRITERIA:
        return
    entry = _CRITERIA[cid]
    if report.failed:
        entry[1] = "FAIL"
    elif report.when == "call" and report.passed and entry[1] is None:
        entry[1] = "PASS"


def pytest_terminal_summary(terminalreporter, exitstatus: int, config: pytest.Config) -> None:
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA):
        title, outcome = _CRITERIA[cid]
        terminalreporter.write_line(f"{cid} {outcome or 'NOT RUN':<7} {title}")
