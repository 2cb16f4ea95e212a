import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from contextuality import bell_models  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"

_acceptance: dict[int, tuple[str, str]] = {}


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture(params=sorted(bell_models.STANDARD_MODELS))
def standard_model(request):
    return bell_models.STANDARD_MODELS[request.param]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        if _acceptance.get(number, ("PASS",))[0] != "FAIL":
            _acceptance[number] = (status, title)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, title = _acceptance[number]
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} {status}  {title}")
