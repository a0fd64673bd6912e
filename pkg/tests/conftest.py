import os

import numpy as np
import pytest

from esperantist import _kernels

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    ok = _CRITERIA.get(num, (title, True))[1]
    if rep.failed or (rep.when == "call" and rep.skipped):
        ok = False
    _CRITERIA[num] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(params=sorted(_kernels.backends()))
def kernels(request):
    """Each available kernel backend module in turn."""
    return _kernels.backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("ESPERANTIST_CACHE_DIR", str(d))
    return d


def pytest_report_header(config):
    forced = " (forced by ESPERANTIST_PURE_PYTHON)" if os.environ.get("ESPERANTIST_PURE_PYTHON") else ""
    return f"esperantist kernel backend: {_kernels.BACKEND}{forced}"
