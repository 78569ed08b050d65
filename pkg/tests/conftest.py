import os
from pathlib import Path

import numpy as np
import pytest

from amids import dataset

DATA_DIR = Path(__file__).parent / "data"
FIXTURE = DATA_DIR / "nslkdd_fixture.txt"
STREAM = DATA_DIR / "nslkdd_stream.txt"

# one line per acceptance criterion, filled in as the tests report
_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    name = report.__dict__.get("criterion")
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _criteria[name] = (report.outcome, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().__dict__["criterion"] = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, detail) in _criteria.items():
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{status}  {name}" + (f"  [{detail}]" if detail else ""))


@pytest.fixture(scope="session")
def fixture_path():
    return str(FIXTURE)


@pytest.fixture(scope="session")
def stream_path():
    return str(STREAM)


@pytest.fixture(scope="session")
def fixture_records():
    return dataset.read_nslkdd(FIXTURE)


@pytest.fixture(scope="session")
def fixture_table(fixture_records):
    return dataset.build_encoding(fixture_records)


@pytest.fixture(scope="session")
def fixture_xy(fixture_records, fixture_table):
    X, y = dataset.encode_records(fixture_records, fixture_table)
    X.flags.writeable = False
    y.flags.writeable = False
    return X, y


@pytest.fixture(scope="session")
def fixture_std(fixture_xy):
    X, y = fixture_xy
    params = dataset.fit_standardization(X)
    return dataset.standardize(X, params), y, params


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def nslkdd_dir():
    return Path(os.environ.get("NSLKDD_DIR", Path(__file__).resolve().parents[1] / "data"))
