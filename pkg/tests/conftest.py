import pytest

from reciprec import bundled
from reciprec.taxonomy import load_taxonomy

SMALL_EDGES = """\
root,sports
root,science
sports,football
sports,soccer
science,AI
AI,ML
"""


@pytest.fixture(scope="session")
def small_taxonomy():
    return load_taxonomy(SMALL_EDGES)


@pytest.fixture(scope="session")
def taxonomy():
    return bundled.taxonomy()


@pytest.fixture(scope="session")
def locations():
    return bundled.locations()


@pytest.fixture(scope="session")
def sample():
    profiles = bundled.sample_profiles()
    prefs = bundled.sample_preferences()
    return profiles, prefs, {p.id: p for p in profiles}, {p.learner_id: p for p in prefs}


# Acceptance criteria: one PASS/FAIL line per criterion in the terminal summary.
_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker:
            number, title = marker.args
            entry = _criteria.setdefault(number, {"title": title, "outcomes": {}})
            entry["outcomes"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry["outcomes"]:
            if report.failed:
                entry["outcomes"][report.nodeid] = False
            elif report.when == "call" and entry["outcomes"][report.nodeid] is None:
                entry["outcomes"][report.nodeid] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        results = list(entry["outcomes"].values())
        if any(r is False for r in results):
            status = "FAIL"
        elif all(r is True for r in results):
            status = "PASS"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['title']} ({len(results)} checks)")
