"""Per-criterion pass/fail reporting for the acceptance suite."""
from collections import defaultdict

import pytest

CRITERIA = {
    1: "bounds example prints size_left=16, size_right=24 in under 1 s",
    2: "location lifecycle probe prints STATIC STATIC AUTOMATIC DYNAMIC INVALID",
    3: "error catalogue: 5 unhardened programs abort, 5 hardened ones exit 0 (10/10)",
    4: "length guard: length -1 with 3-digit stdin exits 134 via guest abort()",
    5: "variadic avg: 2.0 for (3,1,2,3); 0 for a count or type mismatch",
    6: "format-string defense: printf(\"%s %s\",\"a\") returns -1, EINVAL, no output, no out-of-extent read",
    7: "strlen over 1000 fuzzed buffers equals min(first NUL, length)",
    8: "gets/gets_s: three examples each",
    9: "qsort: 500 random arrays match sorted(); wrong comparator leaves input unchanged with EINVAL",
    10: "host safety: 10000 random programs end in Exit or Abort with no host fault or extent violation in 10 min",
    11: "introspection algebra: >= 10000 generated cases, zero violations",
}

_results: dict[int, list[tuple[str, str]]] = defaultdict(list)
_notes: dict[int, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.fixture
def note(request):
    """Attach a line of measurements to the test's criterion in the summary."""
    marker = request.node.get_closest_marker("criterion")
    return lambda text: _notes[marker.args[0] if marker else 0].append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[marker.args[0]].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, text in CRITERIA.items():
        runs = _results.get(n)
        if not runs:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in runs):
            status = "PASS"
        else:
            status = "FAIL"
        tr.write_line(f"criterion {n:2d}: {status:7s} {text} [{len(runs or [])} test(s)]")
        for line in _notes.get(n, []):
            tr.write_line(f"              {line}")
