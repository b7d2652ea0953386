from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from thoma_lab.symgroup import Permutation
from thoma_lab.thoma import ThomaParams

settings.register_profile(
    "repo", deadline=None, max_examples=60, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def permutations_of(n: int):
    """Uniform permutations of ``range(n)``."""
    return st.permutations(range(n)).map(Permutation.from_one_line)


@st.composite
def permutations_up_to(draw, n: int = 7):
    size = draw(st.integers(0, n))
    return draw(permutations_of(size))


@st.composite
def thoma_params(draw, max_a: int = 3, max_b: int = 2, denominators=(2, 3, 4, 5, 6, 8, 12)):
    """Small exact parameter sets; total mass at most one, repeats allowed."""
    values = []
    budget = Fraction(1)
    for _ in range(draw(st.integers(0, max_a + max_b))):
        q = draw(st.sampled_from(denominators))
        x = Fraction(draw(st.integers(1, q)), q)
        if x <= budget:
            values.append(x)
            budget -= x
    cut = draw(st.integers(0, len(values)))
    return ThomaParams(tuple(values[:cut][:max_a]), tuple(values[cut:][:max_b]))


# -- acceptance summary ------------------------------------------------------
# Tests marked ``criterion(number, summary)`` are tallied here and reported as
# one PASS/FAIL line per criterion at the end of the run.

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, summary): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, summary = marker.args
    entry = _criteria.setdefault(number, {"summary": summary, "ok": True, "seen": False})
    if report.when == "call":
        entry["seen"] = True
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] and entry["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {entry['summary']}")
