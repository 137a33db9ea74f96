import numpy as np
import pytest

from eehssk.constellation import BinarySymbol, build_code_dmin, alphabet_from_priors
from eehssk.design import DesignProblem, solve
from eehssk.huffman import build_codebook


def sym(s: str) -> BinarySymbol:
    return BinarySymbol.from_string(s)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def table3_codebook():
    code = build_code_dmin(5, 2)
    sol = solve(DesignProblem.from_code(code, 3, 3.0))
    return build_codebook(alphabet_from_priors(code, sol.priors))


# one summary line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_DETAILS: dict[int, str] = {}
_ACCEPTANCE_OUTCOMES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
        _ACCEPTANCE_OUTCOMES[number] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_OUTCOMES):
        detail = ACCEPTANCE_DETAILS.get(number, "")
        terminalreporter.write_line(f"criterion {number}: {_ACCEPTANCE_OUTCOMES[number]}  {detail}")
