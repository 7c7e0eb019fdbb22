import pytest

from blowblur.blowup import blur_structure, f_l_mu
from blowblur.finite_ra import make_M

I6 = list("ABCDEF")

# criterion number -> (passed, detail); filled in by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def M6():
    return make_M(I6)


@pytest.fixture(scope="session")
def blur6(M6):
    return blur_structure(M6)


@pytest.fixture(scope="session")
def f21():
    return f_l_mu(I6, 2, 1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
