import pytest

from binmds.basecode import evenodd_base, rs_companion_base
from binmds.construct import build_c1, build_c2, make_coefficients


@pytest.fixture(scope="session")
def c1_small():
    """(5,3) code with s = r = 2 over a (5,3,4) RS base, l = 32."""
    return build_c1(rs_companion_base(3, 2, 4), 3, 2, make_coefficients(4))


@pytest.fixture(scope="session")
def c1_partial():
    """k=4, r=3, s=2: only part of the parity budget is spent on repair. l = 64."""
    return build_c1(rs_companion_base(5, 3, 4), 4, 2, make_coefficients(4))


@pytest.fixture(scope="session")
def c2_small():
    """(9,5) code with r=4, s=2 over an (12,8,4) RS base, l = 32."""
    return build_c2(rs_companion_base(8, 4, 4), 5, make_coefficients(4))


@pytest.fixture(scope="session")
def evenodd():
    return evenodd_base(4, 3)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num][1])
