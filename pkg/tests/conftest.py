import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def flagship():
    """p = 11 self-triple of the Delta family, a = 8, grid k1 = 32..62 with k2 = k3 = 12."""
    from hidatriple.families import delta_family
    from hidatriple.triple import TripleContext

    p = 11
    F = delta_family(p, Np=12, M=7, B=12)
    G = delta_family(p, Np=12, M=1, B=p * 32 + p)
    return TripleContext(p, F, G, G, grid=((32, 42, 52, 62), (12,), (12,)), a=8, Np=8, B=20)


@pytest.fixture(scope="session")
def flagship_run(flagship):
    from hidatriple.triple import run_grid

    return run_grid(flagship)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
