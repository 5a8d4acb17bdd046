import pytest

from oscsum import forms


@pytest.fixture(scope="session")
def delta_table():
    """Weight-12 eigenvalues to 4*10**5, enough for the Voronoi and resonance tests."""
    return forms.build_eigenform(12, 400_000)


@pytest.fixture(scope="session")
def w16_table():
    return forms.build_eigenform(16, 200_000)


@pytest.fixture(scope="session")
def pair():
    """The weight 12 and 16 tables at full design length (cached on disk)."""
    from oscsum.acceptance import pair_tables

    return pair_tables()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from test_acceptance import ACCEPTANCE_LINES

    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
