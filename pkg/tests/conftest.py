import numpy as np
import pytest

from energyio import load_config, load_economy_table, load_energy_account, load_sector_catalog
from energyio.datasets import synthetic5_config, synthetic5_dir

# Lines collected by tests/test_acceptance.py, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def bundled_config():
    return load_config(synthetic5_config())


def _load(year):
    base = synthetic5_dir()
    catalog = load_sector_catalog(base / "sectors.csv")
    table = load_economy_table(catalog, base / str(year) / "flows.csv",
                               base / str(year) / "accounts.csv", year=year)
    account = load_energy_account(base / str(year) / "energy.csv", catalog, year=year)
    return table, account


@pytest.fixture(scope="session")
def table_2005():
    return _load(2005)[0]


@pytest.fixture(scope="session")
def bundled_2005():
    return _load(2005)


@pytest.fixture(scope="session")
def bundled_2011():
    return _load(2011)
