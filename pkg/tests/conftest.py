import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from wavelet.keygen import keygen  # noqa: E402
from wavelet.params import SUPERTUBOS, TOY48, TOY60, tables_for  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def toy_key():
    sk, pk, classic = keygen(b"\x01\x02", TOY48, return_classic=True)
    return sk, pk, classic


@pytest.fixture(scope="session")
def toy60_key():
    sk, pk, classic = keygen(b"\x07\x07", TOY60, return_classic=True)
    return sk, pk, classic


@pytest.fixture(scope="session")
def toy_tables():
    return tables_for(TOY48)


@pytest.fixture(scope="session")
def big_key():
    sk, pk, classic = keygen(bytes(range(16)), SUPERTUBOS, return_classic=True)
    return sk, pk, classic


@pytest.fixture(scope="session")
def big_tables():
    return tables_for(SUPERTUBOS)
