import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from actualcause.corpus import load_document


@pytest.fixture(scope="session")
def doc():
    """Loader for bundled corpus documents, cached across the session."""
    return load_document


@pytest.fixture(scope="session")
def rt_naive():
    return load_document("rock_throwing_naive")


@pytest.fixture(scope="session")
def rt_detailed():
    return load_document("rock_throwing_detailed")


@pytest.fixture(scope="session")
def hopkins():
    return load_document("hopkins_pearl")
