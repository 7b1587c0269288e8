import random

import pytest

from vabe import abe_core


@pytest.fixture(scope="session")
def authority():
    """One deterministic authority shared by tests that just need keys."""
    pp, msk = abe_core.setup(random.Random(0xABE))
    return pp, msk
