from __future__ import annotations

import pytest

from projdim.levels import get_level_data
from projdim.system import rauzy_system


@pytest.fixture(scope="session")
def rauzy():
    return rauzy_system()


@pytest.fixture(scope="session")
def deep_levels(rauzy):
    """One shared depth-14 walk with singular values; later callers hit the cache."""
    return get_level_data(rauzy, 14, with_sv=True)
